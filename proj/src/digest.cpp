#include "crowdnet/digest.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "crowdnet/errors.hpp"

namespace crowdnet
{
    namespace
    {
        struct CtxDeleter
        {
            void operator()(EVP_MD_CTX *ctx) const { EVP_MD_CTX_free(ctx); }
        };
        using Ctx = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

        Ctx start()
        {
            Ctx ctx(EVP_MD_CTX_new());
            if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
                throw Error("DigestError", "EVP_DigestInit_ex failed");
            return ctx;
        }

        std::string finish(EVP_MD_CTX *ctx)
        {
            unsigned char md[EVP_MAX_MD_SIZE];
            unsigned int len = 0;
            EVP_DigestFinal_ex(ctx, md, &len);
            static constexpr char hex[] = "0123456789abcdef";
            std::string out;
            out.reserve(2 * len);
            for (unsigned i = 0; i < len; ++i)
            {
                out.push_back(hex[md[i] >> 4]);
                out.push_back(hex[md[i] & 0xF]);
            }
            return out;
        }
    } // namespace

    std::string sha256_hex(std::string_view data)
    {
        auto ctx = start();
        EVP_DigestUpdate(ctx.get(), data.data(), data.size());
        return finish(ctx.get());
    }

    std::string sha256_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot open " + path.string());
        auto ctx = start();
        char buf[1 << 16];
        while (in)
        {
            in.read(buf, sizeof buf);
            EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
        }
        return finish(ctx.get());
    }
} // namespace crowdnet
