#include "crowdnet/csv.hpp"

#include <charconv>
#include <cmath>

#include "crowdnet/errors.hpp"

namespace crowdnet::csv
{

    std::string format_double(double value)
    {
        if (std::isnan(value))
            return "nan";
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
        return std::string(buf, end);
    }

    namespace
    {
        std::vector<std::string_view> split(std::string_view line)
        {
            std::vector<std::string_view> out;
            std::size_t start = 0;
            while (true)
            {
                auto pos = line.find(',', start);
                if (pos == std::string_view::npos)
                {
                    out.push_back(line.substr(start));
                    break;
                }
                out.push_back(line.substr(start, pos - start));
                start = pos + 1;
            }
            return out;
        }

        void chomp(std::string &s)
        {
            while (!s.empty() && (s.back() == '\r' || s.back() == '\n'))
                s.pop_back();
        }
    } // namespace

    Reader::Reader(const std::filesystem::path &path, std::string_view header)
        : in_(path), name_(path.string())
    {
        if (!in_)
            throw IoError("cannot open " + name_);
        while (std::getline(in_, buffer_))
        {
            ++line_no_;
            chomp(buffer_);
            if (buffer_.empty() || buffer_.front() == '#')
                continue;
            if (buffer_ != header)
                fail("expected header '" + std::string(header) + "', got '" + buffer_ + "'");
            columns_ = split(header).size();
            return;
        }
        fail("missing header '" + std::string(header) + "'");
    }

    bool Reader::next()
    {
        while (std::getline(in_, buffer_))
        {
            ++line_no_;
            chomp(buffer_);
            if (buffer_.empty() || buffer_.front() == '#')
                continue;
            fields_ = split(buffer_);
            if (fields_.size() != columns_)
                fail("expected " + std::to_string(columns_) + " fields, got " + std::to_string(fields_.size()));
            return true;
        }
        return false;
    }

    double Reader::number(std::size_t i) const
    {
        auto f = fields_.at(i);
        double v = 0.0;
        auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || p != f.data() + f.size() || !std::isfinite(v))
            fail("field " + std::to_string(i + 1) + " is not a finite number: '" + std::string(f) + "'");
        return v;
    }

    Date Reader::date(std::size_t i) const
    {
        auto d = Date::parse(fields_.at(i));
        if (!d)
            fail("field " + std::to_string(i + 1) + " is not an ISO date: '" + std::string(fields_.at(i)) + "'");
        return *d;
    }

    void Reader::fail(const std::string &detail) const { throw SchemaError(name_, line_no_, detail); }

    Writer::Writer(const std::filesystem::path &path) : name_(path.string())
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_)
            throw IoError("cannot write " + name_);
    }

    void Writer::comment(const std::string &text) { out_ << "# " << text << '\n'; }

    void Writer::header(std::string_view text) { out_ << text << '\n'; }

    void Writer::row(const std::vector<std::string> &fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (i)
                out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        if (!out_)
            throw IoError("write failed: " + name_);
    }

} // namespace crowdnet::csv
