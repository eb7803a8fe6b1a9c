#include "crowdnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "crowdnet/csv.hpp"
#include "crowdnet/errors.hpp"

namespace crowdnet::synth
{
    namespace
    {
        // Return model constants.
        constexpr double kMarketMean = 0.008;
        constexpr double kMarketVol = 0.04;
        constexpr double kStyleVol = 0.01;
        constexpr double kIdioVol = 0.04;
        constexpr double kBlockDrift = -0.003;
        constexpr double kBlockConvexity = -8.0; // loading on squared market return
        constexpr double kCrashMarketShare = 0.4;
        constexpr double kCrashMarketVol = 0.01;
        constexpr double kLoadingDrift = 0.2;

        enum Stream : std::uint32_t
        {
            kBlockStream = 1,
            kStockStream = 2,
            kHoldingStream = 3,
            kReturnStream = 4,
            kQuarterStream = 5,
        };

        /**
         * Independent mt19937_64 stream per (seed, tag, a, b). Uniform and normal
         * variates are derived by hand so the output does not depend on the
         * standard library's distribution implementations.
         */
        class Rng
        {
        public:
            Rng(std::uint64_t seed, std::uint32_t tag, std::uint32_t a = 0, std::uint32_t b = 0)
            {
                std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag, a, b};
                engine_.seed(seq);
            }

            /// Uniform in (0, 1).
            double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

            double normal()
            {
                if (spare_)
                {
                    double z = *spare_;
                    spare_.reset();
                    return z;
                }
                const double r = std::sqrt(-2.0 * std::log(uniform()));
                const double theta = 2.0 * std::numbers::pi * uniform();
                spare_ = r * std::sin(theta);
                return r * std::cos(theta);
            }

            double exponential() { return -std::log(uniform()); }

        private:
            std::mt19937_64 engine_;
            std::optional<double> spare_;
        };

        std::string make_id(char prefix, std::size_t i, std::size_t n)
        {
            const int width = n < 1000 ? 3 : static_cast<int>(std::to_string(n - 1).size());
            char buf[32];
            std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
            return buf;
        }
    } // namespace

    void SynthConfig::validate() const
    {
        if (n_funds == 0)
            throw BadConfig("n_funds must be positive");
        if (n_stocks == 0)
            throw BadConfig("n_stocks must be positive (empty universe)");
        if (n_quarters == 0)
            throw BadConfig("n_quarters must be positive");
        if (crowded_block_size >= n_stocks)
            throw BadConfig("crowded_block_size must be smaller than n_stocks");
        if (!(crowd_intensity >= 0.0) || !std::isfinite(crowd_intensity))
            throw BadConfig("crowd_intensity must be finite and nonnegative");
        if (!(noise_scale > 0.0) || !std::isfinite(noise_scale))
            throw BadConfig("noise_scale must be positive");
        if (crash_quarter && *crash_quarter >= n_quarters)
            throw BadConfig("crash_quarter must be below n_quarters");
        if (!(crash_magnitude < 0.0) || crash_magnitude <= -1.0)
            throw BadConfig("crash_magnitude must lie in (-1, 0)");
        if (!start.is_quarter_end())
            throw BadConfig("start must be a calendar quarter end");
        if (lag_months < 0)
            throw BadConfig("lag_months must be nonnegative");
    }

    SynthData generate(const SynthConfig &config)
    {
        config.validate();
        const auto nf = config.n_funds, ns = config.n_stocks, nq = config.n_quarters;

        std::vector<std::string> funds, stocks;
        for (std::size_t f = 0; f < nf; ++f)
            funds.push_back(make_id('F', f, nf));
        for (std::size_t s = 0; s < ns; ++s)
            stocks.push_back(make_id('S', s, ns));

        // Planted block: a seeded random subset, so ids carry no information.
        std::vector<std::size_t> order(ns);
        for (std::size_t i = 0; i < ns; ++i)
            order[i] = i;
        {
            Rng rng(config.seed, kBlockStream);
            for (std::size_t i = ns - 1; i > 0; --i)
            {
                auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
                std::swap(order[i], order[j]);
            }
        }
        std::vector<bool> in_block(ns, false);
        for (std::size_t i = 0; i < config.crowded_block_size; ++i)
            in_block[order[i]] = true;

        // Static stock characteristics.
        std::vector<double> log_cap(ns);
        std::vector<ingest::FactorVector> base_loadings(ns);
        for (std::size_t s = 0; s < ns; ++s)
        {
            Rng rng(config.seed, kStockStream, static_cast<std::uint32_t>(s));
            log_cap[s] = std::log(2e10) + 0.8 * rng.normal();
            for (auto &x : base_loadings[s])
                x = rng.normal();
        }

        SynthData data;
        for (std::size_t s = 0; s < ns; ++s)
            if (in_block[s])
                data.planted_block.push_back(stocks[s]);

        const double p_crowd = config.crowd_intensity / (config.crowd_intensity + config.noise_scale);
        std::vector<std::vector<ingest::FactorVector>> loadings(nq, std::vector<ingest::FactorVector>(ns));

        for (std::size_t q = 0; q < nq; ++q)
        {
            ingest::HoldingsSnapshot snap;
            snap.as_of = config.start.month_end_after(static_cast<int>(3 * q));

            Rng qrng(config.seed, kQuarterStream, static_cast<std::uint32_t>(q));
            std::vector<double> caps(ns);
            double cap_total = 0.0;
            for (std::size_t s = 0; s < ns; ++s)
            {
                caps[s] = std::exp(log_cap[s] + 0.1 * qrng.normal());
                cap_total += caps[s];
                for (std::size_t k = 0; k < ingest::kFactorCount; ++k)
                    loadings[q][s][k] = base_loadings[s][k] + kLoadingDrift * qrng.normal();
                snap.market_caps.emplace(stocks[s], caps[s]);
            }
            std::vector<double> bench(ns);
            for (std::size_t s = 0; s < ns; ++s)
            {
                bench[s] = caps[s] / cap_total;
                snap.benchmark_weights.emplace(stocks[s], bench[s]);
            }

            for (std::size_t f = 0; f < nf; ++f)
            {
                Rng rng(config.seed, kHoldingStream, static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(f));
                std::vector<double> w(ns);
                double total = 0.0;
                for (std::size_t s = 0; s < ns; ++s)
                {
                    const double z = rng.normal();
                    const double u = rng.uniform();
                    const double size = rng.uniform();
                    double active = config.noise_scale * z;
                    if (in_block[s] && u < p_crowd)
                        active += config.crowd_intensity * (0.5 + size);
                    w[s] = std::max(0.0, bench[s] + active);
                    total += w[s];
                }
                for (std::size_t s = 0; s < ns; ++s)
                    if (w[s] > 0.0)
                        snap.holdings.push_back({funds[f], stocks[s], w[s] / total});
            }
            snap.canonicalize();
            data.snapshots.push_back(std::move(snap));
        }

        // Monthly returns from the first month after the first quarter end
        // through 12 months past the last construction date.
        const Date first_month = config.start.month_end_after(1);
        const Date last_month = data.snapshots.back().as_of.month_end_after(config.lag_months + 12);
        if (config.crash_quarter)
            data.crash_month = data.snapshots[*config.crash_quarter].as_of.month_end_after(config.lag_months + 1);

        auto &panel = data.panel;
        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t s = 0; s < ns; ++s)
                panel.factor_loadings[stocks[s]].emplace(data.snapshots[q].as_of, loadings[q][s]);

        std::uint32_t t = 0;
        for (Date month = first_month; month <= last_month; month = month.month_end_after(1), ++t)
        {
            Rng rng(config.seed, kReturnStream, t);
            const bool crash = data.crash_month && month == *data.crash_month;
            double market = kMarketMean + kMarketVol * rng.normal();
            if (crash)
                market = kCrashMarketShare * config.crash_magnitude + kCrashMarketVol * rng.normal();
            ingest::FactorVector style{};
            for (std::size_t k = 1; k < ingest::kFactorCount; ++k)
                style[k] = kStyleVol * rng.normal();

            // Loadings of the most recent quarter end on or before this month.
            std::size_t q = 0;
            while (q + 1 < nq && data.snapshots[q + 1].as_of <= month)
                ++q;

            double ew = 0.0;
            for (std::size_t s = 0; s < ns; ++s)
            {
                const auto &l = loadings[q][s];
                double r = (1.0 + 0.2 * l[0]) * market;
                for (std::size_t k = 1; k < ingest::kFactorCount; ++k)
                    r += l[k] * style[k];
                r += kIdioVol * rng.normal();
                const double shock = rng.exponential();
                if (in_block[s])
                {
                    r += kBlockDrift + kBlockConvexity * market * market;
                    if (crash)
                        r += config.crash_magnitude * shock;
                }
                r = std::max(r, -0.95);
                panel.stock_returns[stocks[s]].emplace(month, r);
                ew += r;
            }
            panel.market_returns.emplace(month, ew / static_cast<double>(ns));
        }
        panel.reindex();
        return data;
    }

    void write_dataset(const SynthData &data, const std::filesystem::path &dir)
    {
        ingest::DataLayout layout{dir};
        ingest::write_snapshots(data.snapshots, layout);
        ingest::write_returns(data.panel, layout);
        csv::Writer planted(dir / "planted.csv");
        planted.header("stock_id");
        for (const auto &id : data.planted_block)
            planted.row({id});
    }

    std::vector<std::string> read_planted(const std::filesystem::path &dir)
    {
        csv::Reader r(dir / "planted.csv", "stock_id");
        std::vector<std::string> out;
        while (r.next())
            out.push_back(r.text(0));
        return out;
    }

} // namespace crowdnet::synth
