#include "crowdnet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crowdnet/csv.hpp"
#include "crowdnet/errors.hpp"

namespace crowdnet::ingest
{
    namespace fs = std::filesystem;

    namespace
    {
        constexpr std::string_view kHoldingsHeader = "as_of_date,fund_id,stock_id,weight";
        constexpr std::string_view kBenchmarkHeader = "as_of_date,stock_id,weight";
        constexpr std::string_view kCapsHeader = "as_of_date,stock_id,market_cap_usd";
        constexpr std::string_view kReturnsHeader = "date,stock_id,return";
        constexpr std::string_view kMarketHeader = "date,return";
        constexpr std::string_view kFactorsHeader = "as_of_date,stock_id,beta,growth,momentum,volatility,size";

        std::string where(const csv::Reader &r) { return r.file() + ":" + std::to_string(r.line()); }

        double parse_return(const csv::Reader &r, std::size_t column)
        {
            double v = r.number(column);
            if (!(v > -1.0))
                r.fail("return " + csv::format_double(v) + " is not greater than -1");
            return v;
        }

        Date parse_month_end(const csv::Reader &r, std::size_t column)
        {
            Date d = r.date(column);
            if (!d.is_month_end())
                r.fail(d.iso() + " is not a month end");
            return d;
        }
    } // namespace

    double HoldingsSnapshot::benchmark_weight(const std::string &stock_id) const
    {
        auto it = benchmark_weights.find(stock_id);
        return it == benchmark_weights.end() ? 0.0 : it->second;
    }

    std::vector<std::string> HoldingsSnapshot::stock_ids() const
    {
        std::set<std::string> ids;
        for (const auto &h : holdings)
            ids.insert(h.stock_id);
        for (const auto &[id, w] : benchmark_weights)
            ids.insert(id);
        return {ids.begin(), ids.end()};
    }

    void HoldingsSnapshot::canonicalize() { std::sort(holdings.begin(), holdings.end()); }

    void HoldingsSnapshot::validate() const
    {
        std::map<std::string, double> fund_sums;
        const Holding *prev = nullptr;
        for (const auto &h : holdings)
        {
            if (prev && prev->fund_id == h.fund_id && prev->stock_id == h.stock_id)
                throw DuplicateKey(h.fund_id + "/" + h.stock_id, as_of.iso());
            prev = &h;
            if (!(h.weight >= 0.0 && h.weight <= 1.0))
                throw BadWeight(h.fund_id, h.stock_id, h.weight);
            if (!market_caps.contains(h.stock_id))
                throw MissingMarketCap(h.stock_id);
            fund_sums[h.fund_id] += h.weight;
        }
        for (const auto &[fund, sum] : fund_sums)
            if (sum > 1.0 + kFundWeightSlack)
                throw BadWeight(fund, "*", sum, "fund weights sum above 1");

        double bench_sum = 0.0;
        for (const auto &[id, w] : benchmark_weights)
        {
            if (!(w >= 0.0 && w <= 1.0))
                throw BadWeight("benchmark", id, w);
            if (!market_caps.contains(id))
                throw MissingMarketCap(id);
            bench_sum += w;
        }
        if (!benchmark_weights.empty() && std::abs(bench_sum - 1.0) > kBenchmarkSumTolerance)
            throw InvalidSnapshot("benchmark weights at " + as_of.iso() + " sum to " + csv::format_double(bench_sum));

        for (const auto &[id, cap] : market_caps)
            if (!(cap > 1.0))
                throw InvalidSnapshot("market cap of '" + id + "' must exceed 1 dollar, got " + csv::format_double(cap));
    }

    std::optional<double> ReturnsPanel::stock_return(const std::string &stock_id, const Date &month_end) const
    {
        auto it = stock_returns.find(stock_id);
        if (it == stock_returns.end())
            return std::nullopt;
        auto jt = it->second.find(month_end);
        if (jt == it->second.end())
            return std::nullopt;
        return jt->second;
    }

    std::optional<double> ReturnsPanel::market_return(const Date &month_end) const
    {
        auto it = market_returns.find(month_end);
        if (it == market_returns.end())
            return std::nullopt;
        return it->second;
    }

    const FactorVector *ReturnsPanel::factors(const std::string &stock_id, const Date &as_of) const
    {
        auto it = factor_loadings.find(stock_id);
        if (it == factor_loadings.end())
            return nullptr;
        auto jt = it->second.find(as_of);
        return jt == it->second.end() ? nullptr : &jt->second;
    }

    void ReturnsPanel::reindex()
    {
        std::set<Date> all;
        for (const auto &[id, series] : stock_returns)
            for (const auto &[d, r] : series)
                all.insert(d);
        for (const auto &[d, r] : market_returns)
            all.insert(d);
        dates.assign(all.begin(), all.end());
    }

    HoldingsSnapshot load_snapshot(const fs::path &holdings_path, const fs::path &benchmark_path,
                                   const fs::path &caps_path, const Date &as_of)
    {
        HoldingsSnapshot snap;
        snap.as_of = as_of;

        // an absent caps file surfaces as the first stock lacking a cap
        const bool caps_missing = !fs::exists(caps_path);
        auto no_cap = [&](const std::string &id, const csv::Reader &r) {
            return MissingMarketCap(id, caps_missing ? "caps file not found: " + caps_path.string() : where(r));
        };
        if (!caps_missing)
        {
            csv::Reader r(caps_path, kCapsHeader);
            while (r.next())
            {
                if (r.date(0) != as_of)
                    continue;
                double cap = r.number(2);
                if (!(cap > 1.0))
                    r.fail("market cap must exceed 1 dollar (ln(cap) > 0), got " + csv::format_double(cap));
                if (!snap.market_caps.emplace(r.text(1), cap).second)
                    throw DuplicateKey(r.text(1), as_of.iso(), where(r));
            }
        }
        {
            csv::Reader r(benchmark_path, kBenchmarkHeader);
            while (r.next())
            {
                if (r.date(0) != as_of)
                    continue;
                auto id = r.text(1);
                double w = r.number(2);
                if (!(w >= 0.0 && w <= 1.0))
                    throw BadWeight("benchmark", id, w, where(r));
                if (!snap.market_caps.contains(id))
                    throw no_cap(id, r);
                if (!snap.benchmark_weights.emplace(id, w).second)
                    throw DuplicateKey(id, as_of.iso(), where(r));
            }
        }
        {
            csv::Reader r(holdings_path, kHoldingsHeader);
            std::set<std::pair<std::string, std::string>> seen;
            while (r.next())
            {
                if (r.date(0) != as_of)
                    continue;
                Holding h{r.text(1), r.text(2), r.number(3)};
                if (!(h.weight >= 0.0 && h.weight <= 1.0))
                    throw BadWeight(h.fund_id, h.stock_id, h.weight, where(r));
                if (!snap.market_caps.contains(h.stock_id))
                    throw no_cap(h.stock_id, r);
                if (!seen.emplace(h.fund_id, h.stock_id).second)
                    throw DuplicateKey(h.fund_id + "/" + h.stock_id, as_of.iso(), where(r));
                snap.holdings.push_back(std::move(h));
            }
        }
        snap.canonicalize();
        snap.validate();
        return snap;
    }

    ReturnsPanel load_returns(const fs::path &returns_path, const fs::path &market_path, const fs::path &factors_path)
    {
        ReturnsPanel panel;
        {
            csv::Reader r(returns_path, kReturnsHeader);
            while (r.next())
            {
                Date d = parse_month_end(r, 0);
                auto id = r.text(1);
                double v = parse_return(r, 2);
                if (!panel.stock_returns[id].emplace(d, v).second)
                    throw DuplicateKey(id, d.iso(), where(r));
            }
        }
        {
            csv::Reader r(market_path, kMarketHeader);
            while (r.next())
            {
                Date d = parse_month_end(r, 0);
                if (!panel.market_returns.emplace(d, parse_return(r, 1)).second)
                    throw DuplicateKey("market", d.iso(), where(r));
            }
        }
        {
            csv::Reader r(factors_path, kFactorsHeader);
            while (r.next())
            {
                Date d = r.date(0);
                auto id = r.text(1);
                FactorVector f{};
                for (std::size_t k = 0; k < kFactorCount; ++k)
                    f[k] = r.number(2 + k);
                if (!panel.factor_loadings[id].emplace(d, f).second)
                    throw DuplicateKey(id, d.iso(), where(r));
            }
        }
        panel.reindex();
        return panel;
    }

    fs::path DataLayout::holdings_file(const Date &as_of) const
    {
        return holdings_dir() / ("holdings_" + as_of.iso() + ".csv");
    }

    std::vector<Date> DataLayout::holdings_dates() const
    {
        if (!fs::is_directory(holdings_dir()))
            throw IoError("missing holdings directory " + holdings_dir().string());
        std::vector<Date> out;
        for (const auto &entry : fs::directory_iterator(holdings_dir()))
        {
            auto name = entry.path().filename().string();
            constexpr std::string_view prefix = "holdings_";
            if (name.size() != prefix.size() + 14 || !name.starts_with(prefix) || !name.ends_with(".csv"))
                continue;
            if (auto d = Date::parse(std::string_view(name).substr(prefix.size(), 10)))
                out.push_back(*d);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<HoldingsSnapshot> load_snapshots(const DataLayout &layout)
    {
        std::vector<HoldingsSnapshot> out;
        for (const auto &d : layout.holdings_dates())
            out.push_back(load_snapshot(layout.holdings_file(d), layout.benchmark(), layout.caps(), d));
        return out;
    }

    void write_snapshots(std::span<const HoldingsSnapshot> snapshots, const DataLayout &layout)
    {
        csv::Writer bench(layout.benchmark());
        csv::Writer caps(layout.caps());
        bench.header(kBenchmarkHeader);
        caps.header(kCapsHeader);
        for (const auto &snap : snapshots)
        {
            const auto date = snap.as_of.iso();
            csv::Writer h(layout.holdings_file(snap.as_of));
            h.header(kHoldingsHeader);
            for (const auto &row : snap.holdings)
                h.row({date, row.fund_id, row.stock_id, csv::format_double(row.weight)});
            for (const auto &[id, w] : snap.benchmark_weights)
                bench.row({date, id, csv::format_double(w)});
            for (const auto &[id, cap] : snap.market_caps)
                caps.row({date, id, csv::format_double(cap)});
        }
    }

    void write_returns(const ReturnsPanel &panel, const DataLayout &layout)
    {
        std::vector<std::string> ids;
        for (const auto &[id, s] : panel.stock_returns)
            ids.push_back(id);
        std::sort(ids.begin(), ids.end());

        csv::Writer ret(layout.returns());
        ret.header(kReturnsHeader);
        for (const auto &id : ids)
        {
            std::map<Date, double> sorted(panel.stock_returns.at(id).begin(), panel.stock_returns.at(id).end());
            for (const auto &[d, r] : sorted)
                ret.row({d.iso(), id, csv::format_double(r)});
        }

        csv::Writer mkt(layout.market());
        mkt.header(kMarketHeader);
        for (const auto &[d, r] : panel.market_returns)
            mkt.row({d.iso(), csv::format_double(r)});

        std::vector<std::string> fids;
        for (const auto &[id, s] : panel.factor_loadings)
            fids.push_back(id);
        std::sort(fids.begin(), fids.end());
        csv::Writer fac(layout.factors());
        fac.header(kFactorsHeader);
        for (const auto &id : fids)
            for (const auto &[d, f] : panel.factor_loadings.at(id))
            {
                std::vector<std::string> row{d.iso(), id};
                for (double x : f)
                    row.push_back(csv::format_double(x));
                fac.row(row);
            }
    }

    std::string_view to_string(ExclusionReason reason)
    {
        switch (reason)
        {
        case ExclusionReason::MissingMarketCap:
            return "MissingMarketCap";
        case ExclusionReason::MissingFactors:
            return "MissingFactors";
        case ExclusionReason::MissingReturns:
            return "MissingReturns";
        }
        return "Unknown";
    }

    UniverseReport validate_universe(const HoldingsSnapshot &snapshot, const ReturnsPanel &panel,
                                     const UniverseOptions &options)
    {
        std::set<std::string> candidates;
        if (options.source != UniverseSource::Holdings)
            for (const auto &[id, w] : snapshot.benchmark_weights)
                candidates.insert(id);
        if (options.source != UniverseSource::Benchmark)
            for (const auto &h : snapshot.holdings)
                candidates.insert(h.stock_id);

        const Date construction = snapshot.as_of.month_end_after(options.lag_months);
        UniverseReport report;
        for (const auto &id : candidates)
        {
            if (!snapshot.market_caps.contains(id))
            {
                report.excluded.push_back({id, ExclusionReason::MissingMarketCap});
                continue;
            }
            if (!panel.factors(id, snapshot.as_of))
            {
                report.excluded.push_back({id, ExclusionReason::MissingFactors});
                continue;
            }
            bool covered = true;
            for (int m = 1; m <= options.required_months && covered; ++m)
                covered = panel.stock_return(id, construction.month_end_after(m)).has_value();
            if (!covered)
            {
                report.excluded.push_back({id, ExclusionReason::MissingReturns});
                continue;
            }
            report.usable.push_back(id);
        }
        return report;
    }

} // namespace crowdnet::ingest
