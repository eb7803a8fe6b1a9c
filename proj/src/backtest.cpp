#include "crowdnet/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "crowdnet/errors.hpp"

namespace crowdnet::backtest
{
    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        template <class F>
        double or_nan(F &&f)
        {
            try
            {
                return f();
            }
            catch (const Error &)
            {
                return kNaN;
            }
        }
    } // namespace

    void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn)
    {
        if (threads == 0)
            threads = std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
        if (threads <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(n);
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        errors[i] = std::current_exception();
                    }
                }
            });
        pool.clear();
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    RebalanceSchedule build_schedule(std::vector<Date> holdings_dates, int lag_months, const std::vector<int> &horizons,
                                     std::optional<Date> last_return_month)
    {
        std::sort(holdings_dates.begin(), holdings_dates.end());
        holdings_dates.erase(std::unique(holdings_dates.begin(), holdings_dates.end()), holdings_dates.end());
        RebalanceSchedule schedule;
        for (const auto &d : holdings_dates)
        {
            if (!d.is_quarter_end())
                throw NotQuarterEnd(d.iso());
            ScheduleEntry e;
            e.holdings_date = d;
            e.construction_date = d.month_end_after(lag_months);
            for (int h : horizons)
                e.horizons[h] = !last_return_month || e.construction_date.month_end_after(h) <= *last_return_month;
            schedule.entries.push_back(std::move(e));
        }
        return schedule;
    }

    std::vector<Date> window_months(const Date &start, int horizon)
    {
        std::vector<Date> out;
        for (int m = 1; m <= horizon; ++m)
            out.push_back(start.month_end_after(m));
        return out;
    }

    double portfolio_return(const portfolio::Portfolio &portfolio, const ingest::ReturnsPanel &panel,
                            const Date &start, int horizon)
    {
        const auto months = window_months(start, horizon);
        double total = 0.0;
        for (const auto &[id, w] : portfolio.weights)
        {
            double growth = 1.0;
            for (const auto &m : months)
            {
                auto r = panel.stock_return(id, m);
                if (!r)
                    throw MissingReturns(id, m.iso());
                growth *= 1.0 + *r;
            }
            total += w * (growth - 1.0);
        }
        return total;
    }

    double market_return(const ingest::ReturnsPanel &panel, const Date &start, int horizon)
    {
        double growth = 1.0;
        for (const auto &m : window_months(start, horizon))
        {
            auto r = panel.market_return(m);
            if (!r)
                throw MissingReturns("market", m.iso());
            growth *= 1.0 + *r;
        }
        return growth - 1.0;
    }

    std::vector<double> alpha_series(std::span<const portfolio::Portfolio> sleeves,
                                     std::span<const portfolio::Portfolio> benchmarks,
                                     const ingest::ReturnsPanel &panel, int horizon)
    {
        if (sleeves.size() != benchmarks.size())
            throw std::invalid_argument("alpha_series: sleeve and benchmark counts differ");
        std::vector<double> out;
        out.reserve(sleeves.size());
        for (std::size_t i = 0; i < sleeves.size(); ++i)
        {
            const auto &start = sleeves[i].construction_date;
            out.push_back(portfolio_return(sleeves[i], panel, start, horizon) -
                          portfolio_return(benchmarks[i], panel, start, horizon));
        }
        return out;
    }

    Metrics compute_metrics(std::span<const PeriodReturn> periods)
    {
        std::vector<double> port, mkt;
        for (const auto &p : periods)
        {
            port.push_back(p.portfolio_return);
            mkt.push_back(p.market_return);
        }
        Metrics m;
        m.mean = port.empty() ? kNaN : mean(port);
        m.skewness = or_nan([&] { return sample_skewness(port); });
        m.market_correlation = or_nan([&] { return market_correlation(port, mkt); });
        try
        {
            m.quad_fit = quadratic_beta(port, mkt);
        }
        catch (const Error &)
        {
            m.quad_fit = {kNaN, kNaN, kNaN};
        }
        m.quadratic_beta = m.quad_fit.c;
        return m;
    }

    const BacktestReport *BacktestResult::find(graph::CentralityKind kind, const std::string &label, int horizon) const
    {
        auto it = reports.find({kind, label, horizon});
        return it == reports.end() ? nullptr : &it->second;
    }

    ingest::UniverseOptions universe_options(const ScheduleEntry &entry, const BacktestConfig &config)
    {
        int required = 0;
        for (const auto &[h, ok] : entry.horizons)
            if (ok)
                required = std::max(required, h);
        return {config.universe, config.lag_months, required};
    }

    ScoresByKind score_quarters(std::span<const ingest::HoldingsSnapshot> snapshots, const ingest::ReturnsPanel &panel,
                                const RebalanceSchedule &schedule, std::span<const graph::CentralityKind> kinds,
                                const BacktestConfig &config, std::vector<QuarterFailure> *failures)
    {
        struct Task
        {
            const ScheduleEntry *entry;
            const ingest::HoldingsSnapshot *snapshot;
            graph::CentralityKind kind;
            std::optional<signal::CrowdingScores> scores;
            std::optional<QuarterFailure> failure;
        };
        std::vector<Task> tasks;
        for (auto kind : kinds)
            for (const auto &entry : schedule.entries)
            {
                auto snap = std::find_if(snapshots.begin(), snapshots.end(),
                                         [&](const auto &s) { return s.as_of == entry.holdings_date; });
                tasks.push_back({&entry, snap == snapshots.end() ? nullptr : &*snap, kind, {}, {}});
            }

        parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
            auto &t = tasks[i];
            const std::string stage = "score:" + std::string(graph::to_string(t.kind));
            if (!t.snapshot)
            {
                t.failure = QuarterFailure{t.entry->holdings_date, stage, "no holdings snapshot"};
                return;
            }
            try
            {
                auto universe =
                    ingest::validate_universe(*t.snapshot, panel, universe_options(*t.entry, config)).usable;
                t.scores = signal::score_pipeline(*t.snapshot, t.kind, std::move(universe), config.eigen);
            }
            catch (const Error &e)
            {
                t.failure = QuarterFailure{t.entry->holdings_date, stage, e.what()};
            }
        });

        ScoresByKind out;
        for (auto kind : kinds)
            out[kind];
        for (auto &t : tasks)
        {
            if (t.scores)
                out[t.kind].push_back(std::move(*t.scores));
            if (t.failure && failures)
                failures->push_back(std::move(*t.failure));
        }
        return out;
    }

    namespace
    {
        const std::vector<std::string> &sleeve_labels()
        {
            static const std::vector<std::string> labels{"Q1", "Q2", "Q3", "Q4", "Q5", "benchmark", "longshort"};
            return labels;
        }

        struct QuarterOutcome
        {
            graph::CentralityKind kind;
            Date holdings_date;
            Date construction_date;
            std::optional<portfolio::QuintileSet> quintiles;
            std::optional<portfolio::Portfolio> longshort;
            std::optional<std::array<ingest::FactorVector, 5>> tilts;
            // horizon -> (label -> return), plus the market return under key "market"
            std::map<int, std::map<std::string, double>> returns;
            std::vector<QuarterFailure> failures;
        };

        QuarterOutcome run_quarter(const signal::CrowdingScores &scores, const ScheduleEntry &entry,
                                   const ingest::ReturnsPanel &panel, const BacktestConfig &config)
        {
            QuarterOutcome out{scores.kind, entry.holdings_date, entry.construction_date, {}, {}, {}, {}, {}};
            const std::string kind = std::string(graph::to_string(scores.kind));
            auto fail = [&](const std::string &stage, const Error &e) {
                out.failures.push_back({entry.holdings_date, stage + ":" + kind, e.what()});
            };

            try
            {
                out.quintiles = portfolio::quintile_portfolios(scores, entry.construction_date);
                std::array<ingest::FactorVector, 5> tilts{};
                for (std::size_t q = 0; q < 5; ++q)
                    tilts[q] = portfolio::relative_factor_tilt(out.quintiles->quintiles[q], out.quintiles->benchmark,
                                                               panel, entry.holdings_date);
                out.tilts = tilts;
            }
            catch (const Error &e)
            {
                fail("quintiles", e);
            }
            try
            {
                auto opts = config.longshort;
                opts.lag_months = config.lag_months;
                out.longshort = portfolio::build_longshort(scores, panel, entry.holdings_date, opts);
            }
            catch (const Error &e)
            {
                fail("longshort", e);
            }

            for (const auto &[h, available] : entry.horizons)
            {
                if (!available)
                    continue;
                try
                {
                    std::map<std::string, double> r;
                    r["market"] = market_return(panel, entry.construction_date, h);
                    if (out.quintiles)
                    {
                        for (const auto &q : out.quintiles->quintiles)
                            r[q.label] = portfolio_return(q, panel, entry.construction_date, h);
                        r["benchmark"] = portfolio_return(out.quintiles->benchmark, panel, entry.construction_date, h);
                    }
                    if (out.longshort)
                        r["longshort"] = portfolio_return(*out.longshort, panel, entry.construction_date, h);
                    out.returns[h] = std::move(r);
                }
                catch (const Error &e)
                {
                    fail("returns:" + std::to_string(h) + "m", e);
                }
            }
            return out;
        }
    } // namespace

    BacktestResult run_backtest(const ScoresByKind &scores, const ingest::ReturnsPanel &panel,
                                const RebalanceSchedule &schedule, const BacktestConfig &config)
    {
        struct Task
        {
            const signal::CrowdingScores *scores;
            const ScheduleEntry *entry;
            std::optional<QuarterOutcome> outcome;
        };
        std::vector<Task> tasks;
        BacktestResult result;
        for (const auto &[kind, quarters] : scores)
        {
            std::vector<const signal::CrowdingScores *> ordered;
            for (const auto &s : quarters)
                ordered.push_back(&s);
            std::sort(ordered.begin(), ordered.end(), [](auto *a, auto *b) { return a->as_of < b->as_of; });
            for (const auto *s : ordered)
            {
                auto entry = std::find_if(schedule.entries.begin(), schedule.entries.end(),
                                          [&](const auto &e) { return e.holdings_date == s->as_of; });
                if (entry == schedule.entries.end())
                {
                    result.failures.push_back(
                        {s->as_of, "schedule:" + std::string(graph::to_string(kind)), "no schedule entry"});
                    continue;
                }
                tasks.push_back({s, &*entry, {}});
            }
        }

        parallel_for(tasks.size(), config.threads,
                     [&](std::size_t i) { tasks[i].outcome = run_quarter(*tasks[i].scores, *tasks[i].entry, panel, config); });

        std::vector<int> horizons = config.horizons;
        std::sort(horizons.begin(), horizons.end());

        for (auto &t : tasks)
        {
            auto &o = *t.outcome;
            result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
            if (o.quintiles)
                result.quintiles[o.kind].push_back(*o.quintiles);
            if (o.longshort)
                result.longshorts[o.kind].push_back(*o.longshort);
            if (o.kind == config.kind && o.tilts)
                for (std::size_t q = 0; q < 5; ++q)
                    result.factor_tilts.push_back({o.holdings_date, static_cast<int>(q + 1), (*o.tilts)[q]});
            for (const auto &[h, rets] : o.returns)
            {
                const double mkt = rets.at("market");
                for (const auto &label : sleeve_labels())
                {
                    auto it = rets.find(label);
                    if (it == rets.end())
                        continue;
                    auto &report = result.reports[{o.kind, label, h}];
                    report.kind = o.kind;
                    report.portfolio_label = label;
                    report.horizon = h;
                    report.period_returns.push_back({o.construction_date, it->second, mkt});
                }
            }
        }
        for (auto &[key, report] : result.reports)
            report.metrics = compute_metrics(report.period_returns);

        // Alpha of each quintile against the equal-weight benchmark, primary kind only.
        for (int h : horizons)
        {
            const auto *bench = result.find(config.kind, "benchmark", h);
            for (int q = 1; q <= 5; ++q)
            {
                const auto *sleeve = result.find(config.kind, "Q" + std::to_string(q), h);
                QuintileAlpha row{q, h, kNaN, kNaN, 0};
                if (sleeve && bench && sleeve->period_returns.size() == bench->period_returns.size())
                {
                    std::vector<double> alpha;
                    for (std::size_t i = 0; i < sleeve->period_returns.size(); ++i)
                        alpha.push_back(sleeve->period_returns[i].portfolio_return -
                                        bench->period_returns[i].portfolio_return);
                    row.n_periods = alpha.size();
                    if (!alpha.empty())
                        row.mean_alpha = mean(alpha);
                    row.skewness = or_nan([&] { return sample_skewness(alpha); });
                }
                result.quintile_alpha.push_back(row);
            }
        }

        if (!horizons.empty())
            for (const auto &[kind, quarters] : scores)
            {
                ComparisonRow row{kind, {kNaN, kNaN, kNaN, kNaN, {kNaN, kNaN, kNaN}}, 0};
                if (const auto *r = result.find(kind, "longshort", horizons.front()))
                {
                    row.metrics = r->metrics;
                    row.n_periods = r->period_returns.size();
                }
                result.comparison.push_back(row);
            }
        return result;
    }

} // namespace crowdnet::backtest
