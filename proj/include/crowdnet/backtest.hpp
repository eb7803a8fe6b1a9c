#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "crowdnet/graph.hpp"
#include "crowdnet/ingest.hpp"
#include "crowdnet/metrics.hpp"
#include "crowdnet/portfolio.hpp"
#include "crowdnet/signal.hpp"

namespace crowdnet::backtest
{

    struct ScheduleEntry
    {
        Date holdings_date;
        Date construction_date;
        std::map<int, bool> horizons; // horizon months -> forward returns available
    };

    struct RebalanceSchedule
    {
        std::vector<ScheduleEntry> entries;
    };

    /**
     * Quarterly schedule with construction `lag_months` after each holdings
     * date (month-end clamped). When `last_return_month` is given, a horizon
     * is flagged unavailable if its window runs past it. Input dates are
     * sorted and deduplicated; each must be a calendar quarter end
     * (NotQuarterEnd otherwise).
     */
    RebalanceSchedule build_schedule(std::vector<Date> holdings_dates, int lag_months = 2,
                                     const std::vector<int> &horizons = {1, 3, 6, 12},
                                     std::optional<Date> last_return_month = std::nullopt);

    /// Month ends covered by a window of `horizon` months starting after `start`'s month.
    std::vector<Date> window_months(const Date &start, int horizon);

    /**
     * Buy-and-hold return over the `horizon` months following `start`:
     * sum of weight * (prod(1 + r) - 1). Throws MissingReturns.
     */
    double portfolio_return(const portfolio::Portfolio &portfolio, const ingest::ReturnsPanel &panel,
                            const Date &start, int horizon);

    /// Compounded market index return over the same window.
    double market_return(const ingest::ReturnsPanel &panel, const Date &start, int horizon);

    /// Sleeve return minus benchmark return per period, each window starting at the sleeve's construction date.
    std::vector<double> alpha_series(std::span<const portfolio::Portfolio> sleeves,
                                     std::span<const portfolio::Portfolio> benchmarks,
                                     const ingest::ReturnsPanel &panel, int horizon);

    struct PeriodReturn
    {
        Date construction_date;
        double portfolio_return = 0.0;
        double market_return = 0.0;
    };

    /// NaN marks a metric the series is too short or degenerate to define.
    struct Metrics
    {
        double mean = 0.0;
        double skewness = 0.0;
        double market_correlation = 0.0;
        double quadratic_beta = 0.0;
        QuadFit quad_fit;
    };

    Metrics compute_metrics(std::span<const PeriodReturn> periods);

    struct BacktestReport
    {
        graph::CentralityKind kind = graph::CentralityKind::Eigenvector;
        std::string portfolio_label;
        int horizon = 1;
        std::vector<PeriodReturn> period_returns;
        Metrics metrics;
    };

    struct BacktestConfig
    {
        graph::CentralityKind kind = graph::CentralityKind::Eigenvector; // drives quintile, tilt and scatter outputs
        portfolio::LongShortOptions longshort;
        std::vector<int> horizons{1, 3, 6, 12};
        int lag_months = 2;
        graph::EigenOptions eigen;
        ingest::UniverseSource universe = ingest::UniverseSource::Benchmark;
        unsigned threads = 1; // 0 = hardware concurrency
    };

    struct QuarterFailure
    {
        Date holdings_date;
        std::string stage; // e.g. "score:eigenvector", "longshort:degree"
        std::string error;
    };

    /// Universe rule for one entry: returns must cover the longest available horizon.
    ingest::UniverseOptions universe_options(const ScheduleEntry &entry, const BacktestConfig &config);

    using ScoresByKind = std::map<graph::CentralityKind, std::vector<signal::CrowdingScores>>;

    /// Scores every schedule entry for each kind over its validated universe.
    ScoresByKind score_quarters(std::span<const ingest::HoldingsSnapshot> snapshots, const ingest::ReturnsPanel &panel,
                                const RebalanceSchedule &schedule, std::span<const graph::CentralityKind> kinds,
                                const BacktestConfig &config, std::vector<QuarterFailure> *failures = nullptr);

    struct QuintileAlpha
    {
        int quintile = 1;
        int horizon = 1;
        double mean_alpha = 0.0;
        double skewness = 0.0;
        std::size_t n_periods = 0;
    };

    struct FactorTilt
    {
        Date as_of;
        int quintile = 1;
        ingest::FactorVector tilt{};
    };

    /// Long/short one-month metrics for one centrality kind.
    struct ComparisonRow
    {
        graph::CentralityKind kind;
        Metrics metrics;
        std::size_t n_periods = 0;
    };

    struct BacktestResult
    {
        std::map<std::tuple<graph::CentralityKind, std::string, int>, BacktestReport> reports;
        std::vector<QuintileAlpha> quintile_alpha; // primary kind
        std::vector<FactorTilt> factor_tilts;      // primary kind
        std::vector<ComparisonRow> comparison;     // one row per scored kind
        std::vector<QuarterFailure> failures;
        std::map<graph::CentralityKind, std::vector<portfolio::QuintileSet>> quintiles;
        std::map<graph::CentralityKind, std::vector<portfolio::Portfolio>> longshorts;

        const BacktestReport *find(graph::CentralityKind kind, const std::string &label, int horizon) const;
    };

    /**
     * Quarterly protocol: for each kind and schedule entry, build the five
     * quintile sleeves, the equal-weight benchmark and the long/short book,
     * then record buy-and-hold returns at every available horizon and reduce
     * them to metric quadruples. Quarter-level failures are collected, not
     * thrown.
     */
    BacktestResult run_backtest(const ScoresByKind &scores, const ingest::ReturnsPanel &panel,
                                const RebalanceSchedule &schedule, const BacktestConfig &config);

    /// Runs `fn(i)` for i in [0, n) on up to `threads` workers (0 = auto).
    void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn);

} // namespace crowdnet::backtest
