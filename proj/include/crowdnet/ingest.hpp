#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crowdnet/date.hpp"

namespace crowdnet::ingest
{

    inline constexpr double kFundWeightSlack = 1e-6;
    inline constexpr double kBenchmarkSumTolerance = 1e-6;

    struct Holding
    {
        std::string fund_id;
        std::string stock_id;
        double weight = 0.0; // fraction of fund NAV

        auto operator<=>(const Holding &) const = default;
    };

    /**
     * One quarter of fund holdings with the benchmark weights and market caps
     * needed to compute active weights.
     *
     * Holdings are kept sorted by (fund_id, stock_id) so two snapshots built
     * from permuted rows compare equal.
     */
    struct HoldingsSnapshot
    {
        Date as_of;
        std::vector<Holding> holdings;
        std::map<std::string, double> benchmark_weights;
        std::map<std::string, double> market_caps;

        /// Benchmark weight, zero for off-benchmark names.
        double benchmark_weight(const std::string &stock_id) const;

        /// Every stock appearing in holdings or the benchmark, sorted.
        std::vector<std::string> stock_ids() const;

        /// Checks every invariant (holdings must be canonical); throws the typed error on failure.
        void validate() const;
        /// Sorts holdings into (fund_id, stock_id) order.
        void canonicalize();

        bool operator==(const HoldingsSnapshot &) const = default;
    };

    enum class Factor
    {
        Beta,
        Growth,
        Momentum,
        Volatility,
        Size
    };
    inline constexpr std::size_t kFactorCount = 5;
    inline constexpr std::array<std::string_view, kFactorCount> kFactorNames{"beta", "growth", "momentum",
                                                                             "volatility", "size"};
    using FactorVector = std::array<double, kFactorCount>;

    /// Monthly simple returns, market index returns and dated factor loadings.
    struct ReturnsPanel
    {
        std::vector<Date> dates; // sorted, unique month ends seen in returns or market files
        std::unordered_map<std::string, std::unordered_map<Date, double>> stock_returns;
        std::map<Date, double> market_returns;
        std::unordered_map<std::string, std::map<Date, FactorVector>> factor_loadings;

        std::optional<double> stock_return(const std::string &stock_id, const Date &month_end) const;
        std::optional<double> market_return(const Date &month_end) const;
        const FactorVector *factors(const std::string &stock_id, const Date &as_of) const;

        /// Rebuilds `dates` from the stored series.
        void reindex();

        bool operator==(const ReturnsPanel &) const = default;
    };

    HoldingsSnapshot load_snapshot(const std::filesystem::path &holdings_path,
                                   const std::filesystem::path &benchmark_path,
                                   const std::filesystem::path &caps_path, const Date &as_of);

    ReturnsPanel load_returns(const std::filesystem::path &returns_path, const std::filesystem::path &market_path,
                              const std::filesystem::path &factors_path);

    /// Standard data directory layout.
    struct DataLayout
    {
        std::filesystem::path root;

        std::filesystem::path holdings_dir() const { return root / "holdings"; }
        std::filesystem::path holdings_file(const Date &as_of) const;
        std::filesystem::path benchmark() const { return root / "benchmark.csv"; }
        std::filesystem::path caps() const { return root / "caps.csv"; }
        std::filesystem::path returns() const { return root / "returns.csv"; }
        std::filesystem::path market() const { return root / "market.csv"; }
        std::filesystem::path factors() const { return root / "factors.csv"; }

        /// Quarter dates taken from holdings/holdings_YYYY-MM-DD.csv file names, sorted.
        std::vector<Date> holdings_dates() const;
    };

    std::vector<HoldingsSnapshot> load_snapshots(const DataLayout &layout);

    void write_snapshots(std::span<const HoldingsSnapshot> snapshots, const DataLayout &layout);
    void write_returns(const ReturnsPanel &panel, const DataLayout &layout);

    enum class ExclusionReason
    {
        MissingMarketCap,
        MissingFactors,
        MissingReturns
    };
    std::string_view to_string(ExclusionReason reason);

    struct Exclusion
    {
        std::string stock_id;
        ExclusionReason reason;
        bool operator==(const Exclusion &) const = default;
    };

    struct UniverseReport
    {
        std::vector<std::string> usable; // sorted
        std::vector<Exclusion> excluded; // sorted by stock_id
    };

    /// Which stocks of a snapshot are candidates for the scored universe.
    enum class UniverseSource
    {
        Benchmark, // benchmark constituents
        Holdings,  // anything held by at least one fund
        All        // union of both
    };

    struct UniverseOptions
    {
        UniverseSource source = UniverseSource::Benchmark;
        int lag_months = 2;
        int required_months = 12; // forward months of returns after construction
    };

    UniverseReport validate_universe(const HoldingsSnapshot &snapshot, const ReturnsPanel &panel,
                                     const UniverseOptions &options = {});

} // namespace crowdnet::ingest
