#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "crowdnet/backtest.hpp"
#include "crowdnet/portfolio.hpp"
#include "crowdnet/signal.hpp"

namespace crowdnet::report
{

    inline constexpr std::string_view kToolName = "crowdnet";
    inline constexpr std::string_view kVersion = "0.1.0";

    /// Reproducibility header written as '#' comment lines at the top of every output file.
    struct RunMetadata
    {
        std::string version = std::string(kVersion);
        std::string config;      // canonical config text
        std::string config_hash; // sha256 of `config`
        std::vector<std::pair<std::string, std::string>> inputs; // (relative path, sha256)
        std::vector<std::string> notes;

        std::vector<std::string> lines() const;
    };

    void write_scores(const std::filesystem::path &path, const std::vector<signal::CrowdingScores> &scores,
                      const RunMetadata &meta);

    struct CentralityRow
    {
        Date as_of;
        graph::Side side;
        graph::CentralityVector centrality;
    };
    void write_centrality(const std::filesystem::path &path, const std::vector<CentralityRow> &rows,
                          const RunMetadata &meta);

    void write_quintiles(const std::filesystem::path &path, const std::vector<portfolio::QuintileSet> &sets,
                         const RunMetadata &meta);

    void write_hedge(const std::filesystem::path &path, const std::vector<portfolio::Portfolio> &books,
                     const RunMetadata &meta);

    /**
     * Writes metrics.csv, quintile_alpha.csv, factor_tilts.csv, ls_scatter.csv
     * and signal_comparison.csv into `dir`. The scatter uses the primary kind's
     * one-month long/short series and ends with a `# quad_fit` comment line.
     */
    void write_backtest(const std::filesystem::path &dir, const backtest::BacktestResult &result,
                        const backtest::BacktestConfig &config, const RunMetadata &meta);

    struct ScatterData
    {
        std::vector<backtest::PeriodReturn> points;
        backtest::QuadFit fit;
    };

    /// Reads ls_scatter.csv back; the fit is recomputed from the points.
    ScatterData read_scatter(const std::filesystem::path &path);

    /// Standalone 800x600 SVG: scatter of (market, long/short) and the fitted quadratic.
    std::string render_scatter_svg(const ScatterData &data);

} // namespace crowdnet::report
