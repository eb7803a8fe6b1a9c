#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crowdnet/backtest.hpp"

namespace crowdnet::cli
{

    struct RunConfig
    {
        std::filesystem::path data_dir;
        std::filesystem::path out_dir;
        graph::CentralityKind centrality_kind = graph::CentralityKind::Eigenvector;
        std::size_t n_per_side = 100;
        double factor_bound = 0.02;
        int lag_months = 2;
        std::vector<int> horizons{1, 3, 6, 12};
        double eigen_tol = 1e-10;
        int eigen_max_iter = 1000;
        ingest::UniverseSource universe = ingest::UniverseSource::Benchmark;
        std::optional<std::uint64_t> seed;

        backtest::BacktestConfig backtest_config(unsigned threads) const;
    };

    /**
     * Canonical `key=value;...` text of the parameters that affect results
     * (paths excluded), e.g.
     * `kind=eigenvector;n_per_side=100;factor_bound=0.02;lag_months=2;horizons=1,3,6,12;`
     * `eigen_tol=1e-10;eigen_max_iter=1000;universe=benchmark`.
     * Numbers use shortest round-trip formatting; `;seed=N` is appended when set.
     */
    std::string canonical_config(const RunConfig &config);

    /// Worker count from CROWDNET_THREADS (unset or 0 = hardware concurrency).
    unsigned threads_from_env();

    /// Exit status: 0 success, 1 data or validation error, 2 usage error.
    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace crowdnet::cli
