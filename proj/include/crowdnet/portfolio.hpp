#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crowdnet/ingest.hpp"
#include "crowdnet/signal.hpp"

namespace crowdnet::portfolio
{

    inline constexpr double kBudgetTolerance = 1e-9;

    struct Portfolio
    {
        Date construction_date;
        std::map<std::string, double> weights;
        std::string label;

        double long_sum() const;
        double short_sum() const;
        double gross() const;
        std::size_t long_count() const;
        std::size_t short_count() const;
    };

    using FactorExposure = ingest::FactorVector;

    /// Universe ids ordered by ascending score, ties by stock_id.
    std::vector<std::string> ranked(const signal::CrowdingScores &scores);

    struct QuintileSet
    {
        std::array<Portfolio, 5> quintiles; // Q1 least crowded ... Q5 most crowded
        Portfolio benchmark;                // equal weight over the universe
    };

    /**
     * Equal-weighted quintile sleeves. Sizes differ by at most one name; the
     * first `n % 5` quintiles take the extra names. Throws UniverseTooSmall
     * below five stocks.
     */
    QuintileSet quintile_portfolios(const signal::CrowdingScores &scores, const Date &construction_date);

    /// Sum of weight * loading per factor. Throws MissingFactors.
    FactorExposure portfolio_factor_exposure(const Portfolio &portfolio, const ingest::ReturnsPanel &panel,
                                             const Date &as_of);

    /// Exposure of `portfolio` minus exposure of `benchmark`.
    FactorExposure relative_factor_tilt(const Portfolio &portfolio, const Portfolio &benchmark,
                                        const ingest::ReturnsPanel &panel, const Date &as_of);

    /// Linear equality system C w = b for a long/short book.
    struct ConstraintSystem
    {
        Eigen::MatrixXd matrix; // rows: long budget, short budget, one per factor
        Eigen::VectorXd target;
    };

    /// `is_long[i]` selects the side of name i; loadings[i] its factor vector.
    ConstraintSystem longshort_constraints(const std::vector<bool> &is_long,
                                           const std::vector<ingest::FactorVector> &loadings);

    /// Minimum-norm correction w - C^+ (C w - b).
    Eigen::VectorXd project(const ConstraintSystem &system, const Eigen::VectorXd &weights);

    struct LongShortOptions
    {
        std::size_t n_per_side = 100;
        double bound = 0.02;
        int max_repair_rounds = 20;
        int lag_months = 2; // construction_date = as_of + lag, month-end
    };

    /**
     * Dollar-neutral, factor-bounded long/short book.
     *
     * Goes long the `n_per_side` lowest scores and short the highest, starts
     * from equal weights, then alternates a pseudoinverse projection onto the
     * budget and zero-exposure constraints with sign repair (names whose
     * weight crosses zero leave their side). If the projection still leaves an
     * exposure outside `bound`, the name contributing most to the worst factor
     * is dropped and the projection repeats.
     *
     * Throws Infeasible when a side empties, UniverseTooSmall when fewer than
     * 2 * n_per_side names are scored and MissingFactors when a candidate has
     * no loadings at `as_of`.
     */
    Portfolio build_longshort(const signal::CrowdingScores &scores, const ingest::ReturnsPanel &panel,
                              const Date &as_of, const LongShortOptions &options = {});

} // namespace crowdnet::portfolio
