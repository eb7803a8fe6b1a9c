#pragma once

#include <span>

namespace crowdnet::backtest
{

    /// Adjusted Fisher-Pearson skewness G1. Throws DegenerateSeries for n < 3 or zero variance.
    double sample_skewness(std::span<const double> xs);

    /// Pearson correlation, clamped to [-1, 1]. Throws DegenerateSeries on
    /// mismatched lengths, n < 2 or a constant input.
    double market_correlation(std::span<const double> port, std::span<const double> mkt);

    /// port ~ a + b * mkt + c * mkt^2
    struct QuadFit
    {
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;
    };

    /// Least squares by column-pivoted QR. Throws RankDeficient when n < 4 or the design lacks full column rank.
    QuadFit quadratic_beta(std::span<const double> port, std::span<const double> mkt);

    double mean(std::span<const double> xs);

} // namespace crowdnet::backtest
