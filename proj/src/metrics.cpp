#include "crowdnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "crowdnet/errors.hpp"

namespace crowdnet::backtest
{

    double mean(std::span<const double> xs)
    {
        if (xs.empty())
            throw DegenerateSeries("mean of an empty series");
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s / static_cast<double>(xs.size());
    }

    double sample_skewness(std::span<const double> xs)
    {
        const auto n = xs.size();
        if (n < 3)
            throw DegenerateSeries("skewness needs at least 3 observations, got " + std::to_string(n));

        // Streaming central moments (Terriberry's update).
        double mu = 0.0, m2 = 0.0, m3 = 0.0;
        double k = 0.0;
        for (double x : xs)
        {
            const double k0 = k;
            k += 1.0;
            const double delta = x - mu;
            const double delta_k = delta / k;
            const double term = delta * delta_k * k0;
            mu += delta_k;
            m3 += term * delta_k * (k - 2.0) - 3.0 * delta_k * m2;
            m2 += term;
        }
        if (!(m2 > 0.0))
            throw DegenerateSeries("skewness of a constant series");
        const double nd = static_cast<double>(n);
        const double g1 = (m3 / nd) / std::pow(m2 / nd, 1.5);
        return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
    }

    double market_correlation(std::span<const double> port, std::span<const double> mkt)
    {
        if (port.size() != mkt.size())
            throw DegenerateSeries("series lengths differ");
        if (port.size() < 2)
            throw DegenerateSeries("correlation needs at least 2 observations");
        const double mp = mean(port), mm = mean(mkt);
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < port.size(); ++i)
        {
            const double dx = port[i] - mp, dy = mkt[i] - mm;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        if (!(sxx > 0.0) || !(syy > 0.0))
            throw DegenerateSeries("correlation with a constant series");
        return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    }

    QuadFit quadratic_beta(std::span<const double> port, std::span<const double> mkt)
    {
        if (port.size() != mkt.size())
            throw RankDeficient("series lengths differ");
        const auto n = static_cast<Eigen::Index>(port.size());
        if (n < 4)
            throw RankDeficient("quadratic regression needs at least 4 observations");
        Eigen::MatrixXd x(n, 3);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double m = mkt[static_cast<std::size_t>(i)];
            x(i, 0) = 1.0;
            x(i, 1) = m;
            x(i, 2) = m * m;
            y[i] = port[static_cast<std::size_t>(i)];
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        if (qr.rank() < 3)
            throw RankDeficient("design [1, r, r^2] has rank " + std::to_string(qr.rank()));
        const Eigen::Vector3d beta = qr.solve(y);
        return {beta[0], beta[1], beta[2]};
    }

} // namespace crowdnet::backtest
