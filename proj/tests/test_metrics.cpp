#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "crowdnet/errors.hpp"
#include "crowdnet/metrics.hpp"

using namespace crowdnet;
using namespace crowdnet::backtest;
using Catch::Matchers::WithinAbs;

namespace
{
    // Two-pass central moments, then the adjusted Fisher-Pearson correction.
    double skew_oracle(const std::vector<double> &xs)
    {
        const double n = static_cast<double>(xs.size());
        long double mu = 0;
        for (double x : xs)
            mu += x;
        mu /= n;
        long double m2 = 0, m3 = 0;
        for (double x : xs)
        {
            const long double d = x - mu;
            m2 += d * d;
            m3 += d * d * d;
        }
        m2 /= n;
        m3 /= n;
        const long double g1 = m3 / std::pow(m2, 1.5L);
        return static_cast<double>(g1 * std::sqrt(n * (n - 1)) / (n - 2));
    }

    // (X'X)^-1 X'y for X = [1, x, x^2], solved by cofactor inverse in long double.
    QuadFit normal_equations(const std::vector<double> &y, const std::vector<double> &x)
    {
        long double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            long double p = 1;
            for (int k = 0; k < 5; ++k)
            {
                s[k] += p;
                if (k < 3)
                    t[k] += p * y[i];
                p *= x[i];
            }
        }
        const long double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
        auto cof = [&](int r, int c) {
            const int r0 = (r + 1) % 3, r1 = (r + 2) % 3, c0 = (c + 1) % 3, c1 = (c + 2) % 3;
            return a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
        };
        const long double det = a[0][0] * cof(0, 0) + a[0][1] * cof(0, 1) + a[0][2] * cof(0, 2);
        long double beta[3];
        for (int i = 0; i < 3; ++i)
            beta[i] = (cof(0, i) * t[0] + cof(1, i) * t[1] + cof(2, i) * t[2]) / det;
        return {double(beta[0]), double(beta[1]), double(beta[2])};
    }
} // namespace

TEST_CASE("skewness examples")
{
    CHECK(sample_skewness(std::vector<double>{-1, 0, 1}) == 0.0);
    CHECK_THROWS_AS(sample_skewness(std::vector<double>{0, 0, 0}), DegenerateSeries);
    CHECK_THROWS_AS(sample_skewness(std::vector<double>{1, 2}), DegenerateSeries);
    CHECK(sample_skewness(std::vector<double>{0, 0, 0, 0, 10}) > 0);
    CHECK(sample_skewness(std::vector<double>{0, 0, 0, 0, -10}) < 0);
}

TEST_CASE("skewness matches a two-pass moment oracle")
{
    std::mt19937_64 rng(2024);
    std::lognormal_distribution<double> draw(0.0, 0.6);
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<double> xs(200);
        for (auto &x : xs)
            x = draw(rng) - 1.0 + 0.01 * trial;
        CHECK_THAT(sample_skewness(xs), WithinAbs(skew_oracle(xs), 1e-12));
    }
}

TEST_CASE("market correlation")
{
    std::vector<double> m{0.01, -0.02, 0.03, 0.005, -0.04};
    std::vector<double> neg, affine;
    for (double x : m)
    {
        neg.push_back(-x);
        affine.push_back(2 * x + 3);
    }
    CHECK_THAT(market_correlation(m, m), WithinAbs(1.0, 1e-15));
    CHECK_THAT(market_correlation(neg, m), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(market_correlation(affine, m), WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(market_correlation(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateSeries);
    CHECK_THROWS_AS(market_correlation(std::vector<double>{1}, std::vector<double>{1}), DegenerateSeries);
    CHECK_THROWS_AS(market_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DegenerateSeries);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> x(30), y(30);
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            x[i] = n01(rng);
            y[i] = (trial % 2 ? 1 : -1) * x[i] * 1e6 + (trial % 3) * n01(rng);
        }
        const double r = market_correlation(y, x);
        CHECK(std::abs(r) <= 1.0 + 1e-12);
        const double b = trial % 2 ? 0.7 : -3.0;
        std::vector<double> lin;
        for (double v : x)
            lin.push_back(1.5 + b * v);
        CHECK_THAT(market_correlation(lin, x), WithinAbs(b > 0 ? 1.0 : -1.0, 1e-12));
    }
}

TEST_CASE("quadratic beta exact fits")
{
    std::vector<double> x{-0.05, -0.02, 0.0, 0.01, 0.03, 0.06}, quad, lin;
    for (double v : x)
    {
        quad.push_back(2 * v * v);
        lin.push_back(0.5 * v);
    }
    auto q = quadratic_beta(quad, x);
    CHECK_THAT(q.a, WithinAbs(0.0, 1e-12));
    CHECK_THAT(q.b, WithinAbs(0.0, 1e-12));
    CHECK_THAT(q.c, WithinAbs(2.0, 1e-10));
    auto l = quadratic_beta(lin, x);
    CHECK_THAT(l.a, WithinAbs(0.0, 1e-12));
    CHECK_THAT(l.b, WithinAbs(0.5, 1e-12));
    CHECK_THAT(l.c, WithinAbs(0.0, 1e-10));

    CHECK_THROWS_AS(quadratic_beta(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), RankDeficient);
    CHECK_THROWS_AS(quadratic_beta(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 2, 2}), RankDeficient);
}

TEST_CASE("quadratic beta matches normal equations on random instances")
{
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 300; ++trial)
    {
        const std::size_t n = 4 + rng() % 200;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            x[i] = n01(rng);
            y[i] = 0.3 - 0.8 * x[i] + 1.7 * x[i] * x[i] + 0.5 * n01(rng);
        }
        auto fit = quadratic_beta(y, x);
        auto ref = normal_equations(y, x);
        INFO("trial " << trial << " n " << n);
        CHECK_THAT(fit.a, WithinAbs(ref.a, 1e-10));
        CHECK_THAT(fit.b, WithinAbs(ref.b, 1e-10));
        CHECK_THAT(fit.c, WithinAbs(ref.c, 1e-10));
    }
}

TEST_CASE("mean")
{
    CHECK(mean(std::vector<double>{1, 2, 3, 6}) == 3.0);
}
