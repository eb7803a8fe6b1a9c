#include "crowdnet/portfolio.hpp"

#include <algorithm>
#include <cmath>

#include "crowdnet/errors.hpp"

namespace crowdnet::portfolio
{
    using ingest::FactorVector;
    using ingest::kFactorCount;

    double Portfolio::long_sum() const
    {
        double s = 0.0;
        for (const auto &[id, w] : weights)
            if (w > 0.0)
                s += w;
        return s;
    }

    double Portfolio::short_sum() const
    {
        double s = 0.0;
        for (const auto &[id, w] : weights)
            if (w < 0.0)
                s += w;
        return s;
    }

    double Portfolio::gross() const
    {
        double s = 0.0;
        for (const auto &[id, w] : weights)
            s += std::abs(w);
        return s;
    }

    std::size_t Portfolio::long_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(weights.begin(), weights.end(), [](const auto &kv) { return kv.second > 0.0; }));
    }

    std::size_t Portfolio::short_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(weights.begin(), weights.end(), [](const auto &kv) { return kv.second < 0.0; }));
    }

    std::vector<std::string> ranked(const signal::CrowdingScores &scores)
    {
        std::vector<std::pair<double, std::string>> keyed;
        keyed.reserve(scores.universe.size());
        for (const auto &id : scores.universe)
            keyed.emplace_back(scores.score(id), id);
        std::sort(keyed.begin(), keyed.end());
        std::vector<std::string> out;
        out.reserve(keyed.size());
        for (auto &[s, id] : keyed)
            out.push_back(std::move(id));
        return out;
    }

    QuintileSet quintile_portfolios(const signal::CrowdingScores &scores, const Date &construction_date)
    {
        const auto order = ranked(scores);
        const auto n = order.size();
        if (n < 5)
            throw UniverseTooSmall(n, 5);

        QuintileSet set;
        const std::size_t base = n / 5, extra = n % 5;
        std::size_t pos = 0;
        for (std::size_t q = 0; q < 5; ++q)
        {
            const std::size_t size = base + (q < extra ? 1 : 0);
            auto &p = set.quintiles[q];
            p.construction_date = construction_date;
            p.label = "Q" + std::to_string(q + 1);
            for (std::size_t i = 0; i < size; ++i)
                p.weights.emplace(order[pos++], 1.0 / static_cast<double>(size));
        }
        set.benchmark.construction_date = construction_date;
        set.benchmark.label = "benchmark";
        for (const auto &id : order)
            set.benchmark.weights.emplace(id, 1.0 / static_cast<double>(n));
        return set;
    }

    FactorExposure portfolio_factor_exposure(const Portfolio &portfolio, const ingest::ReturnsPanel &panel,
                                             const Date &as_of)
    {
        FactorExposure e{};
        for (const auto &[id, w] : portfolio.weights)
        {
            const auto *f = panel.factors(id, as_of);
            if (!f)
                throw MissingFactors(id, as_of.iso());
            for (std::size_t k = 0; k < kFactorCount; ++k)
                e[k] += w * (*f)[k];
        }
        return e;
    }

    FactorExposure relative_factor_tilt(const Portfolio &portfolio, const Portfolio &benchmark,
                                        const ingest::ReturnsPanel &panel, const Date &as_of)
    {
        auto p = portfolio_factor_exposure(portfolio, panel, as_of);
        auto b = portfolio_factor_exposure(benchmark, panel, as_of);
        for (std::size_t k = 0; k < kFactorCount; ++k)
            p[k] -= b[k];
        return p;
    }

    ConstraintSystem longshort_constraints(const std::vector<bool> &is_long, const std::vector<FactorVector> &loadings)
    {
        const auto m = static_cast<Eigen::Index>(is_long.size());
        ConstraintSystem sys;
        sys.matrix = Eigen::MatrixXd::Zero(2 + static_cast<Eigen::Index>(kFactorCount), m);
        sys.target = Eigen::VectorXd::Zero(2 + static_cast<Eigen::Index>(kFactorCount));
        sys.target[0] = 1.0;
        sys.target[1] = -1.0;
        for (Eigen::Index i = 0; i < m; ++i)
        {
            sys.matrix(is_long[static_cast<std::size_t>(i)] ? 0 : 1, i) = 1.0;
            for (std::size_t k = 0; k < kFactorCount; ++k)
                sys.matrix(2 + static_cast<Eigen::Index>(k), i) = loadings[static_cast<std::size_t>(i)][k];
        }
        return sys;
    }

    Eigen::VectorXd project(const ConstraintSystem &system, const Eigen::VectorXd &weights)
    {
        const Eigen::VectorXd residual = system.matrix * weights - system.target;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(system.matrix);
        return weights - cod.solve(residual);
    }

    namespace
    {
        struct Name
        {
            std::string id;
            bool is_long;
            FactorVector loadings;
            double weight;
        };

        FactorExposure exposure_of(const std::vector<Name> &names)
        {
            FactorExposure e{};
            for (const auto &n : names)
                for (std::size_t k = 0; k < kFactorCount; ++k)
                    e[k] += n.weight * n.loadings[k];
            return e;
        }

        void reproject(std::vector<Name> &names)
        {
            std::vector<bool> sides;
            std::vector<FactorVector> loads;
            Eigen::VectorXd w(static_cast<Eigen::Index>(names.size()));
            for (std::size_t i = 0; i < names.size(); ++i)
            {
                sides.push_back(names[i].is_long);
                loads.push_back(names[i].loadings);
                w[static_cast<Eigen::Index>(i)] = names[i].weight;
            }
            auto projected = project(longshort_constraints(sides, loads), w);
            for (std::size_t i = 0; i < names.size(); ++i)
                names[i].weight = projected[static_cast<Eigen::Index>(i)];
        }

        bool both_sides(const std::vector<Name> &names)
        {
            bool l = false, s = false;
            for (const auto &n : names)
                (n.is_long ? l : s) = true;
            return l && s;
        }
    } // namespace

    Portfolio build_longshort(const signal::CrowdingScores &scores, const ingest::ReturnsPanel &panel,
                              const Date &as_of, const LongShortOptions &options)
    {
        const auto order = ranked(scores);
        const auto n = options.n_per_side;
        if (n == 0 || order.size() < 2 * n)
            throw UniverseTooSmall(order.size(), 2 * std::max<std::size_t>(n, 1));

        std::vector<Name> names;
        auto add = [&](const std::string &id, bool is_long, double w) {
            const auto *f = panel.factors(id, as_of);
            if (!f)
                throw MissingFactors(id, as_of.iso());
            names.push_back({id, is_long, *f, w});
        };
        for (std::size_t i = 0; i < n; ++i)
            add(order[i], true, 1.0 / static_cast<double>(n));
        for (std::size_t i = order.size() - n; i < order.size(); ++i)
            add(order[i], false, -1.0 / static_cast<double>(n));

        while (true)
        {
            if (!both_sides(names))
                throw Infeasible("a side emptied before the factor bounds were met");

            int rounds = 0;
            while (true)
            {
                reproject(names);
                auto wrong_sign = [](const Name &x) { return x.is_long ? x.weight < 0.0 : x.weight > 0.0; };
                if (std::none_of(names.begin(), names.end(), wrong_sign))
                    break;
                if (++rounds > options.max_repair_rounds)
                    throw Infeasible("sign repair did not settle within " +
                                     std::to_string(options.max_repair_rounds) + " rounds");
                std::erase_if(names, wrong_sign);
                if (!both_sides(names))
                    throw Infeasible("a side emptied during sign repair");
            }

            double long_sum = 0.0, short_sum = 0.0;
            for (const auto &x : names)
                (x.is_long ? long_sum : short_sum) += x.weight;
            const auto exposure = exposure_of(names);
            std::size_t worst = 0;
            for (std::size_t k = 1; k < kFactorCount; ++k)
                if (std::abs(exposure[k]) > std::abs(exposure[worst]))
                    worst = k;

            const bool budgets_ok =
                std::abs(long_sum - 1.0) <= kBudgetTolerance && std::abs(short_sum + 1.0) <= kBudgetTolerance;
            if (budgets_ok && std::abs(exposure[worst]) <= options.bound)
                break;

            auto culprit = std::max_element(names.begin(), names.end(), [&](const Name &a, const Name &b) {
                return std::abs(a.weight * a.loadings[worst]) < std::abs(b.weight * b.loadings[worst]);
            });
            names.erase(culprit);
        }

        Portfolio p;
        p.construction_date = as_of.month_end_after(options.lag_months);
        p.label = "longshort";
        for (const auto &x : names)
            if (x.weight != 0.0)
                p.weights.emplace(x.id, x.weight);
        return p;
    }

} // namespace crowdnet::portfolio
