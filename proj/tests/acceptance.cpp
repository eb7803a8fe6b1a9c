// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "crowdnet/backtest.hpp"
#include "crowdnet/cli.hpp"
#include "crowdnet/csv.hpp"
#include "crowdnet/errors.hpp"
#include "crowdnet/synth.hpp"
#include "support.hpp"

using namespace crowdnet;
namespace fs = std::filesystem;

namespace
{
    struct Verdict
    {
        bool pass;
        std::string detail;
    };

    int failures = 0;

    void check(int id, const std::string &name, double time_limit_s, const std::function<Verdict()> &fn)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = fn();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (time_limit_s > 0 && secs >= time_limit_s)
        {
            v.pass = false;
            v.detail += "; over time limit";
        }
        char timing[64];
        std::snprintf(timing, sizeof timing, " (%.2f s)", secs);
        std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << v.detail << timing
                  << std::endl;
        if (!v.pass)
            ++failures;
    }

    std::string num(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    Eigen::VectorXd dense_dominant(const graph::CrowdGraph &g)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph::adjacency_matrix(g));
        Eigen::Index top = 0;
        solver.eigenvalues().maxCoeff(&top);
        Eigen::VectorXd v = solver.eigenvectors().col(top);
        return v.sum() < 0 ? Eigen::VectorXd(-v) : v;
    }

    backtest::QuadFit normal_equations(const std::vector<double> &y, const std::vector<double> &x)
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

    // Fraction of planted stocks in the top quintile over every quarter of 20 seeds, per kind.
    const std::map<graph::CentralityKind, double> &detection_rates()
    {
        static const auto rates = [] {
            std::map<graph::CentralityKind, std::pair<std::size_t, std::size_t>> counts;
            for (std::uint64_t seed = 1; seed <= 20; ++seed)
            {
                synth::SynthConfig cfg;
                cfg.seed = seed;
                auto data = synth::generate(cfg);
                for (const auto &snap : data.snapshots)
                {
                    auto universe = ingest::validate_universe(snap, data.panel).usable;
                    for (auto kind : graph::kAllKinds)
                    {
                        auto scores = signal::score_pipeline(snap, kind, universe);
                        auto q = portfolio::quintile_portfolios(scores, snap.as_of.month_end_after(2));
                        for (const auto &id : data.planted_block)
                        {
                            counts[kind].first += q.quintiles[4].weights.contains(id);
                            ++counts[kind].second;
                        }
                    }
                }
            }
            std::map<graph::CentralityKind, double> out;
            for (const auto &[kind, c] : counts)
                out[kind] = double(c.first) / double(c.second);
            return out;
        }();
        return rates;
    }

    int run_cli(std::vector<std::string> args)
    {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        if (code != 0)
            std::cerr << err.str();
        return code;
    }
} // namespace

int main()
{
    check(1, "eigenvector centrality vs dense eigensolver, 100 connected graphs <= 50 nodes", 10, [] {
        std::mt19937_64 rng(20240101);
        double worst = 0;
        int unconverged = 0;
        for (int trial = 0; trial < 100; ++trial)
        {
            const std::size_t nf = 1 + rng() % 25;
            const std::size_t ns = 1 + rng() % (50 - nf);
            auto g = testing::random_connected(rng, nf, ns, rng() % (nf * ns + 1));
            auto r = graph::power_iteration(g);
            unconverged += !r.converged;
            worst = std::max(worst, (r.values - dense_dominant(g)).cwiseAbs().maxCoeff());
        }
        return Verdict{worst < 1e-8, "max Linf error " + num(worst) + ", unconverged " + std::to_string(unconverged)};
    });

    check(2, "star K1,k closed form for k in {2,4,9}", 0, [] {
        double worst = 0;
        for (int k : {2, 4, 9})
        {
            std::vector<std::tuple<std::string, std::string, double>> e;
            for (int j = 0; j < k; ++j)
                e.emplace_back("HUB", testing::stock(j), 1.0);
            auto r = graph::power_iteration(graph::CrowdGraph::from_edges(graph::Side::Overweight, e));
            worst = std::max(worst, std::abs(r.values(0) - 1 / std::sqrt(2.0)));
            for (int j = 0; j < k; ++j)
                worst = std::max(worst, std::abs(r.values(1 + j) - 1 / std::sqrt(2.0 * k)));
        }
        return Verdict{worst <= 1e-10, "max error " + num(worst)};
    });

    check(3, "median filter keeps weights strictly above the median", 0, [] {
        using graph::CrowdGraph;
        auto g = CrowdGraph::from_edges(graph::Side::Overweight,
                                        {{"F1", "A", 1}, {"F1", "B", 2}, {"F1", "C", 3}, {"F2", "D", 4}, {"F3", "E", 5}});
        auto kept = graph::median_filter(g);
        std::multiset<double> w;
        for (const auto &e : kept.edges)
            w.insert(e.weight);
        auto flat = graph::median_filter(
            CrowdGraph::from_edges(graph::Side::Overweight, {{"F1", "A", 2}, {"F2", "B", 2}, {"F2", "C", 2}}));
        const bool ok = w == std::multiset<double>{4, 5} && flat.empty() && flat.node_count() == 0;
        return Verdict{ok, "{1..5} -> " + std::to_string(w.size()) + " edges {4,5}; all-equal -> " +
                               std::to_string(flat.edges.size()) + " edges"};
    });

    check(4, "quadratic beta vs normal equations, 1000 instances; exact y = 2x^2", 5, [] {
        std::mt19937_64 rng(4242);
        std::normal_distribution<double> n01;
        double worst = 0;
        for (int trial = 0; trial < 1000; ++trial)
        {
            const std::size_t n = 4 + rng() % 400;
            std::vector<double> x(n), y(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                x[i] = n01(rng);
                y[i] = 0.1 + 0.4 * x[i] - 0.9 * x[i] * x[i] + n01(rng);
            }
            auto a = backtest::quadratic_beta(y, x);
            auto b = normal_equations(y, x);
            worst = std::max({worst, std::abs(a.a - b.a), std::abs(a.b - b.b), std::abs(a.c - b.c)});
        }
        std::vector<double> x{-0.1, -0.05, -0.01, 0.0, 0.02, 0.04, 0.08}, y;
        for (double v : x)
            y.push_back(2 * v * v);
        auto exact = backtest::quadratic_beta(y, x);
        const double exact_err = std::max({std::abs(exact.a), std::abs(exact.b), std::abs(exact.c - 2)});
        return Verdict{worst <= 1e-10 && exact_err <= 1e-10,
                       "max coefficient gap " + num(worst) + ", exact-fit error " + num(exact_err)};
    });

    check(5, "long/short constraints on 100 synthetic universes (300 stocks)", 60, [] {
        int accepted = 0, infeasible = 0, violations = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
        {
            synth::SynthConfig cfg;
            cfg.seed = seed;
            cfg.n_quarters = 1;
            cfg.n_stocks = 300;
            auto data = synth::generate(cfg);
            const auto &snap = data.snapshots.front();
            auto scores = signal::score_pipeline(snap, graph::CentralityKind::Eigenvector,
                                                 ingest::validate_universe(snap, data.panel).usable);
            try
            {
                auto p = portfolio::build_longshort(scores, data.panel, snap.as_of);
                ++accepted;
                bool ok = std::abs(p.long_sum() - 1) <= 1e-9 && std::abs(p.short_sum() + 1) <= 1e-9 &&
                          p.long_count() <= 100 && p.short_count() <= 100;
                for (double e : portfolio::portfolio_factor_exposure(p, data.panel, snap.as_of))
                    ok = ok && std::abs(e) <= 0.02;
                violations += !ok;
            }
            catch (const Infeasible &)
            {
                ++infeasible;
            }
        }
        return Verdict{violations == 0, std::to_string(accepted) + " accepted, " + std::to_string(infeasible) +
                                            " infeasible, " + std::to_string(violations) + " violating"};
    });

    check(6, "planted block lands in quintile 5 (intensity 10x noise, 20 seeds)", 0, [] {
        const double rate = detection_rates().at(graph::CentralityKind::Eigenvector);
        return Verdict{rate == 1.0, "detection rate " + num(rate * 100) + "%"};
    });

    check(7, "crash data: L/S corr < 0, quad beta > 0; Q5 alpha < Q1 alpha, Q5 skew < 0", 120, [] {
        const auto root = testing::scratch("crash");
        synth::SynthConfig cfg;
        cfg.crash_quarter = 8;
        synth::write_dataset(synth::generate(cfg), root / "data");
        if (run_cli({"backtest", "--data-dir", (root / "data").string(), "--out-dir", (root / "out").string()}) != 0)
            return Verdict{false, "backtest failed"};
        csv::Reader r(root / "out/report/metrics.csv",
                      "signal_kind,portfolio,horizon_months,mean,skewness,market_correlation,quadratic_beta,n_periods");
        double corr = NAN, qbeta = NAN;
        while (r.next())
            if (r.text(0) == "eigenvector" && r.text(1) == "longshort" && r.text(2) == "1")
            {
                corr = std::stod(r.text(5));
                qbeta = std::stod(r.text(6));
            }
        csv::Reader qa(root / "out/report/quintile_alpha.csv", "quintile,horizon_months,mean_alpha,skewness");
        double q1 = NAN, q5 = NAN, q5_skew = NAN;
        while (qa.next())
            if (qa.text(1) == "1")
            {
                if (qa.text(0) == "1")
                    q1 = std::stod(qa.text(2));
                if (qa.text(0) == "5")
                {
                    q5 = std::stod(qa.text(2));
                    q5_skew = std::stod(qa.text(3));
                }
            }
        const bool ok = corr < 0 && qbeta > 0 && q5 < q1 && q5_skew < 0;
        return Verdict{ok, "corr " + num(corr) + ", quad beta " + num(qbeta) + ", Q1 alpha " + num(q1) +
                               ", Q5 alpha " + num(q5) + ", Q5 skew " + num(q5_skew)};
    });

    check(8, "signal comparison table; eigenvector detection >= degree variants", 0, [] {
        synth::SynthConfig cfg;
        cfg.crash_quarter = 8;
        auto data = synth::generate(cfg);
        std::vector<Date> dates;
        for (const auto &s : data.snapshots)
            dates.push_back(s.as_of);
        auto schedule = backtest::build_schedule(dates, 2, {1, 3, 6, 12}, data.panel.dates.back());
        backtest::BacktestConfig bc;
        bc.threads = 0;
        auto scores = backtest::score_quarters(data.snapshots, data.panel, schedule, graph::kAllKinds, bc);
        auto result = backtest::run_backtest(scores, data.panel, schedule, bc);
        bool shape = result.comparison.size() == 3;
        const graph::CentralityKind order[] = {graph::CentralityKind::Degree, graph::CentralityKind::WeightedDegree,
                                               graph::CentralityKind::Eigenvector};
        for (std::size_t i = 0; shape && i < 3; ++i)
        {
            const auto &m = result.comparison[i].metrics;
            shape = result.comparison[i].kind == order[i] && std::isfinite(m.mean) && std::isfinite(m.skewness) &&
                    std::isfinite(m.market_correlation) && std::isfinite(m.quadratic_beta);
        }
        const double deg = detection_rates().at(graph::CentralityKind::Degree);
        const double wdeg = detection_rates().at(graph::CentralityKind::WeightedDegree);
        const double eig = detection_rates().at(graph::CentralityKind::Eigenvector);
        return Verdict{shape && eig >= deg && eig >= wdeg,
                       std::string(shape ? "3x4 table" : "bad table") + "; detection degree " + num(deg * 100) +
                           "%, weighted " + num(wdeg * 100) + "%, eigenvector " + num(eig * 100) + "%"};
    });

    check(9, "two full runs give byte-identical reports", 0, [] {
        const auto root = testing::scratch("determinism");
        std::vector<fs::path> outs;
        for (const char *tag : {"a", "b"})
        {
            const auto d = root / tag;
            if (run_cli({"synth", "--out", (d / "data").string(), "--seed", "11"}) != 0 ||
                run_cli({"score", "--data-dir", (d / "data").string(), "--out-dir", (d / "out").string(),
                     "--dump-centrality"}) != 0 ||
                run_cli({"quintiles", "--data-dir", (d / "data").string(), "--out-dir", (d / "out").string()}) != 0 ||
                run_cli({"hedge", "--data-dir", (d / "data").string(), "--out-dir", (d / "out").string()}) != 0 ||
                run_cli({"backtest", "--data-dir", (d / "data").string(), "--out-dir", (d / "out").string()}) != 0)
                return Verdict{false, "pipeline failed"};
            outs.push_back(d);
        }
        std::size_t files = 0, differ = 0;
        for (const auto &entry : fs::recursive_directory_iterator(outs[0]))
        {
            if (!entry.is_regular_file())
                continue;
            ++files;
            const auto rel = fs::relative(entry.path(), outs[0]);
            differ += testing::read_text(entry.path()) != testing::read_text(outs[1] / rel);
        }
        const bool pinned = testing::read_text(outs[0] / "out/report/metrics.csv").starts_with("# crowdnet 0.1.0\n");
        return Verdict{differ == 0 && files > 0 && pinned, std::to_string(files) + " files compared, " +
                                                                std::to_string(differ) + " differ"};
    });

    check(10, "construction date = holdings + 2 months, month-end clamped, 2014-2022", 0, [] {
        std::vector<Date> dates;
        for (int y = 2014; y <= 2022; ++y)
            for (int m : {3, 6, 9, 12})
                dates.push_back(Date(y, m, 1).month_end_after(0));
        auto s = backtest::build_schedule(dates);
        std::size_t bad = 0;
        for (const auto &e : s.entries)
        {
            const auto ymd = e.holdings_date.ymd();
            int cm = static_cast<int>(unsigned(ymd.month())) + 2, cy = int(ymd.year());
            if (cm > 12)
            {
                cm -= 12;
                ++cy;
            }
            // last day of (cy, cm), independent of the Date helpers
            static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
            int last = days[cm - 1] + (cm == 2 && ((cy % 4 == 0 && cy % 100 != 0) || cy % 400 == 0));
            bad += e.construction_date != Date(cy, cm, last);
        }
        const bool spots = s.entries.front().construction_date == Date(2014, 5, 31) &&
                           s.entries[3].construction_date == Date(2015, 2, 28);
        return Verdict{bad == 0 && spots && s.entries.size() == 36,
                       std::to_string(s.entries.size()) + " quarters, " + std::to_string(bad) +
                           " mismatches; 2014-03-31 -> " + s.entries[0].construction_date.iso() +
                           ", 2014-12-31 -> " + s.entries[3].construction_date.iso()};
    });

    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
