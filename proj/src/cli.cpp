#include "crowdnet/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crowdnet/csv.hpp"
#include "crowdnet/digest.hpp"
#include "crowdnet/errors.hpp"
#include "crowdnet/report.hpp"
#include "crowdnet/synth.hpp"

namespace crowdnet::cli
{
    namespace fs = std::filesystem;

    namespace
    {
        std::string_view to_string(ingest::UniverseSource s)
        {
            switch (s)
            {
            case ingest::UniverseSource::Benchmark:
                return "benchmark";
            case ingest::UniverseSource::Holdings:
                return "holdings";
            case ingest::UniverseSource::All:
                return "all";
            }
            return "benchmark";
        }

        struct Loaded
        {
            std::vector<ingest::HoldingsSnapshot> snapshots;
            ingest::ReturnsPanel panel;
            backtest::RebalanceSchedule schedule;
            report::RunMetadata meta;
        };

        Loaded load(const RunConfig &cfg)
        {
            ingest::DataLayout layout{cfg.data_dir};
            Loaded l;
            const auto dates = layout.holdings_dates();
            if (dates.empty())
                throw IoError("no holdings files under " + layout.holdings_dir().string());
            for (const auto &d : dates)
                l.snapshots.push_back(
                    ingest::load_snapshot(layout.holdings_file(d), layout.benchmark(), layout.caps(), d));
            l.panel = ingest::load_returns(layout.returns(), layout.market(), layout.factors());
            std::optional<Date> last;
            if (!l.panel.dates.empty())
                last = l.panel.dates.back();
            l.schedule = backtest::build_schedule(dates, cfg.lag_months, cfg.horizons, last);

            l.meta.config = canonical_config(cfg);
            l.meta.config_hash = sha256_hex(l.meta.config);
            std::vector<fs::path> inputs{layout.benchmark(), layout.caps(), layout.returns(), layout.market(),
                                         layout.factors()};
            for (const auto &d : dates)
                inputs.push_back(layout.holdings_file(d));
            for (const auto &p : inputs)
                l.meta.inputs.emplace_back(fs::relative(p, cfg.data_dir).generic_string(), sha256_file(p));
            l.meta.notes.push_back("eigenvector centrality: shifted power iteration, uniform start, L2 norm, tol=" +
                                   csv::format_double(cfg.eigen_tol) +
                                   ", max_iter=" + std::to_string(cfg.eigen_max_iter));
            return l;
        }

        void warn_failures(const std::vector<backtest::QuarterFailure> &failures, report::RunMetadata &meta,
                           std::ostream &err)
        {
            for (const auto &f : failures)
            {
                err << "warning: " << f.holdings_date.iso() << " " << f.stage << ": " << f.error << '\n';
                meta.notes.push_back("failed " + f.holdings_date.iso() + " " + f.stage + ": " + f.error);
            }
        }

        const backtest::ScheduleEntry *entry_for(const backtest::RebalanceSchedule &schedule, const Date &d)
        {
            for (const auto &e : schedule.entries)
                if (e.holdings_date == d)
                    return &e;
            return nullptr;
        }

        int cmd_synth(const fs::path &config_path, const fs::path &out_dir, std::optional<std::uint64_t> seed,
                      std::ostream &out)
        {
            synth::SynthConfig config = config_path.empty() ? synth::SynthConfig{} : synth::load_synth_config(config_path);
            if (seed)
                config.seed = *seed;
            auto data = synth::generate(config);
            synth::write_dataset(data, out_dir);
            std::ofstream(out_dir / "synth.toml") << synth::to_toml(config);
            out << "wrote " << data.snapshots.size() << " quarters, " << config.n_funds << " funds, "
                << config.n_stocks << " stocks to " << out_dir.string() << '\n';
            return 0;
        }

        int cmd_score(const RunConfig &cfg, bool dump, std::ostream &out, std::ostream &err)
        {
            auto l = load(cfg);
            const auto bt = cfg.backtest_config(threads_from_env());
            std::vector<signal::CrowdingScores> scores;
            std::vector<report::CentralityRow> rows;
            std::vector<backtest::QuarterFailure> failures;
            for (const auto &snap : l.snapshots)
            {
                const auto *entry = entry_for(l.schedule, snap.as_of);
                try
                {
                    auto universe =
                        ingest::validate_universe(snap, l.panel, backtest::universe_options(*entry, bt)).usable;
                    auto detail = signal::score_pipeline_detail(snap, cfg.centrality_kind, universe, bt.eigen);
                    scores.push_back(detail.scores);
                    rows.push_back({snap.as_of, graph::Side::Overweight, detail.over});
                    rows.push_back({snap.as_of, graph::Side::Underweight, detail.under});
                }
                catch (const Error &e)
                {
                    failures.push_back({snap.as_of, "score", e.what()});
                }
            }
            warn_failures(failures, l.meta, err);
            report::write_scores(cfg.out_dir / "scores.csv", scores, l.meta);
            if (dump)
                report::write_centrality(cfg.out_dir / "centrality.csv", rows, l.meta);
            out << "scored " << scores.size() << " quarters -> " << (cfg.out_dir / "scores.csv").string() << '\n';
            return 0;
        }

        int cmd_quintiles(const RunConfig &cfg, std::ostream &out, std::ostream &err)
        {
            auto l = load(cfg);
            const auto bt = cfg.backtest_config(threads_from_env());
            std::vector<backtest::QuarterFailure> failures;
            const graph::CentralityKind kinds[] = {cfg.centrality_kind};
            auto scores = backtest::score_quarters(l.snapshots, l.panel, l.schedule, kinds, bt, &failures);
            std::vector<portfolio::QuintileSet> sets;
            for (const auto &s : scores[cfg.centrality_kind])
            {
                try
                {
                    sets.push_back(portfolio::quintile_portfolios(s, entry_for(l.schedule, s.as_of)->construction_date));
                }
                catch (const Error &e)
                {
                    failures.push_back({s.as_of, "quintiles", e.what()});
                }
            }
            warn_failures(failures, l.meta, err);
            report::write_quintiles(cfg.out_dir / "quintiles.csv", sets, l.meta);
            out << "built quintiles for " << sets.size() << " quarters -> "
                << (cfg.out_dir / "quintiles.csv").string() << '\n';
            return 0;
        }

        int cmd_hedge(const RunConfig &cfg, std::ostream &out, std::ostream &err)
        {
            auto l = load(cfg);
            const auto bt = cfg.backtest_config(threads_from_env());
            std::vector<backtest::QuarterFailure> failures;
            const graph::CentralityKind kinds[] = {cfg.centrality_kind};
            auto scores = backtest::score_quarters(l.snapshots, l.panel, l.schedule, kinds, bt, &failures);
            std::vector<portfolio::Portfolio> books;
            auto opts = bt.longshort;
            opts.lag_months = cfg.lag_months;
            for (const auto &s : scores[cfg.centrality_kind])
            {
                try
                {
                    books.push_back(portfolio::build_longshort(s, l.panel, s.as_of, opts));
                }
                catch (const Error &e)
                {
                    failures.push_back({s.as_of, "longshort", e.what()});
                }
            }
            warn_failures(failures, l.meta, err);
            report::write_hedge(cfg.out_dir / "hedge.csv", books, l.meta);
            out << "built " << books.size() << " long/short books -> " << (cfg.out_dir / "hedge.csv").string()
                << '\n';
            return 0;
        }

        int cmd_backtest(const RunConfig &cfg, std::ostream &out, std::ostream &err)
        {
            auto l = load(cfg);
            const auto bt = cfg.backtest_config(threads_from_env());
            std::vector<backtest::QuarterFailure> failures;
            auto scores = backtest::score_quarters(l.snapshots, l.panel, l.schedule, graph::kAllKinds, bt, &failures);
            auto result = backtest::run_backtest(scores, l.panel, l.schedule, bt);
            result.failures.insert(result.failures.begin(), failures.begin(), failures.end());
            for (const auto &f : result.failures)
                err << "warning: " << f.holdings_date.iso() << " " << f.stage << ": " << f.error << '\n';
            report::write_backtest(cfg.out_dir / "report", result, bt, l.meta);

            out << "signal_kind        mean      skewness  correlation  quad_beta\n";
            for (const auto &row : result.comparison)
            {
                char line[160];
                std::snprintf(line, sizeof line, "%-16s %9.5f %9.4f %11.4f %10.4f\n",
                              std::string(graph::to_string(row.kind)).c_str(), row.metrics.mean,
                              row.metrics.skewness, row.metrics.market_correlation, row.metrics.quadratic_beta);
                out << line;
            }
            out << "report written to " << (cfg.out_dir / "report").string() << '\n';
            return 0;
        }

        int cmd_report(const fs::path &out_dir, bool svg, std::ostream &out)
        {
            const auto dir = out_dir / "report";
            auto scatter = report::read_scatter(dir / "ls_scatter.csv");
            out << "long/short vs market: " << scatter.points.size() << " periods, quadratic fit a="
                << csv::format_double(scatter.fit.a) << " b=" << csv::format_double(scatter.fit.b)
                << " c=" << csv::format_double(scatter.fit.c) << '\n';
            csv::Reader r(dir / "signal_comparison.csv",
                          "signal_kind,mean,skewness,market_correlation,quadratic_beta,n_periods");
            out << "signal_kind        mean      skewness  correlation  quad_beta\n";
            while (r.next())
            {
                char line[160];
                std::snprintf(line, sizeof line, "%-16s %9.5f %9.4f %11.4f %10.4f\n", r.text(0).c_str(),
                              r.number(1), r.number(2), r.number(3), r.number(4));
                out << line;
            }
            if (svg)
            {
                const auto path = dir / "ls_scatter.svg";
                std::ofstream f(path, std::ios::binary);
                if (!f)
                    throw IoError("cannot write " + path.string());
                f << report::render_scatter_svg(scatter);
                out << "wrote " << path.string() << '\n';
            }
            return 0;
        }
    } // namespace

    backtest::BacktestConfig RunConfig::backtest_config(unsigned threads) const
    {
        backtest::BacktestConfig c;
        c.kind = centrality_kind;
        c.longshort.n_per_side = n_per_side;
        c.longshort.bound = factor_bound;
        c.longshort.lag_months = lag_months;
        c.horizons = horizons;
        c.lag_months = lag_months;
        c.eigen = {eigen_tol, eigen_max_iter};
        c.universe = universe;
        c.threads = threads;
        return c;
    }

    std::string canonical_config(const RunConfig &c)
    {
        std::string horizons;
        for (std::size_t i = 0; i < c.horizons.size(); ++i)
            horizons += (i ? "," : "") + std::to_string(c.horizons[i]);
        std::string out = "kind=" + std::string(graph::to_string(c.centrality_kind)) +
                          ";n_per_side=" + std::to_string(c.n_per_side) +
                          ";factor_bound=" + csv::format_double(c.factor_bound) +
                          ";lag_months=" + std::to_string(c.lag_months) + ";horizons=" + horizons +
                          ";eigen_tol=" + csv::format_double(c.eigen_tol) +
                          ";eigen_max_iter=" + std::to_string(c.eigen_max_iter) +
                          ";universe=" + std::string(to_string(c.universe));
        if (c.seed)
            out += ";seed=" + std::to_string(*c.seed);
        return out;
    }

    unsigned threads_from_env()
    {
        const char *v = std::getenv("CROWDNET_THREADS");
        if (!v || !*v)
            return 0;
        char *end = nullptr;
        const unsigned long n = std::strtoul(v, &end, 10);
        return (end && *end == '\0') ? static_cast<unsigned>(n) : 0;
    }

    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Holdings-graph crowding scores, quintile and long/short portfolios, and backtests", "crowdnet"};
        app.require_subcommand(1);

        RunConfig cfg;
        std::string kind = "eigenvector", universe = "benchmark";
        bool dump = false, svg = false;
        fs::path synth_config, synth_out;
        std::optional<std::uint64_t> seed;

        auto add_common = [&](CLI::App *sub) {
            sub->add_option("--data-dir", cfg.data_dir, "Input data directory")->required();
            sub->add_option("--out-dir", cfg.out_dir, "Output directory")->required();
            sub->add_option("--kind", kind, "Centrality kind")
                ->check(CLI::IsMember({"degree", "weighted_degree", "eigenvector"}))
                ->capture_default_str();
            sub->add_option("--n-per-side", cfg.n_per_side, "Names per side of the long/short book")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            sub->add_option("--factor-bound", cfg.factor_bound, "Absolute bound on each factor exposure")
                ->check(CLI::NonNegativeNumber)
                ->capture_default_str();
            sub->add_option("--lag-months", cfg.lag_months, "Months from holdings date to construction")
                ->check(CLI::NonNegativeNumber)
                ->capture_default_str();
            sub->add_option("--horizons", cfg.horizons, "Forward horizons in months")
                ->delimiter(',')
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            sub->add_option("--eigen-tol", cfg.eigen_tol, "Power iteration tolerance (max norm)")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            sub->add_option("--eigen-max-iter", cfg.eigen_max_iter, "Power iteration limit")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            sub->add_option("--universe", universe, "Scored universe: benchmark, holdings or all")
                ->check(CLI::IsMember({"benchmark", "holdings", "all"}))
                ->capture_default_str();
        };

        auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with a planted crowded block");
        synth_cmd->add_option("--config", synth_config, "Config file (key = value)")->check(CLI::ExistingFile);
        synth_cmd->add_option("--out", synth_out, "Output directory")->required();
        synth_cmd->add_option("--seed", seed, "Override the config seed");

        auto *score_cmd = app.add_subcommand("score", "Write per-quarter crowding scores");
        add_common(score_cmd);
        score_cmd->add_flag("--dump-centrality", dump, "Also write over/under centralities");

        auto *quintiles_cmd = app.add_subcommand("quintiles", "Write equal-weighted quintile portfolios");
        add_common(quintiles_cmd);
        auto *hedge_cmd = app.add_subcommand("hedge", "Write factor-neutral long/short books");
        add_common(hedge_cmd);
        auto *backtest_cmd = app.add_subcommand("backtest", "Run the quarterly backtest and write report CSVs");
        add_common(backtest_cmd);

        auto *report_cmd = app.add_subcommand("report", "Summarize a backtest report directory");
        report_cmd->add_option("--out-dir", cfg.out_dir, "Directory holding report/")->required();
        report_cmd->add_flag("--svg", svg, "Render report/ls_scatter.svg");

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError &e)
        {
            if (e.get_exit_code() == 0)
                return app.exit(e, out, err);
            err << e.what() << "\n\n";
            const auto subs = app.get_subcommands();
            err << (subs.empty() ? app.help() : subs.back()->help());
            return 2;
        }

        cfg.centrality_kind = *graph::parse_kind(kind);
        cfg.universe = universe == "holdings" ? ingest::UniverseSource::Holdings
                       : universe == "all"    ? ingest::UniverseSource::All
                                              : ingest::UniverseSource::Benchmark;

        try
        {
            if (synth_cmd->parsed())
                return cmd_synth(synth_config, synth_out, seed, out);
            if (score_cmd->parsed())
                return cmd_score(cfg, dump, out, err);
            if (quintiles_cmd->parsed())
                return cmd_quintiles(cfg, out, err);
            if (hedge_cmd->parsed())
                return cmd_hedge(cfg, out, err);
            if (backtest_cmd->parsed())
                return cmd_backtest(cfg, out, err);
            if (report_cmd->parsed())
                return cmd_report(cfg.out_dir, svg, out);
        }
        catch (const Error &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        catch (const fs::filesystem_error &e)
        {
            err << "error: IoError: " << e.what() << '\n';
            return 1;
        }
        return 2;
    }

} // namespace crowdnet::cli
