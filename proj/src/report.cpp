#include "crowdnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "crowdnet/csv.hpp"
#include "crowdnet/errors.hpp"

namespace crowdnet::report
{
    using csv::format_double;

    std::vector<std::string> RunMetadata::lines() const
    {
        std::vector<std::string> out;
        out.push_back(std::string(kToolName) + " " + version);
        out.push_back("config_hash: sha256:" + config_hash);
        out.push_back("config: " + config);
        for (const auto &[name, digest] : inputs)
            out.push_back("input: " + name + " sha256:" + digest);
        for (const auto &n : notes)
            out.push_back("note: " + n);
        return out;
    }

    namespace
    {
        csv::Writer open(const std::filesystem::path &path, const RunMetadata &meta, std::string_view header)
        {
            csv::Writer w(path);
            for (const auto &line : meta.lines())
                w.comment(line);
            w.header(header);
            return w;
        }

        std::string fmt(double v) { return format_double(v); }
    } // namespace

    void write_scores(const std::filesystem::path &path, const std::vector<signal::CrowdingScores> &scores,
                      const RunMetadata &meta)
    {
        auto w = open(path, meta, "as_of_date,kind,stock_id,score");
        for (const auto &s : scores)
            for (const auto &[id, v] : s.scores)
                w.row({s.as_of.iso(), std::string(graph::to_string(s.kind)), id, fmt(v)});
    }

    void write_centrality(const std::filesystem::path &path, const std::vector<CentralityRow> &rows,
                          const RunMetadata &meta)
    {
        auto w = open(path, meta, "as_of_date,side,kind,stock_id,value,converged,iterations");
        for (const auto &r : rows)
            for (const auto &[id, v] : r.centrality.values)
                w.row({r.as_of.iso(), std::string(graph::to_string(r.side)),
                       std::string(graph::to_string(r.centrality.kind)), id, fmt(v),
                       r.centrality.converged ? "true" : "false", std::to_string(r.centrality.iterations)});
    }

    void write_quintiles(const std::filesystem::path &path, const std::vector<portfolio::QuintileSet> &sets,
                         const RunMetadata &meta)
    {
        auto w = open(path, meta, "construction_date,quintile,stock_id,weight");
        for (const auto &set : sets)
            for (std::size_t q = 0; q < set.quintiles.size(); ++q)
                for (const auto &[id, wt] : set.quintiles[q].weights)
                    w.row({set.quintiles[q].construction_date.iso(), std::to_string(q + 1), id, fmt(wt)});
    }

    void write_hedge(const std::filesystem::path &path, const std::vector<portfolio::Portfolio> &books,
                     const RunMetadata &meta)
    {
        auto w = open(path, meta, "construction_date,stock_id,weight");
        for (const auto &b : books)
            for (const auto &[id, wt] : b.weights)
                w.row({b.construction_date.iso(), id, fmt(wt)});
    }

    void write_backtest(const std::filesystem::path &dir, const backtest::BacktestResult &result,
                        const backtest::BacktestConfig &config, const RunMetadata &meta)
    {
        RunMetadata m = meta;
        m.notes.push_back("horizons above 3 months use overlapping windows (quarterly construction)");
        for (const auto &f : result.failures)
            m.notes.push_back("failed " + f.holdings_date.iso() + " " + f.stage + ": " + f.error);

        {
            auto w = open(dir / "metrics.csv", m,
                          "signal_kind,portfolio,horizon_months,mean,skewness,market_correlation,quadratic_beta,n_periods");
            for (const auto &[key, r] : result.reports)
                w.row({std::string(graph::to_string(r.kind)), r.portfolio_label, std::to_string(r.horizon),
                       fmt(r.metrics.mean), fmt(r.metrics.skewness), fmt(r.metrics.market_correlation),
                       fmt(r.metrics.quadratic_beta), std::to_string(r.period_returns.size())});
        }
        {
            auto w = open(dir / "quintile_alpha.csv", m, "quintile,horizon_months,mean_alpha,skewness");
            for (const auto &q : result.quintile_alpha)
                w.row({std::to_string(q.quintile), std::to_string(q.horizon), fmt(q.mean_alpha), fmt(q.skewness)});
        }
        {
            auto w = open(dir / "factor_tilts.csv", m, "as_of_date,quintile,beta,growth,momentum,volatility,size");
            for (const auto &t : result.factor_tilts)
            {
                std::vector<std::string> row{t.as_of.iso(), std::to_string(t.quintile)};
                for (double x : t.tilt)
                    row.push_back(fmt(x));
                w.row(row);
            }
        }
        {
            std::vector<int> horizons = config.horizons;
            std::sort(horizons.begin(), horizons.end());
            auto w = open(dir / "ls_scatter.csv", m, "construction_date,ls_return,market_return");
            const auto *ls = horizons.empty() ? nullptr : result.find(config.kind, "longshort", horizons.front());
            backtest::QuadFit fit{std::nan(""), std::nan(""), std::nan("")};
            if (ls)
            {
                for (const auto &p : ls->period_returns)
                    w.row({p.construction_date.iso(), fmt(p.portfolio_return), fmt(p.market_return)});
                fit = ls->metrics.quad_fit;
            }
            w.comment("quad_fit a=" + fmt(fit.a) + " b=" + fmt(fit.b) + " c=" + fmt(fit.c));
        }
        {
            auto w = open(dir / "signal_comparison.csv", m,
                          "signal_kind,mean,skewness,market_correlation,quadratic_beta,n_periods");
            for (const auto &row : result.comparison)
                w.row({std::string(graph::to_string(row.kind)), fmt(row.metrics.mean), fmt(row.metrics.skewness),
                       fmt(row.metrics.market_correlation), fmt(row.metrics.quadratic_beta),
                       std::to_string(row.n_periods)});
        }
    }

    ScatterData read_scatter(const std::filesystem::path &path)
    {
        ScatterData data;
        csv::Reader r(path, "construction_date,ls_return,market_return");
        while (r.next())
            data.points.push_back({r.date(0), r.number(1), r.number(2)});
        std::vector<double> y, x;
        for (const auto &p : data.points)
        {
            y.push_back(p.portfolio_return);
            x.push_back(p.market_return);
        }
        data.fit = backtest::quadratic_beta(y, x);
        return data;
    }

    std::string render_scatter_svg(const ScatterData &data)
    {
        constexpr double width = 800, height = 600, margin = 60;
        double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
        for (const auto &p : data.points)
        {
            xmin = std::min(xmin, p.market_return);
            xmax = std::max(xmax, p.market_return);
            ymin = std::min(ymin, p.portfolio_return);
            ymax = std::max(ymax, p.portfolio_return);
        }
        auto curve = [&](double x) { return data.fit.a + data.fit.b * x + data.fit.c * x * x; };
        for (int i = 0; i <= 100; ++i)
        {
            const double x = xmin + (xmax - xmin) * i / 100.0;
            if (std::isfinite(curve(x)))
            {
                ymin = std::min(ymin, curve(x));
                ymax = std::max(ymax, curve(x));
            }
        }
        if (xmax - xmin <= 0)
            xmax = xmin + 1;
        if (ymax - ymin <= 0)
            ymax = ymin + 1;
        const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
        xmin -= xpad, xmax += xpad, ymin -= ypad, ymax += ypad;
        auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
        auto py = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };

        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return std::string(buf);
        };

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
        svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
        // axes through zero where visible, otherwise along the frame
        const double x0 = px(std::clamp(0.0, xmin, xmax)), y0 = py(std::clamp(0.0, ymin, ymax));
        svg << "<line x1=\"" << num(margin) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(width - margin) << "\" y2=\""
            << num(y0) << "\" stroke=\"#888\"/>\n";
        svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(margin) << "\" x2=\"" << num(x0) << "\" y2=\""
            << num(height - margin) << "\" stroke=\"#888\"/>\n";
        svg << "<text x=\"400\" y=\"585\" text-anchor=\"middle\" font-size=\"14\">market return</text>\n";
        svg << "<text x=\"18\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 300)\">"
               "long/short return</text>\n";
        for (const auto &p : data.points)
            svg << "<circle cx=\"" << num(px(p.market_return)) << "\" cy=\"" << num(py(p.portfolio_return))
                << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
        svg << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"2\" points=\"";
        for (int i = 0; i <= 100; ++i)
        {
            const double x = xmin + (xmax - xmin) * i / 100.0;
            svg << (i ? " " : "") << num(px(x)) << "," << num(py(curve(x)));
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << num(margin) << "\" y=\"30\" font-size=\"14\">fit: " << format_double(data.fit.a)
            << " + " << format_double(data.fit.b) << " x + " << format_double(data.fit.c) << " x^2</text>\n";
        svg << "</svg>\n";
        return svg.str();
    }

} // namespace crowdnet::report
