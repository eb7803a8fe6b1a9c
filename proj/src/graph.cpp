#include "crowdnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "crowdnet/errors.hpp"

namespace crowdnet::graph
{

    std::string_view to_string(Side side) { return side == Side::Overweight ? "overweight" : "underweight"; }

    std::string_view to_string(CentralityKind kind)
    {
        switch (kind)
        {
        case CentralityKind::Degree:
            return "degree";
        case CentralityKind::WeightedDegree:
            return "weighted_degree";
        case CentralityKind::Eigenvector:
            return "eigenvector";
        }
        return "unknown";
    }

    std::optional<CentralityKind> parse_kind(std::string_view text)
    {
        for (auto k : kAllKinds)
            if (text == to_string(k))
                return k;
        return std::nullopt;
    }

    double CentralityVector::value(const std::string &stock_id) const
    {
        auto it = values.find(stock_id);
        return it == values.end() ? 0.0 : it->second;
    }

    CrowdGraph CrowdGraph::from_edges(Side side,
                                      const std::vector<std::tuple<std::string, std::string, double>> &labelled)
    {
        std::set<std::string> funds, stocks;
        for (const auto &[f, s, w] : labelled)
        {
            if (!(w > 0.0))
                throw std::invalid_argument("edge weight must be strictly positive");
            funds.insert(f);
            stocks.insert(s);
        }
        CrowdGraph g;
        g.side = side;
        g.fund_ids.assign(funds.begin(), funds.end());
        g.stock_ids.assign(stocks.begin(), stocks.end());
        auto index = [](const std::vector<std::string> &ids, const std::string &id) {
            return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
        };
        for (const auto &[f, s, w] : labelled)
            g.edges.push_back({index(g.fund_ids, f), index(g.stock_ids, s), w});
        std::sort(g.edges.begin(), g.edges.end(),
                  [](const Edge &a, const Edge &b) { return std::tie(a.fund, a.stock) < std::tie(b.fund, b.stock); });
        for (std::size_t i = 1; i < g.edges.size(); ++i)
            if (g.edges[i].fund == g.edges[i - 1].fund && g.edges[i].stock == g.edges[i - 1].stock)
                throw std::invalid_argument("duplicate (fund, stock) edge");
        return g;
    }

    Eigen::MatrixXd adjacency_matrix(const CrowdGraph &graph)
    {
        const auto nf = graph.fund_ids.size();
        const auto n = graph.node_count();
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (const auto &e : graph.edges)
        {
            auto i = static_cast<Eigen::Index>(e.fund);
            auto j = static_cast<Eigen::Index>(nf + e.stock);
            a(i, j) = e.weight;
            a(j, i) = e.weight;
        }
        return a;
    }

    double normalized_active_weight(double fund_weight, double benchmark_weight, double market_cap)
    {
        if (!(market_cap > 1.0))
            throw NonPositiveLog(market_cap);
        return (fund_weight - benchmark_weight) / std::log(market_cap);
    }

    std::pair<CrowdGraph, CrowdGraph> build_split_graphs(const ingest::HoldingsSnapshot &snapshot)
    {
        std::vector<std::tuple<std::string, std::string, double>> over, under;
        for (const auto &h : snapshot.holdings)
        {
            auto cap = snapshot.market_caps.find(h.stock_id);
            if (cap == snapshot.market_caps.end())
                throw MissingMarketCap(h.stock_id);
            double w = normalized_active_weight(h.weight, snapshot.benchmark_weight(h.stock_id), cap->second);
            if (w > 0.0)
                over.emplace_back(h.fund_id, h.stock_id, w);
            else if (w < 0.0)
                under.emplace_back(h.fund_id, h.stock_id, -w);
        }
        return {CrowdGraph::from_edges(Side::Overweight, over), CrowdGraph::from_edges(Side::Underweight, under)};
    }

    double median_weight(const CrowdGraph &graph)
    {
        if (graph.edges.empty())
            return 0.0;
        std::vector<double> w;
        w.reserve(graph.edges.size());
        for (const auto &e : graph.edges)
            w.push_back(e.weight);
        std::sort(w.begin(), w.end());
        const auto n = w.size();
        return n % 2 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
    }

    CrowdGraph median_filter(const CrowdGraph &graph)
    {
        const double threshold = median_weight(graph);
        std::vector<std::tuple<std::string, std::string, double>> kept;
        for (const auto &e : graph.edges)
            if (e.weight > threshold)
                kept.emplace_back(graph.fund_ids[e.fund], graph.stock_ids[e.stock], e.weight);
        return CrowdGraph::from_edges(graph.side, kept);
    }

    CentralityVector degree_centrality(const CrowdGraph &graph)
    {
        CentralityVector out;
        out.kind = CentralityKind::Degree;
        if (graph.empty())
            return out;
        std::vector<std::size_t> count(graph.stock_ids.size(), 0);
        for (const auto &e : graph.edges)
            ++count[e.stock];
        const double funds = static_cast<double>(graph.fund_ids.size());
        for (std::size_t s = 0; s < count.size(); ++s)
            out.values.emplace(graph.stock_ids[s], static_cast<double>(count[s]) / funds);
        return out;
    }

    CentralityVector weighted_degree_centrality(const CrowdGraph &graph)
    {
        CentralityVector out;
        out.kind = CentralityKind::WeightedDegree;
        std::vector<double> strength(graph.stock_ids.size(), 0.0);
        for (const auto &e : graph.edges)
            strength[e.stock] += e.weight;
        for (std::size_t s = 0; s < strength.size(); ++s)
            out.values.emplace(graph.stock_ids[s], strength[s]);
        return out;
    }

    namespace
    {
        // y = A x over the edge list; fund block first.
        void multiply(const CrowdGraph &graph, const Eigen::VectorXd &x, Eigen::VectorXd &y)
        {
            const auto nf = static_cast<Eigen::Index>(graph.fund_ids.size());
            y.setZero();
            for (const auto &e : graph.edges)
            {
                const auto f = static_cast<Eigen::Index>(e.fund);
                const auto s = nf + static_cast<Eigen::Index>(e.stock);
                y[f] += e.weight * x[s];
                y[s] += e.weight * x[f];
            }
        }
    } // namespace

    PowerIterationResult power_iteration(const CrowdGraph &graph, const EigenOptions &options)
    {
        if (graph.empty())
            throw EmptyGraph();

        const auto n = static_cast<Eigen::Index>(graph.node_count());
        Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        Eigen::VectorXd av(n), next(n);

        PowerIterationResult result;
        while (result.iterations < options.max_iter)
        {
            multiply(graph, v, av);
            const double rho = v.dot(av);
            next = av + rho * v;
            next /= next.norm();
            ++result.iterations;
            const double delta = (next - v).cwiseAbs().maxCoeff();
            v.swap(next);
            if (delta < options.tol)
            {
                result.converged = true;
                break;
            }
        }
        multiply(graph, v, av);
        result.eigenvalue = v.dot(av);
        result.values = std::move(v);
        return result;
    }

    CentralityVector eigenvector_centrality(const CrowdGraph &graph, const EigenOptions &options)
    {
        auto it = power_iteration(graph, options);
        CentralityVector out;
        out.kind = CentralityKind::Eigenvector;
        out.converged = it.converged;
        out.iterations = it.iterations;
        const auto nf = static_cast<Eigen::Index>(graph.fund_ids.size());
        for (std::size_t s = 0; s < graph.stock_ids.size(); ++s)
            out.values.emplace(graph.stock_ids[s], it.values[nf + static_cast<Eigen::Index>(s)]);
        return out;
    }

    CentralityVector centrality(const CrowdGraph &graph, CentralityKind kind, const EigenOptions &options)
    {
        switch (kind)
        {
        case CentralityKind::Degree:
            return degree_centrality(graph);
        case CentralityKind::WeightedDegree:
            return weighted_degree_centrality(graph);
        case CentralityKind::Eigenvector:
            if (graph.empty())
                return CentralityVector{CentralityKind::Eigenvector, {}, true, 0};
            return eigenvector_centrality(graph, options);
        }
        throw std::invalid_argument("unknown centrality kind");
    }

} // namespace crowdnet::graph
