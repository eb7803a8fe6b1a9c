#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "crowdnet/ingest.hpp"

namespace crowdnet::graph
{

    enum class Side
    {
        Overweight,
        Underweight
    };
    std::string_view to_string(Side side);

    struct Edge
    {
        std::size_t fund = 0;  // index into fund_ids
        std::size_t stock = 0; // index into stock_ids
        double weight = 0.0;   // magnitude, strictly positive

        bool operator==(const Edge &) const = default;
    };

    /**
     * Weighted fund-stock bipartite graph for one side of the active book.
     *
     * Node lists are sorted and contain only nodes with at least one edge;
     * edges are sorted by (fund, stock) and unique.
     */
    struct CrowdGraph
    {
        Side side = Side::Overweight;
        std::vector<std::string> fund_ids;
        std::vector<std::string> stock_ids;
        std::vector<Edge> edges;

        bool empty() const { return edges.empty(); }
        std::size_t node_count() const { return fund_ids.size() + stock_ids.size(); }

        /// Builds a graph from labelled edges. Throws std::invalid_argument on a
        /// non-positive weight or a repeated (fund, stock) pair.
        static CrowdGraph from_edges(Side side,
                                     const std::vector<std::tuple<std::string, std::string, double>> &edges);

        bool operator==(const CrowdGraph &) const = default;
    };

    /// Dense symmetric adjacency in (funds..., stocks...) block order.
    Eigen::MatrixXd adjacency_matrix(const CrowdGraph &graph);

    enum class CentralityKind
    {
        Degree,
        WeightedDegree,
        Eigenvector
    };
    std::string_view to_string(CentralityKind kind);
    std::optional<CentralityKind> parse_kind(std::string_view text);
    inline constexpr CentralityKind kAllKinds[] = {CentralityKind::Degree, CentralityKind::WeightedDegree,
                                                   CentralityKind::Eigenvector};

    struct CentralityVector
    {
        CentralityKind kind = CentralityKind::Eigenvector;
        std::map<std::string, double> values; // stock_id -> centrality, stocks in the graph only
        bool converged = true;
        int iterations = 0; // power iterations performed (eigenvector only)

        double value(const std::string &stock_id) const;
    };

    struct EigenOptions
    {
        double tol = 1e-10;
        int max_iter = 1000;
    };

    /// (fund_weight - benchmark_weight) / ln(market_cap). Throws NonPositiveLog when cap <= 1.
    double normalized_active_weight(double fund_weight, double benchmark_weight, double market_cap);

    /// Over- and underweight graphs from every holding row with a nonzero normalized active weight.
    std::pair<CrowdGraph, CrowdGraph> build_split_graphs(const ingest::HoldingsSnapshot &snapshot);

    /// Median of all edge weights (mean of the middle pair for even counts).
    double median_weight(const CrowdGraph &graph);

    /// Keeps edges strictly above the median weight and drops isolated nodes.
    CrowdGraph median_filter(const CrowdGraph &graph);

    CentralityVector degree_centrality(const CrowdGraph &graph);
    CentralityVector weighted_degree_centrality(const CrowdGraph &graph);

    /// Full node vector of the power iteration, funds first then stocks.
    struct PowerIterationResult
    {
        Eigen::VectorXd values;
        double eigenvalue = 0.0; // Rayleigh quotient at the returned vector
        bool converged = false;
        int iterations = 0;
    };

    /**
     * Dominant eigenvector of the bipartite adjacency matrix by power iteration.
     *
     * The spectrum of a bipartite adjacency is symmetric (+l and -l are both
     * eigenvalues), so plain iteration from a positive start alternates between
     * two vectors forever. Each step therefore applies A + rho*I, with rho the
     * Rayleigh quotient of the current iterate. rho never exceeds the dominant
     * eigenvalue and is nonnegative, which keeps every iterate nonnegative and
     * leaves the eigenvectors untouched while damping the -l component.
     *
     * Starts from the uniform vector, L2-normalizes every step and stops when
     * successive iterates differ by less than `tol` in the max norm.
     * Throws EmptyGraph when the graph has no edges.
     */
    PowerIterationResult power_iteration(const CrowdGraph &graph, const EigenOptions &options = {});

    /// Stock components of power_iteration().
    CentralityVector eigenvector_centrality(const CrowdGraph &graph, const EigenOptions &options = {});

    /// Dispatch on kind. Empty graphs yield an empty vector for every kind.
    CentralityVector centrality(const CrowdGraph &graph, CentralityKind kind, const EigenOptions &options = {});

} // namespace crowdnet::graph
