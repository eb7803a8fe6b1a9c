#pragma once

#include <map>
#include <string>
#include <vector>

#include "crowdnet/graph.hpp"
#include "crowdnet/ingest.hpp"

namespace crowdnet::signal
{

    /// Per-stock crowding score for one quarter: over-graph minus under-graph centrality.
    struct CrowdingScores
    {
        Date as_of;
        graph::CentralityKind kind = graph::CentralityKind::Eigenvector;
        std::map<std::string, double> scores;
        std::vector<std::string> universe; // sorted

        double score(const std::string &stock_id) const;
    };

    /// Throws KindMismatch when the two vectors were computed with different kinds.
    CrowdingScores crowding_score(const graph::CentralityVector &over, const graph::CentralityVector &under,
                                  std::vector<std::string> universe);

    /// Centralities of both median-filtered sides, kept for dumps and diagnostics.
    struct ScoreDetail
    {
        CrowdingScores scores;
        graph::CentralityVector over;
        graph::CentralityVector under;
    };

    ScoreDetail score_pipeline_detail(const ingest::HoldingsSnapshot &snapshot, graph::CentralityKind kind,
                                      std::vector<std::string> universe, const graph::EigenOptions &options = {});

    CrowdingScores score_pipeline(const ingest::HoldingsSnapshot &snapshot, graph::CentralityKind kind,
                                  std::vector<std::string> universe, const graph::EigenOptions &options = {});

} // namespace crowdnet::signal
