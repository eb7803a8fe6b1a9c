#include "crowdnet/signal.hpp"

#include <algorithm>

#include "crowdnet/errors.hpp"

namespace crowdnet::signal
{

    double CrowdingScores::score(const std::string &stock_id) const
    {
        auto it = scores.find(stock_id);
        return it == scores.end() ? 0.0 : it->second;
    }

    CrowdingScores crowding_score(const graph::CentralityVector &over, const graph::CentralityVector &under,
                                  std::vector<std::string> universe)
    {
        if (over.kind != under.kind)
            throw KindMismatch("over is " + std::string(graph::to_string(over.kind)) + ", under is " +
                               std::string(graph::to_string(under.kind)));
        std::sort(universe.begin(), universe.end());
        universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

        CrowdingScores out;
        out.kind = over.kind;
        for (const auto &id : universe)
            out.scores.emplace(id, over.value(id) - under.value(id));
        out.universe = std::move(universe);
        return out;
    }

    ScoreDetail score_pipeline_detail(const ingest::HoldingsSnapshot &snapshot, graph::CentralityKind kind,
                                      std::vector<std::string> universe, const graph::EigenOptions &options)
    {
        auto [over, under] = graph::build_split_graphs(snapshot);
        ScoreDetail detail;
        detail.over = graph::centrality(graph::median_filter(over), kind, options);
        detail.under = graph::centrality(graph::median_filter(under), kind, options);
        detail.scores = crowding_score(detail.over, detail.under, std::move(universe));
        detail.scores.as_of = snapshot.as_of;
        return detail;
    }

    CrowdingScores score_pipeline(const ingest::HoldingsSnapshot &snapshot, graph::CentralityKind kind,
                                  std::vector<std::string> universe, const graph::EigenOptions &options)
    {
        return score_pipeline_detail(snapshot, kind, std::move(universe), options).scores;
    }

} // namespace crowdnet::signal
