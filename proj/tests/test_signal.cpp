#include <catch_amalgamated.hpp>

#include <algorithm>

#include "crowdnet/errors.hpp"
#include "crowdnet/signal.hpp"
#include "crowdnet/synth.hpp"

using namespace crowdnet;
using namespace crowdnet::signal;
using graph::CentralityKind;
using graph::CentralityVector;

namespace
{
    CentralityVector vec(CentralityKind kind, std::map<std::string, double> values)
    {
        CentralityVector v;
        v.kind = kind;
        v.values = std::move(values);
        return v;
    }

    // Every fund overweights A and underweights B against a 4-stock benchmark.
    ingest::HoldingsSnapshot crowded_a()
    {
        ingest::HoldingsSnapshot s;
        s.as_of = Date(2020, 3, 31);
        s.benchmark_weights = {{"A", 0.25}, {"B", 0.25}, {"C", 0.25}, {"D", 0.25}};
        for (const auto &[id, w] : s.benchmark_weights)
            s.market_caps[id] = 1e10;
        for (int f = 0; f < 5; ++f)
        {
            const auto fund = "F" + std::to_string(f);
            const double tilt = 0.01 * (f + 1);
            s.holdings.push_back({fund, "A", 0.25 + 2 * tilt});
            s.holdings.push_back({fund, "B", 0.25 - 2 * tilt});
            s.holdings.push_back({fund, "C", 0.25 + tilt / 2});
            s.holdings.push_back({fund, "D", 0.25 - tilt / 2});
        }
        s.canonicalize();
        return s;
    }
} // namespace

TEST_CASE("crowding score is over minus under")
{
    auto over = vec(CentralityKind::Degree, {{"A", 0.4}, {"C", 0.1}});
    auto under = vec(CentralityKind::Degree, {{"A", 0.1}, {"D", 0.2}});
    auto s = crowding_score(over, under, {"E", "D", "C", "A", "A"});
    CHECK(s.universe == std::vector<std::string>{"A", "C", "D", "E"});
    CHECK(s.score("A") == Catch::Approx(0.3).epsilon(1e-15));
    CHECK(s.score("C") == 0.1);
    CHECK(s.score("D") == -0.2);
    CHECK(s.score("E") == 0.0);
    CHECK(s.scores.size() == 4);
    CHECK(s.kind == CentralityKind::Degree);

    CHECK_THROWS_AS(crowding_score(over, vec(CentralityKind::Eigenvector, {}), {"A"}), KindMismatch);
}

TEST_CASE("swapping sides negates every score")
{
    auto over = vec(CentralityKind::Eigenvector, {{"A", 0.4}, {"C", 0.1}});
    auto under = vec(CentralityKind::Eigenvector, {{"A", 0.1}, {"D", 0.2}});
    auto s = crowding_score(over, under, {"A", "C", "D", "E"});
    auto t = crowding_score(under, over, {"A", "C", "D", "E"});
    for (const auto &[id, v] : s.scores)
        CHECK(t.score(id) == -v);
}

TEST_CASE("pipeline examples")
{
    for (auto kind : graph::kAllKinds)
    {
        auto s = score_pipeline(crowded_a(), kind, {"A", "B", "C", "D"});
        INFO(graph::to_string(kind));
        CHECK(s.score("A") > 0);
        CHECK(s.score("B") < 0);
    }
    ingest::HoldingsSnapshot empty;
    empty.as_of = Date(2020, 3, 31);
    auto z = score_pipeline(empty, CentralityKind::Eigenvector, {"A", "B"});
    CHECK(z.score("A") == 0.0);
    CHECK(z.score("B") == 0.0);
}

TEST_CASE("pipeline equals manual composition")
{
    synth::SynthConfig cfg;
    cfg.n_quarters = 1;
    auto data = synth::generate(cfg);
    const auto &snap = data.snapshots.front();
    const auto universe = snap.stock_ids();
    for (auto kind : graph::kAllKinds)
    {
        auto [over, under] = graph::build_split_graphs(snap);
        auto manual = crowding_score(graph::centrality(graph::median_filter(over), kind),
                                     graph::centrality(graph::median_filter(under), kind), universe);
        auto piped = score_pipeline(snap, kind, universe);
        CHECK(piped.scores == manual.scores);
        CHECK(piped.universe == manual.universe);
    }
}

TEST_CASE("adding an unheld stock to the universe adds a zero")
{
    auto snap = crowded_a();
    auto base = score_pipeline(snap, CentralityKind::Eigenvector, {"A", "B", "C", "D"});
    auto more = score_pipeline(snap, CentralityKind::Eigenvector, {"A", "B", "C", "D", "ZZ"});
    CHECK(more.score("ZZ") == 0.0);
    CHECK(more.scores.size() == base.scores.size() + 1);
    for (const auto &[id, v] : base.scores)
        CHECK(more.score(id) == v);
}

TEST_CASE("planted block occupies the top decile")
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        synth::SynthConfig cfg;
        cfg.seed = seed;
        cfg.n_quarters = 2;
        auto data = synth::generate(cfg);
        for (const auto &snap : data.snapshots)
        {
            auto s = score_pipeline(snap, CentralityKind::Eigenvector, snap.stock_ids());
            std::vector<std::pair<double, std::string>> order;
            for (const auto &[id, v] : s.scores)
                order.push_back({-v, id});
            std::sort(order.begin(), order.end());
            std::set<std::string> top;
            for (std::size_t i = 0; i < order.size() / 10; ++i)
                top.insert(order[i].second);
            for (const auto &id : data.planted_block)
                CHECK(top.contains(id));
        }
    }
}
