#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "crowdnet/graph.hpp"

namespace testing
{
    namespace fs = std::filesystem;

    /// Fresh scratch directory under CROWDNET_TEST_TMP (or the system temp dir).
    inline fs::path scratch(const std::string &name)
    {
        const char *base = std::getenv("CROWDNET_TEST_TMP");
        fs::path dir = (base ? fs::path(base) : fs::temp_directory_path() / "crowdnet_tests") / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }

    inline void write_text(const fs::path &path, const std::string &text)
    {
        fs::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << text;
    }

    inline std::string read_text(const fs::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    inline std::string fund(std::size_t i) { return "F" + std::to_string(100 + i); }
    inline std::string stock(std::size_t i) { return "S" + std::to_string(100 + i); }

    /**
     * Connected bipartite graph: a random spanning tree over `funds` + `stocks`
     * nodes plus `extra` random edges, weights uniform in (0, 1].
     */
    inline crowdnet::graph::CrowdGraph random_connected(std::mt19937_64 &rng, std::size_t funds, std::size_t stocks,
                                                        std::size_t extra)
    {
        std::uniform_real_distribution<double> weight(0.0, 1.0);
        std::set<std::pair<std::size_t, std::size_t>> pairs;
        // tree: node order fund0, stock0, then a shuffled mix; each new node
        // attaches to an already placed node of the other type
        std::vector<std::pair<bool, std::size_t>> order;
        for (std::size_t i = 1; i < funds; ++i)
            order.push_back({true, i});
        for (std::size_t j = 1; j < stocks; ++j)
            order.push_back({false, j});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::size_t> placed_f{0}, placed_s{0};
        pairs.insert({0, 0});
        for (auto [is_fund, idx] : order)
        {
            if (is_fund)
            {
                pairs.insert({idx, placed_s[rng() % placed_s.size()]});
                placed_f.push_back(idx);
            }
            else
            {
                pairs.insert({placed_f[rng() % placed_f.size()], idx});
                placed_s.push_back(idx);
            }
        }
        for (std::size_t k = 0; k < extra; ++k)
            pairs.insert({rng() % funds, rng() % stocks});

        std::vector<std::tuple<std::string, std::string, double>> edges;
        for (auto [f, s] : pairs)
            edges.emplace_back(fund(f), stock(s), 1.0 - weight(rng));
        return crowdnet::graph::CrowdGraph::from_edges(crowdnet::graph::Side::Overweight, edges);
    }
} // namespace testing
