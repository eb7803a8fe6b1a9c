#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crowdnet/date.hpp"
#include "crowdnet/ingest.hpp"

namespace crowdnet::synth
{

    /**
     * Synthetic market with a planted crowded block of stocks.
     *
     * Every fund holds the benchmark plus Gaussian active-weight noise of
     * standard deviation `noise_scale`. For each block stock a fund adds an
     * extra overweight with probability intensity / (intensity + noise_scale)
     * and mean size `crowd_intensity`. Fund weights are floored at zero and
     * renormalized to sum to one.
     *
     * Monthly returns follow a one-factor market model with small style-factor
     * returns. Block stocks carry a slight negative drift and a negative
     * loading on the squared market return. When `crash_quarter` is set, the
     * month after that quarter's construction date is a crash: the market
     * factor falls by 40% of |crash_magnitude| and block stocks additionally
     * draw negatively skewed shocks with mean `crash_magnitude`.
     *
     * Factor loadings are drawn independently of block membership.
     */
    struct SynthConfig
    {
        std::size_t n_funds = 50;
        std::size_t n_stocks = 300;
        std::size_t n_quarters = 16;
        std::size_t crowded_block_size = 15;
        double crowd_intensity = 0.02;
        double noise_scale = 0.002;
        std::optional<std::size_t> crash_quarter;
        double crash_magnitude = -0.25;
        std::uint64_t seed = 42;
        Date start{2014, 3, 31}; // first holdings quarter end
        int lag_months = 2;

        /// Throws BadConfig when an invariant fails.
        void validate() const;
    };

    struct SynthData
    {
        std::vector<ingest::HoldingsSnapshot> snapshots;
        ingest::ReturnsPanel panel;
        std::vector<std::string> planted_block; // sorted stock ids
        std::optional<Date> crash_month;
    };

    SynthData generate(const SynthConfig &config);

    /// Writes the ingest file set under `dir` plus planted.csv (`stock_id`) with the block.
    void write_dataset(const SynthData &data, const std::filesystem::path &dir);

    /// Reads the planted block back from planted.csv.
    std::vector<std::string> read_planted(const std::filesystem::path &dir);

    /**
     * Reads `key = value` lines (a flat TOML subset: integers, floats, quoted
     * strings, '#' comments). Keys mirror SynthConfig fields; `start` takes an
     * ISO date. Missing keys keep their defaults. Throws BadConfig on unknown
     * keys or malformed values, IoError if the file cannot be read.
     */
    SynthConfig load_synth_config(const std::filesystem::path &path);
    SynthConfig parse_synth_config(const std::string &text);

    /// The config as `key = value` text, accepted by parse_synth_config.
    std::string to_toml(const SynthConfig &config);

} // namespace crowdnet::synth
