#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "crowdnet/csv.hpp"
#include "crowdnet/errors.hpp"
#include "crowdnet/synth.hpp"

namespace crowdnet::synth
{
    SynthConfig parse_synth_config(const std::string &text)
    {
        SynthConfig c;
        std::optional<std::size_t> crash_quarter;
        std::string start = c.start.iso();

        // keys are read through CLI11's TOML config reader; each key is an option of the same name
        CLI::App reader;
        reader.allow_config_extras(CLI::config_extras_mode::error);
        reader.add_option("--n_funds", c.n_funds);
        reader.add_option("--n_stocks", c.n_stocks);
        reader.add_option("--n_quarters", c.n_quarters);
        reader.add_option("--crowded_block_size", c.crowded_block_size);
        reader.add_option("--crowd_intensity", c.crowd_intensity);
        reader.add_option("--noise_scale", c.noise_scale);
        reader.add_option("--crash_quarter", crash_quarter);
        reader.add_option("--crash_magnitude", c.crash_magnitude);
        reader.add_option("--seed", c.seed);
        reader.add_option("--start", start);
        reader.add_option("--lag_months", c.lag_months);
        try
        {
            std::istringstream in(text);
            reader.parse_from_stream(in);
        }
        catch (const CLI::Error &e)
        {
            throw BadConfig(e.what());
        }

        auto d = Date::parse(start);
        if (!d)
            throw BadConfig("key 'start': not an ISO date: " + start);
        c.start = *d;
        c.crash_quarter = crash_quarter;
        c.validate();
        return c;
    }

    SynthConfig load_synth_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        return parse_synth_config(text.str());
    }

    std::string to_toml(const SynthConfig &c)
    {
        std::ostringstream out;
        out << "n_funds = " << c.n_funds << '\n'
            << "n_stocks = " << c.n_stocks << '\n'
            << "n_quarters = " << c.n_quarters << '\n'
            << "crowded_block_size = " << c.crowded_block_size << '\n'
            << "crowd_intensity = " << csv::format_double(c.crowd_intensity) << '\n'
            << "noise_scale = " << csv::format_double(c.noise_scale) << '\n';
        if (c.crash_quarter)
            out << "crash_quarter = " << *c.crash_quarter << '\n';
        out << "crash_magnitude = " << csv::format_double(c.crash_magnitude) << '\n'
            << "seed = " << c.seed << '\n'
            << "start = \"" << c.start.iso() << "\"\n"
            << "lag_months = " << c.lag_months << '\n';
        return out.str();
    }

} // namespace crowdnet::synth
