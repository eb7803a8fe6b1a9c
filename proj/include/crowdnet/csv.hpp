#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "crowdnet/date.hpp"

namespace crowdnet::csv
{

    /// Shortest decimal text that parses back to exactly `value`.
    std::string format_double(double value);

    /**
     * Line-oriented reader for the fixed-header CSV files used throughout.
     *
     * Lines starting with '#' (metadata) and blank lines are skipped. The first
     * remaining line must equal `header` exactly. Fields never contain commas
     * or quotes, so no quoting rules apply.
     */
    class Reader
    {
    public:
        Reader(const std::filesystem::path &path, std::string_view header);

        /// Advances to the next data row; false at end of file.
        bool next();

        const std::vector<std::string_view> &fields() const { return fields_; }
        std::size_t line() const { return line_no_; }
        const std::string &file() const { return name_; }

        std::string text(std::size_t i) const { return std::string(fields_.at(i)); }
        double number(std::size_t i) const;
        Date date(std::size_t i) const;

        [[noreturn]] void fail(const std::string &detail) const;

    private:
        std::ifstream in_;
        std::string name_;
        std::string buffer_;
        std::vector<std::string_view> fields_;
        std::size_t columns_ = 0;
        std::size_t line_no_ = 0;
    };

    class Writer
    {
    public:
        /// Opens `path` for writing, creating parent directories.
        explicit Writer(const std::filesystem::path &path);

        void comment(const std::string &text);
        void header(std::string_view text);
        void row(const std::vector<std::string> &fields);

    private:
        std::ofstream out_;
        std::string name_;
    };

} // namespace crowdnet::csv
