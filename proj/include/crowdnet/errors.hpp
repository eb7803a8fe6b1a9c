#pragma once

#include <stdexcept>
#include <string>

namespace crowdnet
{

    /**
     * Base class of every typed failure raised by the library.
     *
     * `code()` is the machine-readable error name (e.g. "BadWeight"); the
     * what() string carries the human-readable context, including file and
     * line when the error came from an input file.
     */
    class Error : public std::runtime_error
    {
    public:
        Error(std::string code, const std::string &message)
            : std::runtime_error(code + ": " + message), code_(std::move(code))
        {
        }

        const std::string &code() const noexcept { return code_; }

    private:
        std::string code_;
    };

    /// Input file cannot be opened, read or written.
    class IoError : public Error
    {
    public:
        explicit IoError(const std::string &message) : Error("IoError", message) {}
    };

    /// Malformed row, wrong header, unparsable field.
    class SchemaError : public Error
    {
    public:
        SchemaError(const std::string &file, std::size_t line, const std::string &detail)
            : Error("SchemaError", file + ":" + std::to_string(line) + ": " + detail), line_(line)
        {
        }

        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class MissingMarketCap : public Error
    {
    public:
        explicit MissingMarketCap(const std::string &stock_id)
            : Error("MissingMarketCap", "no market cap for stock '" + stock_id + "'"), stock_id(stock_id)
        {
        }
        MissingMarketCap(const std::string &stock_id, const std::string &context)
            : Error("MissingMarketCap", "no market cap for stock '" + stock_id + "' (" + context + ")"),
              stock_id(stock_id)
        {
        }
        std::string stock_id;
    };

    class BadWeight : public Error
    {
    public:
        BadWeight(const std::string &fund_id, const std::string &stock_id, double value, const std::string &context = {})
            : Error("BadWeight", (context.empty() ? std::string() : context + ": ") + "fund '" + fund_id + "' stock '" +
                                     stock_id + "' weight " + std::to_string(value)),
              fund_id(fund_id), stock_id(stock_id), value(value)
        {
        }
        std::string fund_id;
        std::string stock_id;
        double value;
    };

    /// Benchmark weights that do not sum to one, or out-of-range caps.
    class InvalidSnapshot : public Error
    {
    public:
        explicit InvalidSnapshot(const std::string &message) : Error("InvalidSnapshot", message) {}
    };

    class DuplicateKey : public Error
    {
    public:
        DuplicateKey(const std::string &key, const std::string &date, const std::string &context = {})
            : Error("DuplicateKey", (context.empty() ? std::string() : context + ": ") + "duplicate row for (" + key +
                                        ", " + date + ")")
        {
        }
    };

    class NonPositiveLog : public Error
    {
    public:
        explicit NonPositiveLog(double cap)
            : Error("NonPositiveLog", "market cap " + std::to_string(cap) + " has ln(cap) <= 0")
        {
        }
    };

    class EmptyGraph : public Error
    {
    public:
        EmptyGraph() : Error("EmptyGraph", "eigenvector centrality needs at least one edge") {}
    };

    class KindMismatch : public Error
    {
    public:
        explicit KindMismatch(const std::string &message) : Error("KindMismatch", message) {}
    };

    class UniverseTooSmall : public Error
    {
    public:
        UniverseTooSmall(std::size_t have, std::size_t need)
            : Error("UniverseTooSmall",
                    "universe has " + std::to_string(have) + " stocks, need at least " + std::to_string(need))
        {
        }
    };

    class MissingFactors : public Error
    {
    public:
        MissingFactors(const std::string &stock_id, const std::string &date)
            : Error("MissingFactors", "no factor loadings for stock '" + stock_id + "' at " + date), stock_id(stock_id)
        {
        }
        std::string stock_id;
    };

    class Infeasible : public Error
    {
    public:
        explicit Infeasible(const std::string &message) : Error("Infeasible", message) {}
    };

    class NotQuarterEnd : public Error
    {
    public:
        explicit NotQuarterEnd(const std::string &date) : Error("NotQuarterEnd", date + " is not a calendar quarter end") {}
    };

    class MissingReturns : public Error
    {
    public:
        MissingReturns(const std::string &stock_id, const std::string &date)
            : Error("MissingReturns", "no return for '" + stock_id + "' at " + date), stock_id(stock_id)
        {
        }
        std::string stock_id;
    };

    class DegenerateSeries : public Error
    {
    public:
        explicit DegenerateSeries(const std::string &message) : Error("DegenerateSeries", message) {}
    };

    class RankDeficient : public Error
    {
    public:
        explicit RankDeficient(const std::string &message) : Error("RankDeficient", message) {}
    };

    class BadConfig : public Error
    {
    public:
        explicit BadConfig(const std::string &message) : Error("BadConfig", message) {}
    };

} // namespace crowdnet
