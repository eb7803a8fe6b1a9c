#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace crowdnet
{

    /// Calendar date at day resolution, ISO-8601 on the wire.
    class Date
    {
    public:
        Date() = default;
        explicit Date(std::chrono::sys_days days) : days_(days) {}
        Date(int year, unsigned month, unsigned day);

        /// Parses YYYY-MM-DD; nullopt on anything else (including invalid days).
        static std::optional<Date> parse(std::string_view text);

        std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
        std::chrono::sys_days days() const { return days_; }
        int serial() const { return static_cast<int>(days_.time_since_epoch().count()); }

        bool is_month_end() const;
        bool is_quarter_end() const;

        /// Last day of the month `months` calendar months after this date's month.
        Date month_end_after(int months) const;

        std::string iso() const;

        auto operator<=>(const Date &) const = default;

    private:
        std::chrono::sys_days days_{};
    };

    /// Whole calendar months from a's month to b's month (b - a).
    int months_between(const Date &a, const Date &b);

} // namespace crowdnet

template <>
struct std::hash<crowdnet::Date>
{
    std::size_t operator()(const crowdnet::Date &d) const noexcept { return std::hash<int>{}(d.serial()); }
};
