#include "crowdnet/date.hpp"

#include <charconv>
#include <cstdio>

namespace crowdnet
{
    using namespace std::chrono;

    Date::Date(int y, unsigned m, unsigned d) : days_(sys_days{year{y} / month{m} / day{d}}) {}

    std::optional<Date> Date::parse(std::string_view text)
    {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-')
            return std::nullopt;
        auto field = [&](std::size_t pos, std::size_t len, int &out) {
            auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
            return ec == std::errc{} && p == text.data() + pos + len;
        };
        int y = 0, m = 0, d = 0;
        if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d))
            return std::nullopt;
        year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
        if (!ymd.ok())
            return std::nullopt;
        return Date{sys_days{ymd}};
    }

    bool Date::is_month_end() const
    {
        auto d = ymd();
        return d.day() == (d.year() / d.month() / last).day();
    }

    bool Date::is_quarter_end() const
    {
        return is_month_end() && static_cast<unsigned>(ymd().month()) % 3 == 0;
    }

    Date Date::month_end_after(int n) const
    {
        auto d = ymd();
        year_month ym = d.year() / d.month();
        ym += months{n};
        return Date{sys_days{ym / last}};
    }

    std::string Date::iso() const
    {
        auto d = ymd();
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                      static_cast<unsigned>(d.day()));
        return buf;
    }

    int months_between(const Date &a, const Date &b)
    {
        auto x = a.ymd();
        auto y = b.ymd();
        return (static_cast<int>(y.year()) - static_cast<int>(x.year())) * 12 +
               (static_cast<int>(static_cast<unsigned>(y.month())) - static_cast<int>(static_cast<unsigned>(x.month())));
    }

} // namespace crowdnet
