#include "prszz/support/timeparse.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace prszz::timeparse {

namespace {

std::optional<int> read_int(std::string_view s, std::size_t pos, std::size_t len) {
    if (pos + len > s.size())
        return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
    if (ec != std::errc{} || ptr != s.data() + pos + len)
        return std::nullopt;
    return value;
}

constexpr std::array<int, 12> kDaysBefore = {0,   31,  59,  90,  120, 151,
                                             181, 212, 243, 273, 304, 334};

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

std::int64_t days_from_civil(int year, int month, int day) {
    // Days since 1970-01-01.
    std::int64_t days = 0;
    for (int y = 1970; y < year; ++y)
        days += is_leap(y) ? 366 : 365;
    days += kDaysBefore[static_cast<std::size_t>(month - 1)];
    if (month > 2 && is_leap(year))
        ++days;
    days += day - 1;
    return days;
}

} // namespace

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|+HHMM)
    auto year = read_int(text, 0, 4);
    auto month = read_int(text, 5, 2);
    auto day = read_int(text, 8, 2);
    auto hour = read_int(text, 11, 2);
    auto minute = read_int(text, 14, 2);
    auto second = read_int(text, 17, 2);
    if (!year || !month || !day || !hour || !minute || !second)
        return std::nullopt;
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
        text[16] != ':')
        return std::nullopt;
    if (*month < 1 || *month > 12 || *day < 1 || *day > 31)
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    std::int64_t offset = 0;
    if (pos < text.size()) {
        char sign = text[pos];
        if (sign == 'Z') {
            // UTC
        } else if (sign == '+' || sign == '-') {
            auto oh = read_int(text, pos + 1, 2);
            std::optional<int> om;
            if (pos + 3 < text.size() && text[pos + 3] == ':')
                om = read_int(text, pos + 4, 2);
            else
                om = read_int(text, pos + 3, 2);
            if (!oh || !om)
                return std::nullopt;
            offset = std::int64_t(*oh) * 3600 + std::int64_t(*om) * 60;
            if (sign == '-')
                offset = -offset;
        } else {
            return std::nullopt;
        }
    }

    std::int64_t epoch = days_from_civil(*year, *month, *day) * 86400 +
                         std::int64_t(*hour) * 3600 + std::int64_t(*minute) * 60 +
                         *second;
    return epoch - offset;
}

std::string to_iso8601(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }

    int year = 1970;
    while (true) {
        int len = is_leap(year) ? 366 : 365;
        if (days >= len) {
            days -= len;
            ++year;
        } else {
            break;
        }
    }
    int month = 1;
    while (month < 12) {
        int next = kDaysBefore[static_cast<std::size_t>(month)];
        if (month >= 2 && is_leap(year))
            ++next;
        if (days >= next)
            ++month;
        else
            break;
    }
    int before = kDaysBefore[static_cast<std::size_t>(month - 1)];
    if (month > 2 && is_leap(year))
        ++before;
    int day = static_cast<int>(days) - before + 1;

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", year, month,
                  day, static_cast<int>(rem / 3600),
                  static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
    return buf;
}

} // namespace prszz::timeparse
