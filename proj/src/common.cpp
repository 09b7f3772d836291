#include "sesstat/common.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace sesstat {

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

int parse_int_field(std::string_view text, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw FormatError(std::string("invalid ") + what + " in date field");
    return value;
}

}  // namespace

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw FormatError("date must be YYYY-MM-DD, got '" + std::string(text) + "'");
    Date d;
    d.year = parse_int_field(text.substr(0, 4), "year");
    d.month = parse_int_field(text.substr(5, 2), "month");
    d.day = parse_int_field(text.substr(8, 2), "day");
    if (d.month < 1 || d.month > 12)
        throw FormatError("month out of range in '" + std::string(text) + "'");
    if (d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw FormatError("day out of range in '" + std::string(text) + "'");
    return d;
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

long Date::serial() const {
    // Howard Hinnant's civil-from-days inverse; proleptic Gregorian.
    int y = year;
    const int m = month;
    const int d = day;
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

Date Date::from_serial(long days) {
    long z = days + 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                static_cast<int>(d)};
}

int Date::weekday() const {
    long s = serial();
    return static_cast<int>(((s % 7) + 7 + 4) % 7);  // 1970-01-01 was a Thursday
}

Date Date::next_weekday() const {
    Date d = from_serial(serial() + 1);
    while (d.weekday() == 0 || d.weekday() == 6) d = from_serial(d.serial() + 1);
    return d;
}

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::total: return "total";
        case Kind::overnight: return "overnight";
        case Kind::daytime: return "daytime";
    }
    return "unknown";
}

Kind kind_from_string(std::string_view name) {
    if (name == "total") return Kind::total;
    if (name == "overnight") return Kind::overnight;
    if (name == "daytime") return Kind::daytime;
    throw ArgumentError("unknown kind '" + std::string(name) + "'");
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

std::size_t Rng::below(std::size_t bound) {
    if (bound == 0) throw ArgumentError("Rng::below requires a positive bound");
    return static_cast<std::size_t>(eng_() % bound);
}

}  // namespace sesstat
