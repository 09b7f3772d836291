#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sesstat {

inline constexpr std::string_view version = "0.1.0";

// Base type for everything this library throws on its own behalf.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files: bad header, duplicate (ticker,date) rows.
struct FormatError : Error {
    using Error::Error;
};

// Parameter outside its documented domain.
struct ArgumentError : Error {
    using Error::Error;
};

// Not enough data to run the requested analysis.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Input is technically valid but has no usable signal
// (all-equal tail sample, zero variance, all-zero fluctuations).
struct DegenerateError : Error {
    using Error::Error;
};

// Calendar day. Comparison is plain (year, month, day) ordering; no
// exchange-holiday logic anywhere, a "trading day" is simply a retained row.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    // Strict ISO-8601 "YYYY-MM-DD"; throws FormatError on anything else.
    static Date parse(std::string_view text);

    std::string str() const;

    // Days since 1970-01-01 (negative before).
    long serial() const;
    static Date from_serial(long days);

    // 0 = Sunday ... 6 = Saturday.
    int weekday() const;

    // Following Monday..Friday day (used by the synthetic calendar).
    Date next_weekday() const;
};

// Which of the three per-day sessions a series belongs to.
enum class Kind { total, overnight, daytime };

std::string_view to_string(Kind kind);
Kind kind_from_string(std::string_view name);

// Seedable generator used for every random draw in the project:
// mt19937_64 driving an explicit 53-bit open-interval uniform and a
// Box-Muller gaussian, so streams are reproducible bit for bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gaussian();

    // Uniform integer in [0, bound); bound must be positive.
    std::size_t below(std::size_t bound);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sesstat
