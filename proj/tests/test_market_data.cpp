#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "sesstat/market_data.hpp"

using namespace sesstat;

TEST_CASE("date parsing is strict ISO-8601") {
    Date d = Date::parse("2007-12-31");
    CHECK(d.year == 2007);
    CHECK(d.month == 12);
    CHECK(d.day == 31);
    CHECK(d.str() == "2007-12-31");

    CHECK(Date::parse("2004-02-29") == Date{2004, 2, 29});  // leap year
    CHECK_THROWS_AS(Date::parse("2005-02-29"), FormatError);
    CHECK_THROWS_AS(Date::parse("2005-13-01"), FormatError);
    CHECK_THROWS_AS(Date::parse("2005-00-10"), FormatError);
    CHECK_THROWS_AS(Date::parse("2005-04-31"), FormatError);
    CHECK_THROWS_AS(Date::parse("20051231"), FormatError);
    CHECK_THROWS_AS(Date::parse("2005/12/31"), FormatError);
    CHECK_THROWS_AS(Date::parse("2005-1-31"), FormatError);
    CHECK_THROWS_AS(Date::parse(""), FormatError);
}

TEST_CASE("date serial round-trips and orders") {
    CHECK(Date{1970, 1, 1}.serial() == 0);
    CHECK(Date{1970, 1, 2}.serial() == 1);
    CHECK(Date{1969, 12, 31}.serial() == -1);
    for (long s : {-200000L, -1L, 0L, 1L, 10000L, 200000L}) {
        Date d = Date::from_serial(s);
        CHECK(d.serial() == s);
    }
    CHECK(Date{1988, 1, 4} < Date{1988, 1, 5});
    CHECK(Date{1987, 12, 31} < Date{1988, 1, 1});
}

TEST_CASE("weekday and next_weekday skip weekends") {
    CHECK(Date{1970, 1, 1}.weekday() == 4);   // Thursday
    CHECK(Date{2007, 12, 31}.weekday() == 1);  // Monday
    CHECK(Date{1988, 1, 4}.weekday() == 1);    // Monday
    CHECK(Date{1988, 1, 8}.next_weekday() == Date{1988, 1, 11});  // Fri -> Mon
    CHECK(Date{1988, 1, 4}.next_weekday() == Date{1988, 1, 5});
}

TEST_CASE("header plus zero rows parses to nothing") {
    auto result = parse_price_csv(std::string("ticker,date,open,close\n"));
    CHECK(result.series.empty());
    CHECK(result.skipped.empty());
    CHECK(result.issues.empty());
}

TEST_CASE("single data row yields one bar with default split factor") {
    auto result = parse_price_csv(std::string("ticker,date,open,close\n"
                                              "AA,2007-12-31,36.50,36.55\n"));
    REQUIRE(result.series.size() == 1);
    const PriceSeries& s = result.series[0];
    CHECK(s.ticker == "AA");
    REQUIRE(s.bars.size() == 1);
    CHECK(s.bars[0].date == Date{2007, 12, 31});
    CHECK(s.bars[0].open == doctest::Approx(36.50));
    CHECK(s.bars[0].close == doctest::Approx(36.55));
    CHECK(s.bars[0].split_factor == 1.0);
}

TEST_CASE("rows are grouped by ticker and sorted by date") {
    auto result = parse_price_csv(std::string(
        "ticker,date,open,close\n"
        "IBM,1990-03-02,10,11\n"
        "AA,1990-03-01,5,6\n"
        "IBM,1990-03-01,9,10\n"
        "AA,1990-03-02,6,7\n"));
    REQUIRE(result.series.size() == 2);
    CHECK(result.series[0].ticker == "AA");
    CHECK(result.series[1].ticker == "IBM");
    REQUIRE(result.series[1].bars.size() == 2);
    CHECK(result.series[1].bars[0].date == Date{1990, 3, 1});
    CHECK(result.series[1].bars[1].date == Date{1990, 3, 2});
}

TEST_CASE("split_factor column is honored when present") {
    auto result = parse_price_csv(std::string(
        "ticker,date,open,close,split_factor\n"
        "AA,1999-05-10,100,101,1.0\n"
        "AA,1999-05-11,50.5,51,2.0\n"));
    REQUIRE(result.series.size() == 1);
    CHECK(result.series[0].bars[1].split_factor == doctest::Approx(2.0));
}

TEST_CASE("bad rows are skipped, tallied, and reported") {
    auto result = parse_price_csv(std::string(
        "ticker,date,open,close\n"
        "AA,1990-03-01,-1.0,6\n"     // non-positive price
        "AA,1990-03-02,5,6\n"
        "AA,1990-03-03,,6\n"          // missing open
        "AA,1990-03-04,5,6\n"
        "AA,not-a-date,5,6\n"         // unusable date
        "AA,1990-03-05,5,abc\n"));    // unparseable close
    REQUIRE(result.series.size() == 1);
    CHECK(result.series[0].bars.size() == 2);
    CHECK(result.skipped.at("AA") == 4);
    CHECK(result.issues.size() == 4);
    // Only rows with a readable date can feed gap detection.
    REQUIRE(result.series[0].dropped_dates.size() == 3);
    CHECK(result.series[0].dropped_dates[0] == Date{1990, 3, 1});
    CHECK(result.series[0].dropped_dates[1] == Date{1990, 3, 3});
    CHECK(result.series[0].dropped_dates[2] == Date{1990, 3, 5});
}

TEST_CASE("duplicate ticker-date pair is a hard error naming the collision") {
    const std::string text =
        "ticker,date,open,close\n"
        "AA,1990-03-01,5,6\n"
        "AA,1990-03-01,7,8\n";
    CHECK_THROWS_WITH_AS(parse_price_csv(text),
                         doctest::Contains("AA"), FormatError);
    try {
        parse_price_csv(text);
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("1990-03-01") != std::string::npos);
    }
}

TEST_CASE("malformed header is a hard error") {
    CHECK_THROWS_AS(parse_price_csv(std::string("symbol,day,open,close\nAA,1990-03-01,5,6\n")),
                    FormatError);
    CHECK_THROWS_AS(parse_price_csv(std::string("")), FormatError);
}

TEST_CASE("BOM and CRLF input parses cleanly") {
    std::string text = "\xEF\xBB\xBFticker,date,open,close\r\nAA,1990-03-01,5,6\r\n";
    auto result = parse_price_csv(text);
    REQUIRE(result.series.size() == 1);
    CHECK(result.series[0].bars.size() == 1);
    CHECK(result.issues.empty());
}

TEST_CASE("parsing identical bytes is deterministic") {
    const std::string text =
        "ticker,date,open,close\n"
        "B,1990-03-01,5,6\n"
        "A,1990-03-02,6,7\n"
        "A,1990-03-01,9,10\n";
    auto r1 = parse_price_csv(text);
    auto r2 = parse_price_csv(text);
    REQUIRE(r1.series.size() == r2.series.size());
    for (std::size_t i = 0; i < r1.series.size(); ++i) {
        CHECK(r1.series[i].ticker == r2.series[i].ticker);
        REQUIRE(r1.series[i].bars.size() == r2.series[i].bars.size());
        for (std::size_t j = 0; j < r1.series[i].bars.size(); ++j) {
            CHECK(r1.series[i].bars[j].date == r2.series[i].bars[j].date);
            CHECK(r1.series[i].bars[j].open == r2.series[i].bars[j].open);
            CHECK(r1.series[i].bars[j].close == r2.series[i].bars[j].close);
        }
    }
}

namespace {

PriceSeries make_series(std::initializer_list<PriceBar> bars) {
    PriceSeries s;
    s.ticker = "T";
    s.bars = bars;
    return s;
}

}  // namespace

TEST_CASE("split adjustment with no splits is the identity") {
    auto s = make_series({{Date{2000, 1, 3}, 10, 11, 1.0}, {Date{2000, 1, 4}, 11, 12, 1.0}});
    auto adj = apply_split_adjustment(s);
    CHECK(adj.bars[0].open == 10.0);
    CHECK(adj.bars[1].close == 12.0);
}

TEST_CASE("a 2-for-1 split halves earlier prices only") {
    auto s = make_series({{Date{2000, 1, 3}, 99, 100, 1.0},
                          {Date{2000, 1, 4}, 50, 51, 2.0},
                          {Date{2000, 1, 5}, 51, 52, 1.0}});
    auto adj = apply_split_adjustment(s);
    CHECK(adj.bars[0].open == doctest::Approx(49.5));
    CHECK(adj.bars[0].close == doctest::Approx(50.0));
    CHECK(adj.bars[1].open == 50.0);   // on the split date: unchanged
    CHECK(adj.bars[2].close == 52.0);  // after: unchanged
    for (const auto& bar : adj.bars) CHECK(bar.split_factor == 1.0);
}

TEST_CASE("multiple splits compound") {
    auto s = make_series({{Date{2000, 1, 3}, 60, 60, 1.0},
                          {Date{2000, 1, 4}, 30, 30, 2.0},
                          {Date{2000, 1, 5}, 10, 10, 3.0}});
    auto adj = apply_split_adjustment(s);
    CHECK(adj.bars[0].open == doctest::Approx(10.0));  // 60 / (2*3)
    CHECK(adj.bars[1].open == doctest::Approx(10.0));  // 30 / 3
    CHECK(adj.bars[2].open == doctest::Approx(10.0));
}

TEST_CASE("split adjustment is idempotent once factors are 1") {
    auto s = make_series({{Date{2000, 1, 3}, 100, 100, 1.0},
                          {Date{2000, 1, 4}, 50, 50, 2.0}});
    auto once = apply_split_adjustment(s);
    auto twice = apply_split_adjustment(once);
    for (std::size_t i = 0; i < once.bars.size(); ++i) {
        CHECK(once.bars[i].open == twice.bars[i].open);
        CHECK(once.bars[i].close == twice.bars[i].close);
    }
}

TEST_CASE("same-day open/close ratios survive split adjustment") {
    auto s = make_series({{Date{2000, 1, 3}, 80, 100, 1.0},
                          {Date{2000, 1, 4}, 50, 55, 2.0},
                          {Date{2000, 1, 5}, 56, 60, 1.0}});
    auto adj = apply_split_adjustment(s);
    for (std::size_t i = 0; i < s.bars.size(); ++i)
        CHECK(adj.bars[i].close / adj.bars[i].open ==
              doctest::Approx(s.bars[i].close / s.bars[i].open).epsilon(1e-12));
}

TEST_CASE("date filtering keeps the closed range") {
    auto s = make_series({{Date{1987, 6, 1}, 1, 2, 1.0},
                          {Date{1988, 1, 4}, 2, 3, 1.0},
                          {Date{2007, 12, 31}, 3, 4, 1.0},
                          {Date{2008, 2, 1}, 4, 5, 1.0}});
    s.dropped_dates = {Date{1987, 7, 1}, Date{1995, 5, 5}};

    auto mid = filter_date_range(s, Date{1988, 1, 1}, Date{2007, 12, 31});
    REQUIRE(mid.bars.size() == 2);
    CHECK(mid.bars.front().date == Date{1988, 1, 4});
    CHECK(mid.bars.back().date == Date{2007, 12, 31});
    REQUIRE(mid.dropped_dates.size() == 1);
    CHECK(mid.dropped_dates[0] == Date{1995, 5, 5});

    auto all = filter_date_range(s, Date{1980, 1, 1}, Date{2010, 1, 1});
    CHECK(all.bars.size() == s.bars.size());

    auto none = filter_date_range(s, Date{2010, 1, 1}, Date{2011, 1, 1});
    CHECK(none.bars.empty());

    CHECK_THROWS_AS(filter_date_range(s, Date{2001, 1, 1}, Date{2000, 1, 1}),
                    ArgumentError);
}

TEST_CASE("validate flags broken invariants") {
    auto ok = make_series({{Date{2000, 1, 3}, 10, 11, 1.0}, {Date{2000, 1, 4}, 11, 12, 1.0}});
    CHECK_NOTHROW(validate(ok));

    auto out_of_order = make_series({{Date{2000, 1, 4}, 10, 11, 1.0},
                                     {Date{2000, 1, 3}, 11, 12, 1.0}});
    CHECK_THROWS_AS(validate(out_of_order), FormatError);

    auto bad_price = make_series({{Date{2000, 1, 3}, 0.0, 11, 1.0}});
    CHECK_THROWS_AS(validate(bad_price), FormatError);
}
