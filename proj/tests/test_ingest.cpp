#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "mfdma/ingest.hpp"

using namespace mfdma;

namespace {

PriceSeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_prices(in, "test.csv");
}

ErrorCode code_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Volatility, HandExamples) {
    auto v = volatility(parse("timestamp,close\n2015-01-05T09:30,100\n2015-01-05T09:31,100\n"));
    ASSERT_EQ(v.values.size(), 1u);
    EXPECT_EQ(v.values[0], 0.0);

    v = volatility(parse("timestamp,close\n2015-01-05T09:30,100\n2015-01-05T09:31,101\n"));
    EXPECT_NEAR(v.values[0], 0.009950330853168, 1e-15);

    v = volatility(parse("timestamp,close\n2015-01-05T09:30,101\n2015-01-05T09:31,100\n"));
    EXPECT_NEAR(v.values[0], 0.009950330853168, 1e-15);
}

TEST(Volatility, LengthAndScaleInvariance) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 0.001);
    std::vector<PriceRecord> a, b, c;
    double p = 2000.0;
    for (int i = 0; i < 500; ++i) {
        p *= std::exp(g(rng));
        a.push_back({"", i, p});
        b.push_back({"", i, 37.25 * p});
        c.push_back({"", i, 0.125 * p});
    }
    const auto va = volatility(PriceSeries(a));
    const auto vb = volatility(PriceSeries(b));
    const auto vc = volatility(PriceSeries(c));
    ASSERT_EQ(va.values.size(), 499u);
    for (std::size_t i = 0; i < 499; ++i) {
        EXPECT_GE(va.values[i], 0.0);
        EXPECT_NEAR(va.values[i], vb.values[i], 1e-12);
        EXPECT_EQ(va.values[i], vc.values[i]);  // power-of-two factor is exact
    }
}

TEST(Volatility, SessionGaps) {
    const std::string text =
        "timestamp,close\n"
        "2015-01-05T15:59,100\n"
        "2015-01-05T16:00,101\n"
        "2015-01-06T09:30,99\n"
        "2015-01-06T09:31,99.5\n";
    const auto kept = volatility(parse(text));
    EXPECT_EQ(kept.values.size(), 3u);
    EXPECT_EQ(kept.metadata.dropped_gaps, 0u);
    const auto dropped = volatility(parse(text), {"X", true});
    EXPECT_EQ(dropped.values.size(), 2u);
    EXPECT_EQ(dropped.metadata.dropped_gaps, 1u);
    EXPECT_EQ(dropped.metadata.instrument, "X");
    EXPECT_EQ(dropped.metadata.first_timestamp, "2015-01-05T15:59");
    EXPECT_EQ(dropped.metadata.last_timestamp, "2015-01-06T09:31");
    EXPECT_EQ(dropped.metadata.count, 2u);
}

TEST(Volatility, NeedsTwoRecords) {
    try {
        volatility(parse("timestamp,close\n2015-01-05T09:30,100\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
}

TEST(ParsePrices, AcceptedForms) {
    const auto p = parse(
        "\xEF\xBB\xBFtimestamp,close\r\n"
        "2016-02-29 23:59,1.5\r\n"
        "2016-03-01T00:00:00Z,1.6\r\n"
        "\n"
        "2016-03-01T00:01:00, 1.7 \r\n");
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p.records()[1].minute - p.records()[0].minute, 1);
    EXPECT_NE(p.records()[0].day(), p.records()[1].day());
    EXPECT_EQ(p.records()[2].close, 1.7);
}

TEST(ParsePrices, EpochMinutes) {
    std::int64_t m = 0;
    ASSERT_TRUE(parse_minute_timestamp("1970-01-01T00:00", m));
    EXPECT_EQ(m, 0);
    ASSERT_TRUE(parse_minute_timestamp("1970-01-02T00:01", m));
    EXPECT_EQ(m, 1441);
    ASSERT_TRUE(parse_minute_timestamp("1969-12-31T23:59", m));
    EXPECT_EQ(m, -1);
    EXPECT_FALSE(parse_minute_timestamp("2015-02-29T10:00", m));
    EXPECT_FALSE(parse_minute_timestamp("2015-01-05T24:00", m));
    EXPECT_FALSE(parse_minute_timestamp("2015-01-05T10:00:30", m));
    EXPECT_FALSE(parse_minute_timestamp("2015-1-5T10:00", m));
}

TEST(ParsePrices, Errors) {
    EXPECT_EQ(code_of("timestamp,close\n2015-01-05T09:30,abc\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of("time,price\n2015-01-05T09:30,1\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of(""), ErrorCode::ParseError);
    EXPECT_EQ(code_of("timestamp,close\n2015-01-05T09:30,1,2\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of("timestamp,close\nyesterday,1\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of("timestamp,close\n2015-01-05T09:31,1\n2015-01-05T09:30,1\n"), ErrorCode::UnsortedTimestamps);
    EXPECT_EQ(code_of("timestamp,close\n2015-01-05T09:30,1\n2015-01-05T09:30,1\n"), ErrorCode::UnsortedTimestamps);
    EXPECT_EQ(code_of("timestamp,close\n2015-01-05T09:30,0\n"), ErrorCode::NonPositivePrice);
    EXPECT_EQ(code_of("timestamp,close\n2015-01-05T09:30,-3\n"), ErrorCode::NonPositivePrice);
}

TEST(ParsePrices, ErrorNamesLine) {
    try {
        parse("timestamp,close\n2015-01-05T09:30,1\n\n2015-01-05T09:32,x1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("test.csv:4"), std::string::npos) << e.what();
    }
}

TEST(ReadPrices, MissingFile) {
    try {
        read_prices("/nonexistent/prices.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
}
