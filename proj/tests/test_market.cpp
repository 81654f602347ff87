#include "oracles.hpp"

#include "volresp/errors.hpp"
#include "volresp/market.hpp"

#include <doctest.h>

#include <cmath>

using namespace volresp;
using doctest::Approx;

namespace {

std::vector<double> summed(const std::vector<std::vector<double>>& r) {
    std::vector<double> m(r.front().size(), 0.0);
    for (const auto& s : r)
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += s[i];
    return m;
}

Date day(const char* iso) { return *parse_date(iso); }

}  // namespace

TEST_CASE("portfolio return") {
    oracle::Source src(1);
    const auto a = src.normals(50);
    const auto one = oracle::universe({a});
    const auto m1 = portfolio_return(one);
    CHECK(m1.ticker() == kMarketTicker);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(m1.values()[i] == a[i]);

    std::vector<double> neg(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
    const auto flat = portfolio_return(oracle::universe({a, neg}));
    for (double v : flat.values()) CHECK(v == 0.0);

    const std::vector<std::vector<double>> three{src.normals(50), src.normals(50), src.normals(50)};
    const auto m3 = portfolio_return(oracle::universe(three));
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(m3.values()[i] == Approx(three[0][i] + three[1][i] + three[2][i]).epsilon(1e-15));
}

TEST_CASE("universe validation") {
    oracle::Source src(2);
    const auto cal = oracle::weekdays(10);
    const auto other = oracle::weekdays(11);
    CHECK_THROWS_AS(Universe(std::vector<ReturnSeries>{}), InputError);
    CHECK_THROWS_AS(Universe({ReturnSeries("A", cal, src.normals(10)), ReturnSeries("A", cal, src.normals(10))}),
                    InputError);
    const auto shifted = std::make_shared<const TradingCalendar>(other->drop_front(1));
    CHECK_THROWS_AS(Universe({ReturnSeries("A", cal, src.normals(10)), ReturnSeries("B", shifted, src.normals(10))}),
                    AlignmentError);
    const auto u = oracle::universe({src.normals(10), src.normals(10)});
    const auto s = u.slice(2, 5);
    CHECK(s.length() == 5);
    CHECK(s.calendar().front() == u.calendar()[2]);
    CHECK(s[1].values()[0] == u[1].values()[2]);
}

TEST_CASE("covariance matrix") {
    oracle::Source src(3);
    const auto a = src.normals(80);
    const auto same = covariance_matrix(oracle::universe({a, a, a}), 60, 30);
    const double var = cross_covariance(a, a, 60, 0, 30);
    for (double e : same.entries) CHECK(e == var);

    const std::vector<std::vector<double>> r{oracle::clustered(src, 80), oracle::clustered(src, 80),
                                             oracle::clustered(src, 80)};
    const auto u = oracle::universe(r);
    const auto c = covariance_matrix(u, 70, 40);
    REQUIRE(c.n == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(c(i, i) == Approx(std::pow(volatility(r[i], 70, 40), 2)).epsilon(1e-13));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(c(i, j) == c(j, i));
            CHECK(c(i, j) == Approx(oracle::cov(r[i], r[j], 70, 0, 40)).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS((void)covariance_matrix(u, 10, 40), OutOfRangeError);
}

TEST_CASE("covariance factorization through the correlation matrix") {
    oracle::Source src(4);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 6;
        std::vector<std::vector<double>> r;
        for (std::size_t i = 0; i < n; ++i) r.push_back(oracle::clustered(src, 120));
        const auto c = covariance_matrix(oracle::universe(r), 110, 60);
        std::vector<double> sd(n);
        for (std::size_t i = 0; i < n; ++i) sd[i] = volatility(r[i], 110, 60);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double rho = cross_correlation(r[i], r[j], 110, 0, 60);
                CHECK(sd[i] * rho * sd[j] == Approx(c(i, j)).epsilon(1e-9));
            }
        }
        // Positive semi-definite: v' C v >= 0 for random directions.
        for (int k = 0; k < 10; ++k) {
            const auto v = src.normals(n);
            double q = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) q += v[i] * c(i, j) * v[j];
            CHECK(q >= -1e-12);
        }
    }
}

TEST_CASE("market volatility") {
    oracle::Source src(5);
    const auto a = oracle::clustered(src, 200);
    CHECK(market_volatility(oracle::universe({a}), 150, 30) == Approx(volatility(a, 150, 30)).epsilon(1e-14));
    CHECK(market_volatility(oracle::universe({a, a}), 150, 30) == 2.0 * volatility(a, 150, 30));
    CHECK(market_volatility(oracle::universe({std::vector<double>(200, 0.001)}), 150, 30) == 0.0);

    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::vector<double>> r;
        for (int i = 0; i < 5; ++i) r.push_back(oracle::clustered(src, 200));
        const auto u = oracle::universe(r);
        const auto t = static_cast<std::size_t>(src.integer(89, 199));
        const double direct = oracle::stdev(summed(r), t, 90);
        CHECK(market_volatility(u, t, 90) == Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("market volatility series matches pointwise evaluation") {
    oracle::Source src(6);
    std::vector<std::vector<double>> r;
    for (int i = 0; i < 4; ++i) r.push_back(oracle::clustered(src, 120));
    const auto u = oracle::universe(r);
    const auto s = market_volatility_series(u, 30);
    CHECK(s.first_valid_index == 29);
    CHECK(s.end_index() == 120);
    for (std::size_t t = 29; t < 120; ++t) CHECK(s.at(t) == market_volatility(u, t, 30));
}

TEST_CASE("alignment of price histories") {
    TickerHistory a{"A", {{day("2020-01-02"), 10}, {day("2020-01-03"), 11}, {day("2020-01-06"), 12}}};
    TickerHistory b{"B", {{day("2020-01-06"), 5}, {day("2020-01-02"), 4}}};

    SUBCASE("strict alignment drops the incomplete ticker") {
        const auto out = align_histories({a, b});
        REQUIRE(out.series.size() == 1);
        CHECK(out.series[0].ticker() == "A");
        REQUIRE(out.report.dropped_tickers.size() == 1);
        CHECK(out.report.dropped_tickers[0].ticker == "B");
    }
    SUBCASE("tolerant alignment intersects dates without filling") {
        const auto out = align_histories({a, b}, 0.5);
        REQUIRE(out.series.size() == 2);
        CHECK(out.series[0].size() == 2);
        CHECK(out.series[1].values()[0] == 4);
        CHECK(out.series[1].values()[1] == 5);
        CHECK(out.series[0].values()[1] == 12);
        REQUIRE(out.report.dropped_dates.size() == 1);
        CHECK(out.report.dropped_dates[0] == day("2020-01-03"));
    }
    SUBCASE("disjoint dates are fatal") {
        TickerHistory c{"C", {{day("2021-01-04"), 1}, {day("2021-01-05"), 1}}};
        CHECK_THROWS_AS((void)align_histories({a, c}, 0.9), AlignmentError);
    }
    SUBCASE("duplicate dates are rejected") {
        TickerHistory d{"D", {{day("2020-01-02"), 1}, {day("2020-01-02"), 2}}};
        CHECK_THROWS_AS((void)align_histories({d}), InputError);
    }
}
