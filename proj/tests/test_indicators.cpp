#include "oracles.hpp"

#include "volresp/errors.hpp"
#include "volresp/indicators.hpp"
#include "volresp/parallel.hpp"
#include "volresp/synth.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>

using namespace volresp;
using doctest::Approx;

namespace {

AnalysisConfig small_config() {
    AnalysisConfig cfg;
    cfg.T = 10;
    cfg.M = 60;
    cfg.tau_max = 8;
    return cfg;
}

Universe clustered_universe(unsigned seed, std::size_t n, std::size_t length) {
    oracle::Source src(seed);
    std::vector<std::vector<double>> r;
    for (std::size_t i = 0; i < n; ++i) r.push_back(oracle::clustered(src, length));
    return oracle::universe(r);
}

AveragedLagProfile profile_from(std::vector<double> rho, std::size_t n = 71) {
    AveragedLagProfile p;
    p.tau_max = static_cast<int>(rho.size() / 2);
    p.n = n;
    p.counts.assign(rho.size(), n);
    p.rho_bar = std::move(rho);
    return p;
}

// A hump of height `peak` centred at `center` on [-tau_max, tau_max].
std::vector<double> hump(int tau_max, double center, double width, double peak) {
    std::vector<double> v;
    for (int tau = -tau_max; tau <= tau_max; ++tau) v.push_back(peak * std::exp(-std::pow((tau - center) / width, 2)));
    return v;
}

bool same_point(const IndicatorPoint& a, const IndicatorPoint& b) {
    return a.date == b.date && a.index == b.index && a.sigma_m == b.sigma_m && a.rho_max == b.rho_max &&
           a.rho_argmax_lag == b.rho_argmax_lag && a.rho_max_n == b.rho_max_n && a.re_peak == b.re_peak &&
           a.im_peak == b.im_peak && a.im_peak_omega == b.im_peak_omega && a.significant == b.significant &&
           a.regime == b.regime && a.rho_max_ci.has_value() == b.rho_max_ci.has_value() &&
           (!a.rho_max_ci || (a.rho_max_ci->low == b.rho_max_ci->low && a.rho_max_ci->high == b.rho_max_ci->high));
}

}  // namespace

TEST_CASE("config validation") {
    AnalysisConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.min_anchor_index() == 249 + 29 + 30);
    cfg.M = 30;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AnalysisConfig{};
    cfg.tau_max = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AnalysisConfig{};
    cfg.stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AnalysisConfig{};
    cfg.rho_threshold = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("argmax lag") {
    CHECK(argmax_lag(std::vector<double>{0.1, 0.5, 0.2}, 1) == 0);
    CHECK(argmax_lag(std::vector<double>{0.9, 0.5, 0.2}, 1) == -1);
    CHECK(argmax_lag(std::vector<double>{0.9, 0.1, 0.5, 0.1, 0.9}, 2) == -2);
    CHECK(argmax_lag(std::vector<double>{0.3, 0.9, 0.5, 0.9, 0.3}, 2) == -1);
    CHECK(argmax_lag(std::vector<double>{0.3, 0.8, 0.8, 0.8, 0.3}, 2) == 0);
    CHECK_THROWS_AS((void)argmax_lag(std::vector<double>{0.1, 0.2}, 1), AlignmentError);
}

TEST_CASE("regime classification") {
    const int tau_max = 30;
    const auto sym = profile_from(hump(tau_max, 0, 8, 0.8));
    const auto chi_sym = dft_susceptibility(sym);
    CHECK(classify_regime(sym, chi_sym, true) == RegimeLabel::Symmetric);
    CHECK(classify_regime(sym, chi_sym, false) == RegimeLabel::WeaklyCorrelated);

    const auto left = profile_from(hump(tau_max, -14, 8, 0.8));
    CHECK(classify_regime(left, dft_susceptibility(left), true) == RegimeLabel::StockLeadsMarket);
    const auto right = profile_from(hump(tau_max, 14, 8, 0.8));
    CHECK(classify_regime(right, dft_susceptibility(right), true) == RegimeLabel::MarketLeadsStock);

    // Peak at zero but mass leaning to positive lags.
    auto lean = hump(tau_max, 0, 4, 0.8);
    for (int tau = 1; tau <= tau_max; ++tau) lean[static_cast<std::size_t>(tau + tau_max)] += 0.1 * std::exp(-tau / 10.0);
    const auto lp = profile_from(lean);
    CHECK(classify_regime(lp, dft_susceptibility(lp), true) == RegimeLabel::MarketLeadsStock);

    CHECK_THROWS_AS((void)classify_regime(sym, dft_susceptibility(std::vector<double>(3, 0.1), 1), true),
                    AlignmentError);
}

TEST_CASE("mirror property of regime and Im peak") {
    oracle::Source src(12);
    int checked = 0;
    while (checked < 100) {
        const int tau_max = 30;
        auto rho = hump(tau_max, src.uniform(-20, 20), src.uniform(3, 12), src.uniform(0.3, 0.9));
        for (auto& v : rho) v += 0.05 * src.uniform(-1, 1);
        const auto p = profile_from(rho);
        const auto q = profile_from(lag_reversed(rho));
        const auto cp = dft_susceptibility(p);
        const auto cq = dft_susceptibility(q);
        const auto a = classify_regime(p, cp, true);
        const auto b = classify_regime(q, cq, true);
        if (a == RegimeLabel::Symmetric) {
            CHECK(b == RegimeLabel::Symmetric);
            continue;
        }
        ++checked;
        CHECK(b == (a == RegimeLabel::StockLeadsMarket ? RegimeLabel::MarketLeadsStock : RegimeLabel::StockLeadsMarket));
        CHECK(std::abs(extract_peaks(cp).im_peak + extract_peaks(cq).im_peak) < 1e-10);
        CHECK(classify_regime(q, cq, false) == RegimeLabel::WeaklyCorrelated);
    }
}

TEST_CASE("identical stocks co-move perfectly") {
    oracle::Source src(4);
    const auto r = oracle::clustered(src, 200);
    const auto u = oracle::universe({r, r, r, r, r, r});
    const auto cfg = small_config();
    const auto date = u.calendar()[150];
    const auto a = analyze_date(u, date, cfg);
    CHECK(a.point.rho_max == Approx(1.0).epsilon(1e-11));
    CHECK(a.point.rho_argmax_lag == 0);
    CHECK(a.point.significant);
    CHECK(a.point.rho_max_n == 6);
    CHECK(a.point.sigma_m == Approx(6 * volatility(r, 150, cfg.T)).epsilon(1e-13));
    CHECK(a.profile.at(0) == a.point.rho_max);
}

TEST_CASE("indicator point is consistent with its profile") {
    const auto u = clustered_universe(5, 15, 400);
    const auto cfg = small_config();
    for (std::size_t t = cfg.min_anchor_index(); t + static_cast<std::size_t>(cfg.tau_max) < u.length(); t += 17) {
        const auto a = analyze_date(u, u.calendar()[t], cfg);
        const auto& p = a.point;
        CHECK(p.index == t);
        CHECK(p.rho_max >= a.profile.at(0));
        double grid_max = -2;
        for (double v : a.profile.rho_bar) grid_max = std::max(grid_max, v);
        CHECK(p.rho_max == grid_max);
        CHECK(a.profile.at(p.rho_argmax_lag) == p.rho_max);
        CHECK(p.re_peak == a.peaks.re_peak);
        CHECK(p.im_peak == a.peaks.im_peak);
        CHECK(p.sigma_m == market_volatility(u, t, cfg.T));
        REQUIRE(a.coefficients.size() == 15);
        // Per-stock coefficients are correlations of the stock and market volatility series.
        const auto sv = volatility_series(u[3].values(), cfg.T);
        const auto mv = market_volatility_series(u, cfg.T);
        const auto off = cfg.T - 1;
        const double direct = cross_correlation(sv.values, mv.values, t - off, -5, cfg.M);
        CHECK(a.coefficients[3][static_cast<std::size_t>(cfg.tau_max - 5)].value() == direct);

        // Raising the threshold never turns an insignificant date significant.
        for (double th : {-0.5, 0.0, 0.3, 0.6, 0.9}) {
            AnalysisConfig hi = cfg;
            hi.rho_threshold = th;
            const bool sig_lo = evaluate_date(u, u.calendar()[t], hi).index() == 0 &&
                                std::get<IndicatorPoint>(evaluate_date(u, u.calendar()[t], hi)).significant;
            hi.rho_threshold = th + 0.05;
            const bool sig_hi = std::get<IndicatorPoint>(evaluate_date(u, u.calendar()[t], hi)).significant;
            CHECK((!sig_hi || sig_lo));
        }
    }
}

TEST_CASE("skip semantics") {
    const auto u = clustered_universe(6, 4, 200);
    const auto cfg = small_config();
    const auto first_ok = cfg.min_anchor_index();
    auto reason = [&](Date d) {
        const auto e = evaluate_date(u, d, cfg);
        REQUIRE(std::holds_alternative<SkipRecord>(e));
        return std::get<SkipRecord>(e).reason;
    };
    CHECK(reason(u.calendar()[first_ok - 1]) == SkipReason::InsufficientHistory);
    CHECK(reason(u.calendar()[u.length() - static_cast<std::size_t>(cfg.tau_max)]) == SkipReason::InsufficientFuture);
    CHECK(reason(*parse_date("1990-01-01")) == SkipReason::NotATradingDay);
    CHECK(std::holds_alternative<IndicatorPoint>(evaluate_date(u, u.calendar()[first_ok], cfg)));
    CHECK(std::holds_alternative<IndicatorPoint>(
        evaluate_date(u, u.calendar()[u.length() - 1 - static_cast<std::size_t>(cfg.tau_max)], cfg)));
    CHECK_THROWS_AS((void)analyze_date(u, u.calendar()[3], cfg), EvaluationSkipped);
    CHECK(std::string(to_string(SkipReason::DegenerateWindow)) == "degenerate_window");
}

TEST_CASE("constant prices skip every date as degenerate") {
    const auto u = oracle::universe({std::vector<double>(150, 0.0), std::vector<double>(150, 0.0)});
    const auto cfg = small_config();
    const auto h = rolling_history(u, cfg, u.calendar().front(), u.calendar().back());
    CHECK(h.size() == u.length());
    std::size_t degenerate = 0;
    for (const auto& e : h) {
        REQUIRE(std::holds_alternative<SkipRecord>(e));
        degenerate += std::get<SkipRecord>(e).reason == SkipReason::DegenerateWindow ? 1 : 0;
    }
    CHECK(degenerate == u.length() - cfg.min_anchor_index() - static_cast<std::size_t>(cfg.tau_max));
}

TEST_CASE("partially degenerate stocks are dropped per lag") {
    oracle::Source src(8);
    auto quiet = oracle::clustered(src, 200);
    for (std::size_t k = 100; k < 180; ++k) quiet[k] = 0.0;  // a flat stretch in one stock
    std::vector<std::vector<double>> r{quiet};
    for (int i = 0; i < 5; ++i) r.push_back(oracle::clustered(src, 200));
    const auto u = oracle::universe(r);
    AnalysisConfig cfg = small_config();
    cfg.M = 30;
    const auto a = analyze_date(u, u.calendar()[160], cfg);
    bool some_dropped = false;
    for (std::size_t k = 0; k < a.profile.size(); ++k) {
        const bool missing = !a.coefficients[0][k].has_value();
        CHECK(a.profile.counts[k] == (missing ? 5u : 6u));
        some_dropped |= missing;
    }
    CHECK(some_dropped);
}

TEST_CASE("rolling history matches single-date evaluation") {
    const auto u = clustered_universe(9, 12, 700);
    auto cfg = small_config();
    const auto from = u.calendar()[50];
    const auto to = u.calendar()[690];
    const auto h = rolling_history(u, cfg, from, to);
    REQUIRE(h.size() == 641);
    oracle::Source src(10);
    for (int k = 0; k < 25; ++k) {
        const auto i = static_cast<std::size_t>(src.integer(0, 640));
        const auto single = evaluate_date(u, u.calendar()[50 + i], cfg);
        REQUIRE(h[i].index() == single.index());
        if (const auto* p = std::get_if<IndicatorPoint>(&h[i])) {
            CHECK(same_point(*p, std::get<IndicatorPoint>(single)));
        } else {
            CHECK(std::get<SkipRecord>(h[i]).reason == std::get<SkipRecord>(single).reason);
        }
    }
    // Dates come out in calendar order.
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Date d = std::visit([](const auto& e) { return e.date; }, h[i]);
        CHECK(d == u.calendar()[50 + i]);
    }

    cfg.stride = 1000;
    const auto one = rolling_history(u, cfg, u.calendar()[300], u.calendar()[600]);
    REQUIRE(one.size() == 1);
    CHECK(same_point(std::get<IndicatorPoint>(one[0]), std::get<IndicatorPoint>(evaluate_date(u, u.calendar()[300], cfg))));

    cfg.stride = 7;
    CHECK(rolling_history(u, cfg, from, to).size() == (641 + 6) / 7);

    CHECK_THROWS_AS((void)rolling_history(u, cfg, to, from), EmptyResultError);
    CHECK_THROWS_AS((void)rolling_history(u, cfg, u.calendar()[0], u.calendar()[20]), EmptyResultError);
    CHECK_THROWS_AS((void)rolling_history(u, cfg, *parse_date("1980-01-01"), *parse_date("1980-12-31")),
                    EmptyResultError);
}

TEST_CASE("results do not depend on the worker count") {
    const auto u = clustered_universe(11, 10, 500);
    const auto cfg = small_config();
    auto run = [&](const char* threads) {
        ::setenv("VOLRESP_THREADS", threads, 1);
        auto h = rolling_history(u, cfg, u.calendar()[0], u.calendar().back());
        ::unsetenv("VOLRESP_THREADS");
        return h;
    };
    const auto a = run("1");
    const auto b = run("4");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].index() == b[i].index());
        if (const auto* p = std::get_if<IndicatorPoint>(&a[i])) CHECK(same_point(*p, std::get<IndicatorPoint>(b[i])));
    }
}

TEST_CASE("parallel_for visits each index once and propagates errors") {
    ::setenv("VOLRESP_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) {
                        if (i == 31) throw InputError("boom");
                    }),
                    InputError);
    ::unsetenv("VOLRESP_THREADS");
}

TEST_CASE("stocks leading the market are detected") {
    AnalysisConfig cfg;
    int hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        LeadLagParams p;
        p.seed = 7000 + s;
        const auto u = leadlag_universe(p);
        const auto e = evaluate_date(u, u.calendar()[u.length() - 31], cfg);
        hits += std::get<IndicatorPoint>(e).regime == RegimeLabel::StockLeadsMarket ? 1 : 0;
    }
    CHECK(hits >= 19);
}
