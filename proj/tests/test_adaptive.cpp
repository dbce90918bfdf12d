#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wavemem/adaptive.hpp"
#include "wavemem/errors.hpp"
#include "wavemem/generators.hpp"

using namespace wavemem;

namespace {

ScaleVarianceFn power_law_fn(double D, double K) {
    return [D, K](long a) {
        return ScaleVariance{K * std::pow(static_cast<double>(a), D), 100};
    };
}

} // namespace

TEST_CASE("grid for N=1000, ell=15: k in 2..4, scales {7,20,55}") {
    const auto grid = build_grid(1000, 15);
    REQUIRE(grid.points.size() == 3);
    CHECK(grid.points[0].k == 2);
    CHECK(grid.points[0].scale == 7);
    CHECK(grid.points[1].scale == 20);
    CHECK(grid.points[2].scale == 55);
    CHECK(grid.points[0].alpha == doctest::Approx(0.2895296546).epsilon(1e-9));
    CHECK(grid.points[1].alpha == doctest::Approx(0.4342944819).epsilon(1e-9));
    // 2 * 15 * 55 > 1000: the top point cannot keep 2 coefficients per scale.
    CHECK(grid.points[0].feasible);
    CHECK(grid.points[1].feasible);
    CHECK_FALSE(grid.points[2].feasible);
    for (const auto& p : grid.points) {
        CHECK(p.alpha > 0.0);
        CHECK(p.alpha < 1.0);
        CHECK(15 * p.scale <= 1000);
    }
}

TEST_CASE("grid rejects series shorter than ell * e^2") {
    CHECK_THROWS_AS(build_grid(100, 15), insufficient_data);
    CHECK_NOTHROW(build_grid(120, 15)); // floor(log(8)) = 2
    CHECK_THROWS_AS(build_grid(1000, 2), domain_error);
}

TEST_CASE("contrast is the residual and is nonnegative") {
    const auto acov = fgn_autocov(0.75, 4096);
    const TimeSeries x = circulant_generate(acov, 4096, 17);
    const auto w = make_psi_lm();
    const auto grid = build_grid(x.length(), 12);
    for (const auto& p : grid.points) {
        if (!p.feasible) continue;
        CHECK(contrast(x, w, p, 12) >= 0.0);
    }
}

TEST_CASE("contrast of an exactly affine spectrum is zero") {
    const auto sel = select_alpha_from(power_law_fn(0.6, 2.0), 100000, 15);
    for (const auto& p : sel.profile) {
        if (!p.feasible) continue;
        CHECK(p.q <= 1e-10);
    }
}

TEST_CASE("contrast propagates zero variance with the scale") {
    const TimeSeries zero(std::vector<double>(2000, 0.0));
    const auto w = make_psi_lm();
    const auto grid = build_grid(zero.length(), 10);
    CHECK_THROWS_AS(contrast(zero, w, grid.points.front(), 10),
                    zero_variance_error);
}

TEST_CASE("contrast rejects infeasible grid point") {
    const auto grid = build_grid(1000, 15);
    const TimeSeries x = circulant_generate(fgn_autocov(0.6, 1000), 1000, 5);
    const auto w = make_psi_lm();
    CHECK_THROWS_AS(contrast(x, w, grid.points[2], 15), insufficient_data);
}

TEST_CASE("tie break picks the smallest alpha") {
    // Constant spectrum: every feasible contrast is exactly 0.
    const auto sel = select_alpha_from(
        [](long) {
            return ScaleVariance{1.0, 100};
        },
        10000, 15);
    const auto grid = build_grid(10000, 15);
    CHECK(sel.a_hat == grid.points.front().scale);
    CHECK(sel.alpha_hat == grid.points.front().alpha);
}

TEST_CASE("monotone-decreasing profile selects the last feasible point") {
    // A low-scale bump decays with a: residuals shrink as the base scale
    // grows, so the argmin sits at the top feasible grid point.
    const auto variance = [](long a) {
        return ScaleVariance{
            std::pow(static_cast<double>(a), 0.5) *
                (1.0 + 40.0 / static_cast<double>(a)),
            100};
    };
    const std::size_t n = 100000;
    const auto sel = select_alpha_from(variance, n, 15);
    long last_feasible = 0;
    for (const auto& p : build_grid(n, 15).points)
        if (p.feasible) last_feasible = p.scale;
    CHECK(sel.a_hat == last_feasible);
}

TEST_CASE("estimate_dprime closed form and domain") {
    CHECK(estimate_dprime(1.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(estimate_dprime(0.2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(estimate_dprime(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_dprime(0.0), domain_error);
    CHECK_THROWS_AS(estimate_dprime(1.0), domain_error);
    CHECK_THROWS_AS(estimate_dprime(-0.1), domain_error);
}

TEST_CASE("tilde_scale frozen arithmetic") {
    // alpha = 0.2, D' = 2, ell = 15, N = 1e4:
    // correction = (3/26) ln(ln 1e4)/ln(1e4), alpha_tilde = 0.22781564,
    // a_tilde = round(1e4^alpha_tilde) = 8. Matches the equivalent form
    // N^alpha * (log N)^(3/((ell-2) D')).
    const auto ts = tilde_scale(0.2, 2.0, 10000, 15);
    CHECK(ts.alpha_tilde == doctest::Approx(0.22781564461617576).epsilon(1e-12));
    CHECK(ts.a_tilde == 8);

    // D' -> infinity: the correction vanishes.
    const auto limit = tilde_scale(0.3, 1e12, 10000, 15);
    CHECK(limit.alpha_tilde == doctest::Approx(0.3).epsilon(1e-9));

    // Cap: ell * a_tilde <= N.
    const auto capped = tilde_scale(0.9, 0.05, 1000, 15);
    CHECK(capped.a_tilde == 66);

    CHECK_THROWS_AS(tilde_scale(0.2, 2.0, 10, 15), domain_error);
    CHECK_THROWS_AS(tilde_scale(0.2, 0.0, 10000, 15), domain_error);
    CHECK_THROWS_AS(tilde_scale(0.2, 2.0, 10000, 2), domain_error);
}

TEST_CASE("select_ell2 falls back to ell1 when no candidate fits") {
    const auto fn = power_law_fn(0.5, 1.0);
    CHECK(select_ell2_from(fn, 60, 7, 15) == 15);
}

TEST_CASE("select_ell2 on an exact power law reaches the top of the grid") {
    // Flat-zero contrast: ties resolve to the largest candidate b.
    // N = 1e4, a_hat = 7: top candidate b = round(e^8) = 2981,
    // ell2 = max(15, 2981/7) = 425.
    const auto fn = [](long) { return ScaleVariance{1.0, 100}; };
    CHECK(select_ell2_from(fn, 10000, 7, 15) == 425);
}

TEST_CASE("adaptive_estimate is deterministic") {
    const auto w = make_psi_lm();
    const TimeSeries x = circulant_generate(fgn_autocov(0.75, 4096), 4096, 21);
    AdaptiveOptions opts;
    opts.compute_ci = false;
    const auto r1 = adaptive_estimate(x, w, opts);
    const auto r2 = adaptive_estimate(x, w, opts);
    CHECK(r1.alpha_hat == r2.alpha_hat);
    CHECK(r1.a_hat == r2.a_hat);
    CHECK(r1.alpha_tilde == r2.alpha_tilde);
    CHECK(r1.a_tilde == r2.a_tilde);
    CHECK(r1.ell2 == r2.ell2);
    CHECK(r1.d_hat_hat() == r2.d_hat_hat());
    CHECK(r1.d_tilde() == r2.d_tilde());
    CHECK(r1.at_a_hat.residual_ss == r2.at_a_hat.residual_ss);
}

TEST_CASE("alpha_tilde strictly exceeds alpha_hat") {
    const auto w = make_psi_lm();
    const TimeSeries x = circulant_generate(fgn_autocov(0.6, 8192), 8192, 31);
    AdaptiveOptions opts;
    opts.compute_ci = false;
    const auto res = adaptive_estimate(x, w, opts);
    CHECK(res.alpha_tilde > res.alpha_hat);
    CHECK(res.a_tilde >= res.a_hat);
    CHECK(res.ell2 >= 1);
}

TEST_CASE("scaling the series leaves the pipeline outputs unchanged") {
    const auto w = make_psi_lm();
    const TimeSeries x = circulant_generate(fgn_autocov(0.7, 8192), 8192, 41);
    std::vector<double> scaled(x.values());
    for (double& v : scaled) v *= 1000.0;
    const TimeSeries y(scaled);
    AdaptiveOptions opts;
    opts.compute_ci = false;
    const auto rx = adaptive_estimate(x, w, opts);
    const auto ry = adaptive_estimate(y, w, opts);
    CHECK(rx.alpha_hat == ry.alpha_hat);
    CHECK(rx.a_hat == ry.a_hat);
    CHECK(rx.ell2 == ry.ell2);
    CHECK(rx.d_hat_hat() == doctest::Approx(ry.d_hat_hat()).epsilon(1e-9));
    CHECK(rx.d_tilde() == doctest::Approx(ry.d_tilde()).epsilon(1e-9));
}

TEST_CASE("contrast at the minimum is not above the profile median") {
    const auto w = make_psi_lm();
    for (int rep = 0; rep < 10; ++rep) {
        const TimeSeries x =
            circulant_generate(fgn_autocov(0.75, 16384), 16384, 600 + rep);
        const auto sel = select_alpha(x, w, 15);
        std::vector<double> qs;
        double q_min = std::numeric_limits<double>::infinity();
        for (const auto& p : sel.profile) {
            if (!p.feasible) continue;
            qs.push_back(p.q);
            q_min = std::min(q_min, p.q);
        }
        std::sort(qs.begin(), qs.end());
        CHECK(q_min <= qs[qs.size() / 2]);
    }
}

TEST_CASE("white noise: D_tilde within 0.15 of zero at N = 1e4") {
    const auto w = make_psi_lm();
    const TimeSeries x =
        circulant_generate(fgn_autocov(0.5, 10000), 10000, 77);
    AdaptiveOptions opts;
    opts.compute_ci = false;
    const auto res = adaptive_estimate(x, w, opts);
    CHECK(std::abs(res.d_tilde()) <= 0.15);
}

TEST_CASE("fGn alpha_hat drifts toward 0.2 as N grows") {
    const auto w = make_psi_lm();
    AdaptiveOptions opts;
    opts.compute_ci = false;
    auto mean_alpha = [&](std::size_t n, int reps) {
        const auto acov = fgn_autocov(0.75, n);
        const CirculantEmbedding embed(acov, n);
        double mean = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            const auto res =
                adaptive_estimate(embed.sample(3000 + rep), w, opts);
            mean += res.alpha_hat;
        }
        return mean / reps;
    };
    const double a3 = mean_alpha(1000, 50);
    const double a5 = mean_alpha(100000, 50);
    CHECK(std::abs(a5 - 0.2) <= 0.15);
    CHECK(std::abs(a5 - 0.2) < std::abs(a3 - 0.2));
}

TEST_CASE("FARIMA(0,d,0) d=0.25: sqrt MSE of D_tilde at N=1e5 below 0.05") {
    const auto w = make_psi_lm();
    const std::size_t n = 100000;
    const FarimaModel model{{}, 0.25, {}, 1.0};
    const CirculantEmbedding embed(farima_autocov(model, n), n);
    AdaptiveOptions opts;
    opts.compute_ci = false;
    double sum_sq = 0.0;
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        const auto res = adaptive_estimate(embed.sample(4000 + rep), w, opts);
        const double err = res.d_tilde() - 0.5;
        sum_sq += err * err;
    }
    CHECK(std::sqrt(sum_sq / reps) <= 0.05);
}

TEST_CASE("scale bracket: a_hat inside [N^a*/(log N)^l, N^a* (log N)^m]") {
    // fGn has D' = 2, so alpha* = 0.2; admissible exponents need
    // l > 2/((ell-2) D') = 0.077 and m > 12/(ell-2) = 0.92. The in-bracket
    // fraction must be non-decreasing over N = 10^3, 10^4, 10^5.
    const auto w = make_psi_lm();
    const double lambda = 0.3, mu = 2.0;
    AdaptiveOptions opts;
    opts.compute_ci = false;
    std::vector<double> fractions;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        const CirculantEmbedding embed(fgn_autocov(0.75, n), n);
        const double log_n = std::log(static_cast<double>(n));
        const double center = std::pow(static_cast<double>(n), 0.2);
        const double lo = center / std::pow(log_n, lambda);
        const double hi = center * std::pow(log_n, mu);
        int in = 0;
        const int reps = 20;
        for (int rep = 0; rep < reps; ++rep) {
            const auto res = adaptive_estimate(embed.sample(7000 + rep), w, opts);
            if (lo <= res.a_hat && res.a_hat <= hi) ++in;
        }
        fractions.push_back(static_cast<double>(in) / reps);
    }
    CHECK(fractions[1] >= fractions[0]);
    CHECK(fractions[2] >= fractions[1]);
    CHECK(fractions[2] > 0.9);
}

TEST_CASE("ell1 below 3 is rejected") {
    const auto w = make_psi_lm();
    const TimeSeries x = circulant_generate(fgn_autocov(0.5, 1000), 1000, 1);
    AdaptiveOptions opts;
    opts.ell1 = 2;
    CHECK_THROWS_AS(adaptive_estimate(x, w, opts), domain_error);
}
