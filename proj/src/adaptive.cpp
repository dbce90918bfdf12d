#include "wavemem/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "wavemem/covariance.hpp"
#include "wavemem/errors.hpp"
#include "wavemem/parallel.hpp"

namespace wavemem {

namespace {

constexpr double kDprimeClampLow = 0.05;
constexpr double kDprimeClampHigh = 10.0;

ScaleVarianceFn bind_series(const TimeSeries& x, const MotherWavelet& w) {
    return [&x, &w](long a) { return sample_variance(x, w, a); };
}

// Residual sum of squares of the log-log OLS over the given (scale, T(a))
// points; duplicates act as weights. Fused accumulation, no matrix build.
double weighted_loglog_rss(const std::vector<std::pair<long, double>>& points) {
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [scale, variance] : points) {
        const double lx = std::log(static_cast<double>(scale));
        const double ly = std::log(variance);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double sxx_c = sxx - sx * sx / n;
    const double sxy_c = sxy - sx * sy / n;
    const double syy_c = syy - sy * sy / n;
    if (sxx_c <= 0.0)
        throw singular_design_error("contrast: scales collapse in log");
    const double rss = syy_c - sxy_c * sxy_c / sxx_c;
    return std::max(rss, 0.0);
}

double contrast_at(const ScaleVarianceFn& variance_at, std::size_t N, long a,
                   std::size_t ell) {
    if (static_cast<std::size_t>(a) * 2 * ell > N)
        throw insufficient_data(
            "contrast: top scale " + std::to_string(a * static_cast<long>(ell)) +
                " keeps fewer than 2 coefficients",
            a * static_cast<long>(ell));
    std::vector<std::pair<long, double>> points;
    points.reserve(ell);
    for (std::size_t i = 1; i <= ell; ++i) {
        const long scale = a * static_cast<long>(i);
        const auto sv = variance_at(scale);
        if (!(sv.variance > 0.0))
            throw zero_variance_error(
                "contrast: zero sample variance at scale " + std::to_string(scale),
                scale);
        points.emplace_back(scale, sv.variance);
    }
    return weighted_loglog_rss(points);
}

} // namespace

AlphaGrid build_grid(std::size_t N, std::size_t ell) {
    if (ell < 3) throw domain_error("build_grid: ell must be >= 3");
    const double log_n = std::log(static_cast<double>(N));
    const long k_max = static_cast<long>(std::floor(
        std::log(static_cast<double>(N) / static_cast<double>(ell))));
    if (k_max < 2)
        throw insufficient_data(
            "build_grid: series too short for ell = " + std::to_string(ell) +
                " (need N >= ell * e^2)",
            static_cast<long>(N));
    AlphaGrid grid;
    grid.N = N;
    grid.ell = ell;
    for (long k = 2; k <= k_max; ++k) {
        AlphaGridPoint point;
        point.k = k;
        point.alpha = static_cast<double>(k) / log_n;
        point.scale = std::lround(std::exp(static_cast<double>(k)));
        point.feasible =
            2 * ell * static_cast<std::size_t>(point.scale) <= N;
        grid.points.push_back(point);
    }
    return grid;
}

double contrast(const TimeSeries& x, const MotherWavelet& w,
                const AlphaGridPoint& point, std::size_t ell) {
    return contrast_at(bind_series(x, w), x.length(), point.scale, ell);
}

AlphaSelection select_alpha_from(const ScaleVarianceFn& variance_at,
                                 std::size_t N, std::size_t ell1) {
    const AlphaGrid grid = build_grid(N, ell1);
    AlphaSelection sel;
    sel.profile.resize(grid.points.size());
    parallel_for(grid.points.size(), [&](std::size_t i) {
        const auto& point = grid.points[i];
        ContrastPoint cp;
        cp.alpha = point.alpha;
        cp.scale = point.scale;
        cp.feasible = point.feasible;
        cp.q = std::numeric_limits<double>::quiet_NaN();
        if (point.feasible)
            cp.q = contrast_at(variance_at, N, point.scale, ell1);
        sel.profile[i] = cp;
    });
    // Smallest alpha wins ties: ascending scan with strict improvement.
    double best = std::numeric_limits<double>::infinity();
    long best_scale = 0;
    double best_alpha = 0.0;
    for (const auto& cp : sel.profile) {
        if (!cp.feasible) continue;
        if (cp.q < best) {
            best = cp.q;
            best_scale = cp.scale;
            best_alpha = cp.alpha;
        }
    }
    if (best_scale == 0)
        throw insufficient_data(
            "select_alpha: no feasible grid point (series too short)",
            static_cast<long>(N));
    sel.alpha_hat = best_alpha;
    sel.a_hat = best_scale;
    return sel;
}

AlphaSelection select_alpha(const TimeSeries& x, const MotherWavelet& w,
                            std::size_t ell1) {
    return select_alpha_from(bind_series(x, w), x.length(), ell1);
}

double estimate_dprime(double alpha_hat) {
    if (!(alpha_hat > 0.0 && alpha_hat < 1.0))
        throw domain_error("estimate_dprime: alpha must be in (0,1)");
    return (1.0 - alpha_hat) / (2.0 * alpha_hat);
}

TildeScale tilde_scale(double alpha_hat, double dprime_hat, std::size_t N,
                       std::size_t ell) {
    if (N < 16) throw domain_error("tilde_scale: N must be >= 16");
    if (!(dprime_hat > 0.0)) throw domain_error("tilde_scale: D' must be > 0");
    if (ell <= 2) throw domain_error("tilde_scale: ell must be > 2");
    const double log_n = std::log(static_cast<double>(N));
    TildeScale out;
    out.alpha_tilde =
        alpha_hat + 3.0 / ((static_cast<double>(ell) - 2.0) * dprime_hat) *
                        std::log(log_n) / log_n;
    const double raw = std::pow(static_cast<double>(N), out.alpha_tilde);
    long a = std::lround(raw);
    const long cap = static_cast<long>(N / ell);
    if (a > cap) a = cap;
    if (a < 1) a = 1;
    out.a_tilde = a;
    return out;
}

std::size_t select_ell2_from(const ScaleVarianceFn& variance_at, std::size_t N,
                             long a_hat, std::size_t ell1) {
    if (a_hat < 1) throw domain_error("select_ell2: a_hat must be >= 1");
    const double lo =
        static_cast<double>(a_hat) * std::sqrt(static_cast<double>(ell1));
    const double hi = static_cast<double>(N) / 2.0;
    long best_b = 0;
    double best_q = std::numeric_limits<double>::infinity();
    std::map<long, double> variance_cache;
    const long k_lo = static_cast<long>(std::ceil(std::log(std::max(lo, 1.0))));
    const long k_hi = static_cast<long>(std::floor(std::log(std::max(hi, 1.0))));
    long prev_b = -1;
    // Descending scan with strict improvement: ties go to the largest b.
    for (long k = k_hi; k >= k_lo; --k) {
        long b = std::lround(std::exp(static_cast<double>(k)));
        if (b > static_cast<long>(N / 2)) b = static_cast<long>(N / 2);
        if (static_cast<double>(b) < lo || b < 4 || b == prev_b) continue;
        prev_b = b;
        std::vector<std::pair<long, double>> points;
        points.reserve(ell1);
        bool usable = true;
        long distinct = 0;
        long last_scale = -1;
        for (std::size_t i = 1; i <= ell1 && usable; ++i) {
            const long scale = std::max<long>(2, b / static_cast<long>(i));
            auto it = variance_cache.find(scale);
            if (it == variance_cache.end()) {
                try {
                    it = variance_cache.emplace(scale, variance_at(scale).variance)
                             .first;
                } catch (const error&) {
                    usable = false;
                    break;
                }
            }
            if (!(it->second > 0.0)) {
                usable = false;
                break;
            }
            points.emplace_back(scale, it->second);
            if (scale != last_scale) ++distinct;
            last_scale = scale;
        }
        if (!usable || distinct < 3) continue;
        const double q = weighted_loglog_rss(points);
        if (q < best_q) {
            best_q = q;
            best_b = b;
        }
    }
    if (best_b == 0) return ell1; // no scoreable candidate
    std::size_t ell2 =
        std::max(ell1, static_cast<std::size_t>(best_b / a_hat));
    const std::size_t cap = N / static_cast<std::size_t>(a_hat);
    if (ell2 > cap) ell2 = cap;
    return std::max<std::size_t>(ell2, 3);
}

std::size_t select_ell2(const TimeSeries& x, const MotherWavelet& w,
                        long a_hat, std::size_t ell1) {
    return select_ell2_from(bind_series(x, w), x.length(), a_hat, ell1);
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const insufficient_data& e) {
        throw insufficient_data(std::string(name) + ": " + e.what(), e.scale());
    } catch (const zero_variance_error& e) {
        throw zero_variance_error(std::string(name) + ": " + e.what(), e.scale());
    } catch (const domain_error& e) {
        throw domain_error(std::string(name) + ": " + e.what());
    } catch (const error& e) {
        throw error(std::string(name) + ": " + e.what());
    }
}

// Regression at base scale a over multipliers 1..ell, trimmed so the top
// scale keeps at least 2 coefficients.
EstimateResult regress_at(const TimeSeries& x, const MotherWavelet& w, long a,
                          std::size_t ell) {
    const std::size_t cap = x.length() / (2 * static_cast<std::size_t>(a));
    std::size_t ell_used = std::min(ell, cap);
    if (ell_used < 3)
        throw insufficient_data(
            "regression: fewer than 3 usable scales at base scale " +
                std::to_string(a),
            a);
    std::vector<long> scales(ell_used);
    for (std::size_t i = 0; i < ell_used; ++i)
        scales[i] = a * static_cast<long>(i + 1);
    const ScaleSpectrum spec = spectrum(x, w, scales);
    return loglog_regress(spec,
                          RegressionDesign::consecutive(a, ell_used));
}

} // namespace

AdaptiveResult adaptive_estimate(const TimeSeries& x, const MotherWavelet& w,
                                 const AdaptiveOptions& opts) {
    if (opts.ell1 < 3) throw domain_error("adaptive_estimate: ell1 must be >= 3");
    const std::size_t N = x.length();

    AdaptiveResult out;
    out.ell1 = opts.ell1;

    AlphaSelection sel = stage("select_alpha", [&] {
        return select_alpha(x, w, opts.ell1);
    });
    out.alpha_hat = sel.alpha_hat;
    out.a_hat = sel.a_hat;
    out.contrast_profile = std::move(sel.profile);

    out.dprime_hat = stage("estimate_dprime", [&] {
        return estimate_dprime(out.alpha_hat);
    });
    const double dprime_clamped =
        std::clamp(out.dprime_hat, kDprimeClampLow, kDprimeClampHigh);

    const TildeScale ts = stage("tilde_scale", [&] {
        return tilde_scale(out.alpha_hat, dprime_clamped, N, opts.ell1);
    });
    out.alpha_tilde = ts.alpha_tilde;
    out.a_tilde = ts.a_tilde;

    out.ell2 = stage("select_ell2", [&]() -> std::size_t {
        switch (opts.ell2_mode) {
            case Ell2Mode::adaptive:
                return select_ell2(x, w, out.a_hat, opts.ell1);
            case Ell2Mode::fixed:
                return opts.ell2_fixed == 0 ? opts.ell1 : opts.ell2_fixed;
            case Ell2Mode::power_n01:
                return static_cast<std::size_t>(
                    5.0 * std::pow(static_cast<double>(N), 0.1));
            case Ell2Mode::power_alpha:
                return static_cast<std::size_t>(
                    std::pow(static_cast<double>(N), 1.0 - out.alpha_hat) /
                    10.0);
        }
        return opts.ell1;
    });
    out.ell2 = std::max<std::size_t>(out.ell2, 3);
    const std::size_t ell2_cap = N / static_cast<std::size_t>(out.a_hat);
    if (out.ell2 > ell2_cap) out.ell2 = std::max<std::size_t>(ell2_cap, 3);

    out.at_a_hat = stage("regression_a_hat", [&] {
        return regress_at(x, w, out.a_hat, out.ell2);
    });
    out.at_a_tilde = stage("regression_a_tilde", [&] {
        return regress_at(x, w, out.a_tilde, out.ell2);
    });

    if (opts.compute_ci) {
        const double d_for_gamma = out.at_a_tilde.D_hat;
        const double lower_bound =
            w.smoothness_class() == SmoothnessClass::w_5_2 ? -1.999 : -50.0;
        if (d_for_gamma < 0.999 && d_for_gamma > lower_bound) {
            stage("confidence_interval", [&] {
                auto interval_for = [&](EstimateResult& res) {
                    std::vector<long> multipliers(res.ell_used);
                    for (std::size_t i = 0; i < res.ell_used; ++i)
                        multipliers[i] = static_cast<long>(i + 1);
                    const auto cov = gamma_matrix(w, d_for_gamma, multipliers);
                    res.sigma2_D = sigma2_d(*cov);
                    const auto [lo, hi] =
                        confidence_interval(res, *cov, N, opts.ci_level);
                    res.ci_low = lo;
                    res.ci_high = hi;
                };
                interval_for(out.at_a_hat);
                interval_for(out.at_a_tilde);
                return 0;
            });
        }
    }
    return out;
}

} // namespace wavemem
