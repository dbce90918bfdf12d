#include "wavemem/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "wavemem/errors.hpp"
#include "wavemem/quadrature.hpp"

namespace wavemem {

namespace {

constexpr double kBoundaryEps = 1e-12;

double bump(double t) {
    if (t <= kBoundaryEps || t >= 1.0 - kBoundaryEps) return 0.0;
    return std::exp(-1.0 / (t * (1.0 - t)));
}

// The zero-mean condition is linear in a:
//   integral (t^2 - t + a) bump = 0  =>  a = -I1 / I0
// with I1 = integral (t^2-t) bump and I0 = integral bump.
double solve_psi_sm_constant() {
    const double i0 = integrate_adaptive(bump, 0.0, 1.0, 1e-16);
    const double i1 = integrate_adaptive(
        [](double t) { return (t * t - t) * bump(t); }, 0.0, 1.0, 1e-16);
    return -i1 / i0;
}

double psi_sm_constant() {
    static const double a = solve_psi_sm_constant();
    return a;
}

} // namespace

MotherWavelet::MotherWavelet(std::string name, std::function<double(double)> eval,
                             SmoothnessClass smoothness, int vanishing_moments,
                             std::vector<double> monomial_coeffs)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      smoothness_(smoothness),
      vanishing_moments_(vanishing_moments),
      monomial_coeffs_(std::move(monomial_coeffs)) {}

double MotherWavelet::operator()(double t) const {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return eval_(t);
}

MotherWavelet make_psi_sm() {
    const double a = psi_sm_constant();
    return MotherWavelet(
        "sm",
        [a](double t) { return (t * t - t + a) * bump(t); },
        SmoothnessClass::w_infinity, 1);
}

MotherWavelet make_psi_lm() {
    // 100 t^2 (t-1)^2 (t^2 - t + 3/14) expanded in monomials.
    std::vector<double> coeffs(7, 0.0);
    coeffs[2] = 150.0 / 7.0;
    coeffs[3] = -1000.0 / 7.0;
    coeffs[4] = 2250.0 / 7.0;
    coeffs[5] = -300.0;
    coeffs[6] = 100.0;
    return MotherWavelet(
        "lm",
        [](double t) {
            const double s = t * (t - 1.0);
            return 100.0 * s * s * (t * t - t + 3.0 / 14.0);
        },
        SmoothnessClass::w_5_2, 2, std::move(coeffs));
}

MotherWavelet make_tabulated(std::string name, const std::vector<double>& ts,
                             const std::vector<double>& values,
                             SmoothnessClass smoothness, int vanishing_moments) {
    if (ts.size() != values.size() || ts.size() < 3)
        throw domain_error("tabulated wavelet needs >= 3 (t, value) rows");
    if (!std::is_sorted(ts.begin(), ts.end()))
        throw domain_error("tabulated wavelet rows must be sorted by t");
    if (ts.front() != 0.0 || ts.back() != 1.0)
        throw domain_error("tabulated wavelet must cover t=0 and t=1");
    if (values.front() != 0.0 || values.back() != 0.0)
        throw domain_error("tabulated wavelet must vanish at t=0 and t=1");
    auto xs = std::make_shared<std::vector<double>>(ts);
    auto ys = std::make_shared<std::vector<double>>(values);
    auto eval = [xs, ys](double t) {
        const auto& x = *xs;
        const auto& y = *ys;
        auto hi = std::upper_bound(x.begin(), x.end(), t);
        if (hi == x.begin()) return y.front();
        if (hi == x.end()) return y.back();
        const std::size_t i = static_cast<std::size_t>(hi - x.begin());
        const double frac = (t - x[i - 1]) / (x[i] - x[i - 1]);
        return y[i - 1] + frac * (y[i] - y[i - 1]);
    };
    return MotherWavelet(std::move(name), std::move(eval), smoothness,
                         vanishing_moments);
}

MotherWavelet wavelet_by_name(const std::string& name) {
    if (name == "sm") return make_psi_sm();
    if (name == "lm") return make_psi_lm();
    throw domain_error("unknown wavelet name: " + name);
}

double wavelet_moment(const MotherWavelet& w, int p) {
    return integrate_adaptive(
        [&w, p](double t) { return std::pow(t, p) * w(t); }, 0.0, 1.0, 1e-14);
}

void validate_admissibility(const MotherWavelet& w) {
    if (w(0.0) != 0.0 || w(1.0) != 0.0)
        throw domain_error("wavelet '" + w.name() + "' must vanish at 0 and 1");
    const double mean = wavelet_moment(w, 0);
    if (std::abs(mean) > 1e-10)
        throw domain_error("wavelet '" + w.name() + "' mean " +
                           std::to_string(mean) + " exceeds 1e-10");
    for (int p = 1; p < w.vanishing_moments(); ++p) {
        const double moment = wavelet_moment(w, p);
        if (std::abs(moment) > 1e-8)
            throw domain_error("wavelet '" + w.name() + "' moment p=" +
                               std::to_string(p) + " is " +
                               std::to_string(moment));
    }
}

FourierKernel::FourierKernel(MotherWavelet wavelet, std::size_t quadrature_nodes)
    : wavelet_(std::move(wavelet)), base_nodes_(std::max<std::size_t>(quadrature_nodes, 256)) {
    const auto& coeffs = wavelet_.monomial_coeffs();
    if (!coeffs.empty()) {
        // Moments of the polynomial for the small-|u| Taylor series:
        // psi_hat(u) = sum_k (-iu)^k mu_k / k!, mu_k = sum_n c_n / (k+n+1).
        taylor_moments_.resize(48);
        for (std::size_t k = 0; k < taylor_moments_.size(); ++k) {
            double mu = 0.0;
            for (std::size_t n = 0; n < coeffs.size(); ++n)
                mu += coeffs[n] / static_cast<double>(k + n + 1);
            taylor_moments_[k] = mu;
        }
    }
}

std::complex<double> FourierKernel::eval_polynomial(double u) const {
    const auto& coeffs = wavelet_.monomial_coeffs();
    if (std::abs(u) < 10.0) {
        // Taylor series; terms u^k/k! stay far from cancellation for |u|<10.
        std::complex<double> sum(0.0, 0.0);
        std::complex<double> term(1.0, 0.0); // (-iu)^k / k!
        const std::complex<double> step(0.0, -u);
        for (std::size_t k = 0; k < taylor_moments_.size(); ++k) {
            sum += term * taylor_moments_[k];
            term *= step / static_cast<double>(k + 1);
        }
        return sum;
    }
    // F_n = integral t^n e^{-iut} dt, forward recursion (stable for |u| >= n):
    // F_0 = i (e^{-iu} - 1)/u,  F_n = (i/u) e^{-iu} - (i n / u) F_{n-1}.
    const std::complex<double> eiu(std::cos(u), -std::sin(u));
    const std::complex<double> i_over_u(0.0, 1.0 / u);
    std::complex<double> f = i_over_u * (eiu - 1.0);
    std::complex<double> sum = coeffs[0] * f;
    for (std::size_t n = 1; n < coeffs.size(); ++n) {
        f = i_over_u * eiu - i_over_u * static_cast<double>(n) * f;
        sum += coeffs[n] * f;
    }
    return sum;
}

std::complex<double> FourierKernel::eval_quadrature(double u) const {
    const std::size_t nodes = std::max(
        base_nodes_, static_cast<std::size_t>(16.0 * std::ceil(std::abs(u))));
    const std::size_t order = 16;
    const std::size_t panels = (nodes + order - 1) / order;
    const GaussRule& rule = gauss_rule(order);
    const double h = 1.0 / static_cast<double>(panels);
    double re = 0.0, im = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * h;
        for (std::size_t q = 0; q < order; ++q) {
            const double t = mid + 0.5 * h * rule.nodes[q];
            const double v = wavelet_(t) * rule.weights[q];
            re += v * std::cos(u * t);
            im -= v * std::sin(u * t);
        }
    }
    return {0.5 * h * re, 0.5 * h * im};
}

std::complex<double> FourierKernel::operator()(double u) const {
    if (!std::isfinite(u))
        throw domain_error("fourier_transform: non-finite frequency");
    if (!wavelet_.monomial_coeffs().empty()) return eval_polynomial(u);
    return eval_quadrature(u);
}

std::complex<double> fourier_transform(const MotherWavelet& w, double u,
                                       std::size_t quadrature_nodes) {
    return FourierKernel(w, quadrature_nodes)(u);
}

namespace {

struct KCacheKey {
    std::string name;
    double alpha;
    bool operator<(const KCacheKey& other) const {
        if (name != other.name) return name < other.name;
        return alpha < other.alpha;
    }
};

// |psi_hat|^2 |u|^{-alpha} integrated over a dyadic block [lo, hi].
double k_block(const FourierKernel& fk, double alpha, double lo, double hi) {
    // psi_hat oscillates with period ~2*pi in u; 16 nodes per period.
    const std::size_t panels =
        std::max<std::size_t>(4, static_cast<std::size_t>((hi - lo) / 2.0) + 1);
    return integrate_composite(
        [&fk, alpha](double u) {
            const double mag = std::abs(fk(u));
            return mag * mag * std::pow(u, -alpha);
        },
        lo, hi, panels, 16);
}

double k_integral_uncached(const MotherWavelet& w, double alpha) {
    FourierKernel fk(w);
    // [0,1] carries the u^{2-alpha} endpoint behavior.
    double sum = integrate_graded_left(
        [&fk, alpha](double u) {
            const double mag = std::abs(fk(u));
            return mag * mag * std::pow(u, -alpha);
        },
        0.0, 1.0);
    double hi = 1.0;
    double tail = 0.0;
    bool converged = false;
    double envelope_prev = 0.0;
    for (int block = 0; block < 24; ++block) {
        const double lo = hi;
        hi *= 2.0;
        sum += k_block(fk, alpha, lo, hi);
        // Envelope of the integrand over the block, sampled off the zeros.
        double envelope = 0.0;
        for (int s = 0; s < 64; ++s) {
            const double u = lo + (hi - lo) * (s + 0.37) / 64.0;
            const double mag = std::abs(fk(u));
            envelope = std::max(envelope, mag * mag * std::pow(u, -alpha));
        }
        if (envelope_prev > 0.0 && envelope > 0.0) {
            // Fit the local decay exponent p and bound the tail by
            // E * hi / (p - 1) assuming integrand <= E (u/hi)^{-p} beyond hi.
            const double p = std::log2(envelope_prev / envelope);
            if (p > 1.001) {
                tail = envelope * hi / (p - 1.0);
                if (tail < 1e-8 && tail < 1e-6 * std::abs(sum)) {
                    converged = true;
                    break;
                }
            }
        }
        envelope_prev = envelope;
    }
    if (!converged)
        throw convergence_failure(
            "k_integral: tail bound did not reach 1e-8 for wavelet '" +
                w.name() + "' at alpha " + std::to_string(alpha),
            tail);
    return 2.0 * sum;
}

} // namespace

double k_integral(const MotherWavelet& w, double alpha) {
    if (!(alpha < 1.0))
        throw domain_error("k_integral: alpha must be < 1, got " +
                           std::to_string(alpha));
    if (w.smoothness_class() == SmoothnessClass::w_5_2 && !(alpha > -2.0))
        throw domain_error(
            "k_integral: alpha must be > -2 for a W(5/2) wavelet, got " +
            std::to_string(alpha));
    static std::map<KCacheKey, double> cache;
    static std::mutex mutex;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find({w.name(), alpha});
        if (it != cache.end()) return it->second;
    }
    const double value = k_integral_uncached(w, alpha);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(KCacheKey{w.name(), alpha}, value);
    return value;
}

} // namespace wavemem
