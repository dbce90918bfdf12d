#ifndef WAVEMEM_ADAPTIVE_HPP
#define WAVEMEM_ADAPTIVE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "wavemem/regression.hpp"
#include "wavemem/transform.hpp"

namespace wavemem {

struct AlphaGridPoint {
    long k = 0;
    double alpha = 0.0;
    long scale = 0;    // round(e^k)
    bool feasible = false; // every regression scale i*a(k) keeps >= 2 coefficients
};

/// Discretized scale exponents alpha = k / log N for k = 2 .. floor(log(N/ell)).
struct AlphaGrid {
    std::size_t N = 0;
    std::size_t ell = 0;
    std::vector<AlphaGridPoint> points;
};

AlphaGrid build_grid(std::size_t N, std::size_t ell);

struct ContrastPoint {
    double alpha = 0.0;
    long scale = 0;
    double q = 0.0; // NaN when infeasible
    bool feasible = false;
};

/// Value provider for contrast machinery: scale -> sample variance. The
/// public operations bind this to sample_variance; tests may inject
/// synthetic spectra.
using ScaleVarianceFn = std::function<ScaleVariance(long)>;

/// Q_N(alpha): residual sum of squares of the log-log OLS over scales
/// (i * a(k))_{i=1..ell}.
double contrast(const TimeSeries& x, const MotherWavelet& w,
                const AlphaGridPoint& point, std::size_t ell);

struct AlphaSelection {
    double alpha_hat = 0.0;
    long a_hat = 0;
    std::vector<ContrastPoint> profile;
};

/// argmin of the contrast over the feasible grid, smallest alpha on ties.
AlphaSelection select_alpha(const TimeSeries& x, const MotherWavelet& w,
                            std::size_t ell1);
AlphaSelection select_alpha_from(const ScaleVarianceFn& variance_at,
                                 std::size_t N, std::size_t ell1);

/// D' estimate (1 - alpha)/(2 alpha); requires alpha in (0,1).
double estimate_dprime(double alpha_hat);

struct TildeScale {
    double alpha_tilde = 0.0;
    long a_tilde = 0;
};

/// alpha_tilde = alpha_hat + 3/((ell-2) D') * log log N / log N;
/// a_tilde = round(N^alpha_tilde) capped so ell * a_tilde <= N.
TildeScale tilde_scale(double alpha_hat, double dprime_hat, std::size_t N,
                       std::size_t ell);

/// Upper-scale selection: scans candidate maxima b = round(e^k) over
/// [a_hat * sqrt(ell1), N/2], scores each by the OLS residual over the ell1
/// scales max(2, floor(b/i)) (duplicates kept as weights), prefers larger b
/// on ties, and returns ell2 = max(ell1, floor(b_hat / a_hat)) capped so
/// ell2 * a_hat <= N. Falls back to ell1 when no candidate is scoreable.
std::size_t select_ell2(const TimeSeries& x, const MotherWavelet& w,
                        long a_hat, std::size_t ell1);
std::size_t select_ell2_from(const ScaleVarianceFn& variance_at, std::size_t N,
                             long a_hat, std::size_t ell1);

enum class Ell2Mode {
    adaptive,    // ell2 = floor(b_hat / a_hat)
    fixed,       // ell2 = ell2_fixed (default ell1)
    power_n01,   // ell2 = floor(5 N^0.1)
    power_alpha, // ell2 = floor(N^(1-alpha_hat) / 10)
};

struct AdaptiveOptions {
    std::size_t ell1 = 15;
    Ell2Mode ell2_mode = Ell2Mode::adaptive;
    std::size_t ell2_fixed = 0; // 0 means ell1
    bool compute_ci = true;
    double ci_level = 0.95;
};

struct AdaptiveResult {
    double alpha_hat = 0.0;
    long a_hat = 0;
    double dprime_hat = 0.0; // exact (1-alpha)/(2 alpha), unclamped
    double alpha_tilde = 0.0;
    long a_tilde = 0;
    std::size_t ell1 = 0;
    std::size_t ell2 = 0;
    EstimateResult at_a_hat;   // D_hat_hat and its interval
    EstimateResult at_a_tilde; // D_tilde and its interval
    std::vector<ContrastPoint> contrast_profile;

    double d_hat_hat() const noexcept { return at_a_hat.D_hat; }
    double d_tilde() const noexcept { return at_a_tilde.D_hat; }
};

/// Full pipeline: select_alpha -> estimate_dprime -> tilde_scale -> ell2 ->
/// regressions at a_hat and a_tilde (ell2 scales each, trimmed where the
/// top scales would keep fewer than 2 coefficients), with confidence
/// intervals from Gamma evaluated at D_tilde. Stage failures are rethrown
/// with the stage name prefixed.
AdaptiveResult adaptive_estimate(const TimeSeries& x, const MotherWavelet& w,
                                 const AdaptiveOptions& opts = {});

} // namespace wavemem

#endif
