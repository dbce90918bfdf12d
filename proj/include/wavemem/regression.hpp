#ifndef WAVEMEM_REGRESSION_HPP
#define WAVEMEM_REGRESSION_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "wavemem/covariance.hpp"
#include "wavemem/transform.hpp"

namespace wavemem {

/// Design of the log-log regression over scales (r_i * a_N), r strictly
/// positive integers, at least 3 distinct scales.
struct RegressionDesign {
    long base_scale = 0;
    std::vector<long> multipliers;
    std::vector<long> scales; // multipliers[i] * base_scale

    static RegressionDesign from_multipliers(long base_scale,
                                             std::vector<long> multipliers);
    /// Multipliers (1..ell).
    static RegressionDesign consecutive(long base_scale, std::size_t ell);

    std::size_t ell() const noexcept { return scales.size(); }
};

struct EstimateResult {
    double D_hat = 0.0;
    double K_hat = 0.0;
    long base_scale = 0;
    std::size_t ell_used = 0;
    double residual_ss = 0.0;
    std::optional<double> sigma2_D;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
};

/// OLS of log T_N(r_i a_N) on (log(r_i a_N), 1), solved by QR.
/// Every design scale must appear in the spectrum with a strictly positive
/// variance.
EstimateResult loglog_regress(const ScaleSpectrum& spec,
                              const RegressionDesign& design);

/// Asymptotic interval D_hat +- z_{(1+level)/2} sqrt(sigma2_D a_N / N) with
/// sigma2_D the slope entry of (A'A)^{-1} A' Gamma A (A'A)^{-1}, A built
/// from the design's multipliers. The covariance must match the design.
std::pair<double, double> confidence_interval(const EstimateResult& result,
                                              const CovarianceMatrix& cov,
                                              std::size_t N, double level);

} // namespace wavemem

#endif
