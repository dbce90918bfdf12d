#ifndef WAVEMEM_COVARIANCE_HPP
#define WAVEMEM_COVARIANCE_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "wavemem/wavelet.hpp"

namespace wavemem {

/// Asymptotic covariance of the log sample variances across scale
/// multipliers r, evaluated at memory parameter D.
struct CovarianceMatrix {
    std::vector<double> gamma; // row-major ell x ell, symmetric
    std::vector<long> multipliers;
    double D = 0.0;
    std::string wavelet_name;
    // Truncation metadata: largest lag kept in the m-series, integration
    // cutoff and the worst per-entry tail estimate actually achieved.
    std::size_t m_max = 0;
    double u_max = 0.0;
    double achieved_tolerance = 0.0;

    std::size_t ell() const noexcept { return multipliers.size(); }
    double at(std::size_t i, std::size_t j) const {
        return gamma[i * multipliers.size() + j];
    }
};

/// Single entry: with d = gcd(r_i, r_j) and
///   C(w) = 2 integral_0^inf [ Re P(u) cos(uw) + Im P(u) sin(uw) ] u^{-D} du,
///   P(u) = psi_hat(u r_i) conj psi_hat(u r_j),
/// the limit covariance of the normalized log variances is
///   gamma_ij = 2 d (r_i r_j)^{1-D} / K^2 * sum_{m in Z} C(d m)^2,
/// which on the diagonal equals 8 r^{3-2D}/K^2 sum_m I_m^2 with the cosine
/// integrals I_m. Requires D < 1 (and D > -2 for W(5/2)).
/// resolution_factor scales the integration grid density (grid-convergence
/// checks pass 2.0).
double gamma_entry(const MotherWavelet& w, double D, long r_i, long r_j,
                   double resolution_factor = 1.0);

/// Full matrix; entries are computed concurrently, symmetrized by averaging
/// the (i,j)/(j,i) pair and checked for positive semi-definiteness.
/// Results are cached per (wavelet, D rounded to 1e-3, multipliers).
std::shared_ptr<const CovarianceMatrix> gamma_matrix(
    const MotherWavelet& w, double D, const std::vector<long>& multipliers);

/// Slope entry of (A'A)^{-1} A' Gamma A (A'A)^{-1} with
/// A = [(log r_i, 1)] built from the covariance's own multipliers.
double slope_variance(const CovarianceMatrix& cov);

/// sigma2_D = (1 0) (A'A)^{-1} A' Gamma A (A'A)^{-1} (1 0)' with
/// A = [(log i, 1)]_{i=1..ell}; requires multipliers (1..ell).
double sigma2_d(const CovarianceMatrix& cov);

} // namespace wavemem

#endif
