#ifndef WAVEMEM_WAVELET_HPP
#define WAVEMEM_WAVELET_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wavemem {

enum class SmoothnessClass { w_infinity, w_5_2 };

/// A mother wavelet: a kernel supported on [0,1] with zero mean,
/// zero boundary values and a declared number of vanishing moments.
class MotherWavelet {
public:
    MotherWavelet(std::string name, std::function<double(double)> eval,
                  SmoothnessClass smoothness, int vanishing_moments,
                  std::vector<double> monomial_coeffs = {});

    /// Kernel value; exactly 0 outside (0,1).
    double operator()(double t) const;

    const std::string& name() const noexcept { return name_; }
    SmoothnessClass smoothness_class() const noexcept { return smoothness_; }
    int vanishing_moments() const noexcept { return vanishing_moments_; }

    /// Monomial coefficients when the kernel is polynomial on [0,1]
    /// (empty otherwise). Enables a closed-form Fourier transform.
    const std::vector<double>& monomial_coeffs() const noexcept {
        return monomial_coeffs_;
    }

private:
    std::string name_;
    std::function<double(double)> eval_;
    SmoothnessClass smoothness_;
    int vanishing_moments_;
    std::vector<double> monomial_coeffs_;
};

/// psi_SM(t) = (t^2 - t + a) exp(-1/(t(1-t))); the constant a is re-solved
/// at startup to 12 digits as the root of the zero-mean condition.
MotherWavelet make_psi_sm();

/// psi_LM(t) = 100 t^2 (t-1)^2 (t^2 - t + 3/14) on [0,1].
MotherWavelet make_psi_lm();

/// Wavelet from tabulated (t, psi(t)) pairs, linearly interpolated.
/// The table must cover t=0 and t=1 with zero values.
MotherWavelet make_tabulated(std::string name,
                             const std::vector<double>& ts,
                             const std::vector<double>& values,
                             SmoothnessClass smoothness, int vanishing_moments);

/// Wavelet by CLI name: "sm", "lm".
MotherWavelet wavelet_by_name(const std::string& name);

/// Checks boundary values, zero mean (1e-10) and the declared vanishing
/// moments (1e-8). Throws domain_error with the failing condition.
void validate_admissibility(const MotherWavelet& w);

/// Fourier transform psi_hat(u) = integral_0^1 psi(t) e^{-iut} dt.
/// Polynomial kernels use an exact recursion; others use composite
/// Gauss-Legendre with node count max(base_nodes, 16*ceil|u|).
class FourierKernel {
public:
    explicit FourierKernel(MotherWavelet wavelet,
                           std::size_t quadrature_nodes = 256);

    std::complex<double> operator()(double u) const;

    const MotherWavelet& source() const noexcept { return wavelet_; }
    std::size_t quadrature_nodes() const noexcept { return base_nodes_; }

private:
    std::complex<double> eval_polynomial(double u) const;
    std::complex<double> eval_quadrature(double u) const;

    MotherWavelet wavelet_;
    std::size_t base_nodes_;
    std::vector<double> taylor_moments_; // polynomial path, |u| < 10
};

/// Convenience wrapper matching the one-shot operation shape.
std::complex<double> fourier_transform(const MotherWavelet& w, double u,
                                       std::size_t quadrature_nodes = 256);

/// K_{psi,alpha} = integral over R of |psi_hat(u)|^2 |u|^{-alpha} du.
/// Requires alpha < 1; for W(5/2) kernels additionally alpha > -2.
/// Results are memoized behind an internal synchronized cache.
double k_integral(const MotherWavelet& w, double alpha);

/// Moment integral_0^1 t^p psi(t) dt via adaptive quadrature (test oracle
/// grade accuracy).
double wavelet_moment(const MotherWavelet& w, int p);

} // namespace wavemem

#endif
