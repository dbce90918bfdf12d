#ifndef WAVEMEM_QUADRATURE_HPP
#define WAVEMEM_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace wavemem {

/// Gauss-Legendre rule on [-1,1]: nodes and weights for a given order.
/// Computed once per order via Newton iteration and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_rule(std::size_t order);

/// Fixed-order Gauss-Legendre on [a,b].
double integrate_gauss(const std::function<double(double)>& f, double a,
                       double b, std::size_t order = 16);

/// Composite Gauss-Legendre: `panels` equal subintervals of [a,b].
double integrate_composite(const std::function<double(double)>& f, double a,
                           double b, std::size_t panels,
                           std::size_t order = 16);

/// Adaptive bisection Gauss-Legendre. Splits until the 8/16-point estimates
/// agree within the tolerance budget assigned to each subinterval.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-12,
                          int max_depth = 48);

/// Integral of f over [a,b] where f has an integrable algebraic singularity
/// at the left endpoint a. Uses dyadically graded panels toward a.
double integrate_graded_left(const std::function<double(double)>& f, double a,
                             double b, std::size_t levels = 44,
                             std::size_t order = 16);

/// Cumulative incomplete cosine integrals at multiples of the half-period:
/// result[j] = integral of w^s * cos(w) over [0, j*pi], j = 0..jmax.
/// Valid for s > -1. Increments are one half-period each, so partial values
/// at the returned nodes stay bounded even when s > 0.
std::vector<double> incomplete_cosine_table(double s, std::size_t jmax);

} // namespace wavemem

#endif
