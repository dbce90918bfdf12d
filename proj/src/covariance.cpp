#include "wavemem/covariance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "wavemem/errors.hpp"
#include "wavemem/parallel.hpp"
#include "wavemem/quadrature.hpp"

namespace wavemem {

namespace {

constexpr double kSeriesTol = 1e-6; // m-series relative stopping rule
constexpr double kTailTol = 1e-9;   // u-integration relative tail target
constexpr std::size_t kHardMCap = 10000;

// psi_hat evaluations dominate the entry cost. Polynomial kernels are O(1)
// per call; other kernels are sampled once onto a uniform table and cubic
// interpolated afterwards.
class PsiHatEvaluator {
public:
    explicit PsiHatEvaluator(const MotherWavelet& w)
        : kernel_(w), direct_(!w.monomial_coeffs().empty()) {
        if (!direct_) build_table();
    }

    // psi_hat(x) * conj(psi_hat(y))
    void product(double x, double y, double& re, double& im) const {
        double xr, xi, yr, yi;
        eval(x, xr, xi);
        eval(y, yr, yi);
        re = xr * yr + xi * yi;
        im = xi * yr - xr * yi;
    }

    double table_limit() const { return direct_ ? 1e300 : u_hi_; }

private:
    void eval(double u, double& re, double& im) const {
        if (direct_) {
            const std::complex<double> v = kernel_(u);
            re = v.real();
            im = v.imag();
            return;
        }
        if (u >= u_hi_ - 2.0 * step_) {
            re = 0.0;
            im = 0.0;
            return;
        }
        // Catmull-Rom cubic on the uniform grid.
        const double s = u / step_;
        std::size_t i = static_cast<std::size_t>(s);
        if (i == 0) i = 1;
        const double f = s - static_cast<double>(i);
        re = interp(table_re_, i, f);
        im = interp(table_im_, i, f);
    }

    static double interp(const std::vector<double>& t, std::size_t i, double f) {
        const double p0 = t[i - 1], p1 = t[i], p2 = t[i + 1], p3 = t[i + 2];
        return p1 + 0.5 * f * (p2 - p0 +
                               f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                    f * (3.0 * (p1 - p2) + p3 - p0)));
    }

    void build_table() {
        // Extend in blocks of 64 units until |psi_hat|^2 is negligible.
        step_ = 0.04;
        const double block = 64.0;
        double peak = 0.0;
        double hi = 0.0;
        std::size_t filled = 0;
        while (hi < 1024.0) {
            hi += block;
            double block_max = 0.0;
            const std::size_t last = static_cast<std::size_t>(hi / step_);
            table_re_.resize(last + 3, 0.0);
            table_im_.resize(last + 3, 0.0);
            for (std::size_t j = filled; j <= last + 2; ++j) {
                const std::complex<double> v =
                    kernel_(static_cast<double>(j) * step_);
                table_re_[j] = v.real();
                table_im_[j] = v.imag();
                block_max = std::max(block_max, std::norm(v));
            }
            filled = last + 3;
            peak = std::max(peak, block_max);
            if (block_max < 1e-15 * peak) break;
        }
        u_hi_ = static_cast<double>(table_re_.size() - 3) * step_;
    }

    FourierKernel kernel_;
    bool direct_;
    std::vector<double> table_re_, table_im_;
    double step_ = 0.0;
    double u_hi_ = 0.0;
};

struct EntrySeries {
    double series = 0.0; // sum over all m in Z of C(d m)^2
    std::size_t m_used = 0;
    double u_max = 0.0;
    double tail = 0.0;
};

// Lag covariance kernel
//   C(w) = 2 integral_0^umax [ReP(v) cos(vw) + ImP(v) sin(vw)] v^{-D} dv,
//   P(v) = psi_hat(v r_i) conj psi_hat(v r_j),
// which is the limit covariance of normalized coefficients at shift offset
// w = r_i p - r_j q. All lags are evaluated on one composite Gauss grid
// sized for the highest lag in the current tier, so psi_hat is sampled once
// per grid refinement. Returns sum over m in Z of C(d m)^2.
EntrySeries entry_series(const PsiHatEvaluator& psi, double D, long r_i,
                         long r_j, double resolution_factor) {
    const long d = std::gcd(r_i, r_j);
    const double rmax = static_cast<double>(std::max(r_i, r_j));
    const double rmin = static_cast<double>(std::min(r_i, r_j));

    double u_max = std::max(64.0 / rmin, 8.0);
    u_max = std::min(u_max, psi.table_limit() / rmax);

    std::size_t m_tier = 64;
    while (true) {
        // Grid density: resolve the psi_hat oscillation (frequency r_i + r_j)
        // and the highest lag d * m_tier, 16 nodes per period.
        const double freq =
            static_cast<double>(r_i + r_j) + static_cast<double>(d) *
                                                 static_cast<double>(m_tier);
        const double nodes_per_unit =
            std::max(8.0, 16.0 * freq / 6.283185307179586) * resolution_factor;
        const std::size_t order = 16;
        const std::size_t panels =
            static_cast<std::size_t>(std::ceil(
                u_max * nodes_per_unit / static_cast<double>(order))) +
            1;
        const GaussRule& rule = gauss_rule(order);
        const double h = u_max / static_cast<double>(panels);
        std::vector<double> us(panels * order), re_w(panels * order),
            im_w(panels * order);
        double abs_integral = 0.0;
        double abs_tail_block = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = (static_cast<double>(p) + 0.5) * h;
            for (std::size_t q = 0; q < order; ++q) {
                const double u = mid + 0.5 * h * rule.nodes[q];
                const double weight = 0.5 * h * rule.weights[q] * std::pow(u, -D);
                double pr, pi;
                psi.product(u * static_cast<double>(r_i),
                            u * static_cast<double>(r_j), pr, pi);
                const std::size_t idx = p * order + q;
                us[idx] = u;
                re_w[idx] = pr * weight;
                im_w[idx] = pi * weight;
                const double mag = std::sqrt(pr * pr + pi * pi) * weight;
                abs_integral += std::abs(mag);
                if (u > 0.75 * u_max) abs_tail_block += std::abs(mag);
            }
        }
        if (abs_tail_block > kTailTol * abs_integral &&
            u_max < psi.table_limit() / rmax && u_max < 1e5) {
            u_max *= 2.0;
            continue;
        }

        double series = 0.0;
        std::size_t m = 0;
        std::size_t small_run = 0;
        double last_term = 0.0;
        const double dstep = static_cast<double>(d);
        while (m <= m_tier) {
            // C(dm) and C(-dm); the sin part flips sign with the lag.
            double cos_part = 0.0, sin_part = 0.0;
            if (m == 0) {
                for (double g : re_w) cos_part += g;
            } else {
                const double w0 = dstep * static_cast<double>(m);
                for (std::size_t k = 0; k < re_w.size(); ++k) {
                    const double c = std::cos(us[k] * w0);
                    const double s = std::sin(us[k] * w0);
                    cos_part += re_w[k] * c;
                    sin_part += im_w[k] * s;
                }
            }
            const double c_plus = 2.0 * (cos_part + sin_part);
            const double c_minus = 2.0 * (cos_part - sin_part);
            const double term =
                m == 0 ? c_plus * c_plus : c_plus * c_plus + c_minus * c_minus;
            series += term;
            last_term = term;
            ++m;
            if (m >= 4 && term < kSeriesTol * series) {
                if (++small_run >= 3) break;
            } else {
                small_run = 0;
            }
        }
        if (small_run < 3) {
            if (m_tier >= kHardMCap)
                throw convergence_failure(
                    "gamma_entry: m-series did not converge (r_i=" +
                        std::to_string(r_i) + ", r_j=" + std::to_string(r_j) +
                        ", D=" + std::to_string(D) + ")",
                    last_term / std::max(series, 1e-300));
            m_tier *= 2;
            continue;
        }
        EntrySeries out;
        out.series = series;
        out.m_used = m - 1;
        out.u_max = u_max;
        out.tail = abs_tail_block / std::max(abs_integral, 1e-300);
        return out;
    }
}

void check_gamma_domain(const MotherWavelet& w, double D) {
    if (!(D < 1.0)) throw domain_error("gamma: D must be < 1");
    if (w.smoothness_class() == SmoothnessClass::w_5_2 && !(D > -2.0))
        throw domain_error("gamma: D must be > -2 for a W(5/2) wavelet");
}

// gamma_ij = 2 d (r_i r_j)^{1-D} / K^2 * sum_m C(d m)^2. On the diagonal
// (and whenever d^2 = r_i r_j) this reduces to the familiar
// 8 (r_i r_j)^{2-D} / (K^2 d) sum_m I_m^2 cosine form; off the diagonal it
// carries the correct lattice density of shift pairs (p, q) with
// r_i p - r_j q = d m, which keeps the matrix positive semi-definite.
double entry_prefactor(double k_psi, double D, long r_i, long r_j) {
    const long d = std::gcd(r_i, r_j);
    return 2.0 * static_cast<double>(d) *
           std::pow(static_cast<double>(r_i) * static_cast<double>(r_j),
                    1.0 - D) /
           (k_psi * k_psi);
}

struct GammaCacheKey {
    std::string name;
    long d_key; // D rounded to 1e-3
    std::vector<long> multipliers;
    bool operator<(const GammaCacheKey& other) const {
        if (name != other.name) return name < other.name;
        if (d_key != other.d_key) return d_key < other.d_key;
        return multipliers < other.multipliers;
    }
};

} // namespace

double gamma_entry(const MotherWavelet& w, double D, long r_i, long r_j,
                   double resolution_factor) {
    check_gamma_domain(w, D);
    if (r_i < 1 || r_j < 1)
        throw domain_error("gamma_entry: multipliers must be >= 1");
    const double k_psi = k_integral(w, D);
    PsiHatEvaluator psi(w);
    const EntrySeries es = entry_series(psi, D, r_i, r_j, resolution_factor);
    return entry_prefactor(k_psi, D, r_i, r_j) * es.series;
}

std::shared_ptr<const CovarianceMatrix> gamma_matrix(
    const MotherWavelet& w, double D, const std::vector<long>& multipliers) {
    check_gamma_domain(w, D);
    if (multipliers.empty())
        throw domain_error("gamma_matrix: need at least one multiplier");
    for (long r : multipliers)
        if (r < 1) throw domain_error("gamma_matrix: multipliers must be >= 1");

    static std::map<GammaCacheKey, std::shared_ptr<const CovarianceMatrix>> cache;
    static std::mutex mutex;
    const GammaCacheKey key{w.name(), std::lround(D * 1000.0), multipliers};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const double D_used = static_cast<double>(key.d_key) / 1000.0;
    const double k_psi = k_integral(w, D_used);
    PsiHatEvaluator psi(w);
    const std::size_t ell = multipliers.size();

    auto cov = std::make_shared<CovarianceMatrix>();
    cov->multipliers = multipliers;
    cov->D = D_used;
    cov->wavelet_name = w.name();
    cov->gamma.assign(ell * ell, 0.0);

    // Upper triangle, computed concurrently.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = i; j < ell; ++j) pairs.emplace_back(i, j);
    std::vector<EntrySeries> results(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        results[p] = entry_series(psi, D_used, multipliers[i], multipliers[j], 1.0);
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        const double value =
            entry_prefactor(k_psi, D_used, multipliers[i], multipliers[j]) *
            results[p].series;
        cov->gamma[i * ell + j] = value;
        cov->gamma[j * ell + i] = value;
        cov->m_max = std::max(cov->m_max, results[p].m_used);
        cov->u_max = std::max(cov->u_max, results[p].u_max);
        cov->achieved_tolerance =
            std::max(cov->achieved_tolerance, results[p].tail);
    }

    // Invariants: symmetric by construction; diagonal positive; PSD within
    // eigenvalue tolerance.
    Eigen::MatrixXd g(ell, ell);
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = 0; j < ell; ++j) g(i, j) = cov->at(i, j);
    for (std::size_t i = 0; i < ell; ++i)
        if (!(g(i, i) > 0.0))
            throw convergence_failure("gamma_matrix: non-positive diagonal", g(i, i));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    const double min_eig = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, g.diagonal().maxCoeff());
    if (min_eig < -1e-8 * scale)
        throw convergence_failure(
            "gamma_matrix: matrix is not PSD (min eigenvalue " +
                std::to_string(min_eig) + ")",
            min_eig);

    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.emplace(key, cov);
    return it->second;
}

double slope_variance(const CovarianceMatrix& cov) {
    const std::size_t ell = cov.ell();
    if (ell < 2)
        throw domain_error("slope_variance: need at least 2 multipliers");
    Eigen::MatrixXd A(ell, 2);
    Eigen::MatrixXd G(ell, ell);
    for (std::size_t i = 0; i < ell; ++i) {
        A(i, 0) = std::log(static_cast<double>(cov.multipliers[i]));
        A(i, 1) = 1.0;
        for (std::size_t j = 0; j < ell; ++j) G(i, j) = cov.at(i, j);
    }
    const Eigen::Matrix2d ata = A.transpose() * A;
    const Eigen::Matrix2d ata_inv = ata.inverse();
    const Eigen::MatrixXd sandwich =
        ata_inv * A.transpose() * G * A * ata_inv;
    return sandwich(0, 0);
}

double sigma2_d(const CovarianceMatrix& cov) {
    for (std::size_t i = 0; i < cov.ell(); ++i)
        if (cov.multipliers[i] != static_cast<long>(i + 1))
            throw domain_error("sigma2_d: covariance must use multipliers 1..ell");
    const double value = slope_variance(cov);
    if (!(value > 0.0))
        throw convergence_failure("sigma2_d: non-positive variance", value);
    return value;
}

} // namespace wavemem
