#include "wavemem/generators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "wavemem/errors.hpp"
#include "wavemem/quadrature.hpp"
#include "wavemem/rng.hpp"

namespace wavemem {

namespace {

constexpr double kPi = std::numbers::pi;

// Impulse response h of Theta(L)/Phi(L), h_0 = 1, truncated where it has
// decayed to roundoff relative to its peak.
std::vector<double> arma_impulse_response(const FarimaModel& model) {
    const std::size_t p = model.ar.size();
    const std::size_t q = model.ma.size();
    if (p == 0 && q == 0) return {1.0};
    std::vector<double> h;
    h.reserve(1024);
    double peak = 0.0;
    std::size_t quiet = 0;
    for (std::size_t j = 0; j < 2000000; ++j) {
        double value = 0.0;
        if (j == 0)
            value = 1.0;
        else if (j <= q)
            value = model.ma[j - 1];
        for (std::size_t i = 1; i <= p && i <= j; ++i)
            value += model.ar[i - 1] * h[j - i];
        h.push_back(value);
        peak = std::max(peak, std::abs(value));
        if (j > q && std::abs(value) < 1e-17 * peak) {
            if (++quiet >= 8) break;
        } else {
            quiet = 0;
        }
    }
    if (quiet < 8)
        throw domain_error("farima: AR polynomial is not causal "
                           "(impulse response does not decay)");
    return h;
}

void check_ar_roots(const std::vector<double>& ar) {
    if (ar.empty()) return;
    if (ar.size() == 1) {
        if (std::abs(ar[0]) >= 1.0)
            throw domain_error("farima: AR(1) coefficient must satisfy |phi| < 1");
        return;
    }
    // Companion matrix of Phi(z) = 1 - phi_1 z - ... - phi_p z^p; the process
    // is causal iff all eigenvalues lie inside the unit circle.
    const std::size_t p = ar.size();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < p; ++i) companion(0, i) = ar[i];
    for (std::size_t i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    const auto eigenvalues = companion.eigenvalues();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues(i)) >= 1.0)
            throw domain_error("farima: AR polynomial has a root inside or on "
                               "the unit circle");
}

// FARIMA(0,d,0) autocovariance, sigma2 = 1:
//   r(0) = Gamma(1-2d)/Gamma(1-d)^2, r(k+1) = r(k) (k+d)/(k+1-d).
std::vector<double> fractional_core(double d, std::size_t M) {
    std::vector<double> r(M);
    if (d == 0.0) {
        r.assign(M, 0.0);
        r[0] = 1.0;
        return r;
    }
    r[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (std::size_t k = 0; k + 1 < M; ++k)
        r[k + 1] = r[k] * (static_cast<double>(k) + d) /
                   (static_cast<double>(k) + 1.0 - d);
    return r;
}

} // namespace

void validate_model(const SpectralModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FgnModel>) {
                if (!(m.H > 0.0 && m.H < 1.0))
                    throw domain_error("fgn: H must be in (0,1)");
                if (!(m.sigma2 > 0.0))
                    throw domain_error("fgn: sigma2 must be positive");
            } else if constexpr (std::is_same_v<T, FarimaModel>) {
                if (!(std::abs(m.d) < 0.5))
                    throw domain_error("farima: |d| must be < 0.5");
                if (!(m.sigma2 > 0.0))
                    throw domain_error("farima: sigma2 must be positive");
                check_ar_roots(m.ar);
            } else if constexpr (std::is_same_v<T, PowerLawModel>) {
                if (!(m.D < 1.0))
                    throw domain_error("powerlaw: D must be < 1");
                if (!(m.Dprime > 0.0))
                    throw domain_error("powerlaw: D' must be > 0");
            }
        },
        model);
}

double model_memory_parameter(const SpectralModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FgnModel>)
                return 2.0 * m.H - 1.0;
            else if constexpr (std::is_same_v<T, FarimaModel>)
                return 2.0 * m.d;
            else if constexpr (std::is_same_v<T, PowerLawModel>)
                return m.D;
            else
                return 0.0;
        },
        model);
}

std::optional<double> model_dprime(const SpectralModel& model) {
    return std::visit(
        [](const auto& m) -> std::optional<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PowerLawModel>)
                return m.Dprime;
            else if constexpr (std::is_same_v<T, P4Model>)
                return std::nullopt;
            else
                return 2.0;
        },
        model);
}

double model_fstar0(const SpectralModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FgnModel>) {
                return m.sigma2 * std::sin(kPi * m.H) *
                       std::tgamma(2.0 * m.H + 1.0) / (2.0 * kPi);
            } else if constexpr (std::is_same_v<T, FarimaModel>) {
                double theta1 = 1.0, phi1 = 1.0;
                for (double t : m.ma) theta1 += t;
                for (double p : m.ar) phi1 -= p;
                const double ratio = theta1 / phi1;
                return m.sigma2 * ratio * ratio / (2.0 * kPi);
            } else if constexpr (std::is_same_v<T, PowerLawModel>) {
                return 1.0;
            } else {
                return std::sqrt(kPi / 2.0);
            }
        },
        model);
}

AutocovSequence fgn_autocov(double H, std::size_t M, double sigma2) {
    const FgnModel model{H, sigma2};
    validate_model(model);
    std::vector<double> r(M);
    const double twoH = 2.0 * H;
    for (std::size_t k = 0; k < M; ++k) {
        const double kk = static_cast<double>(k);
        r[k] = 0.5 * sigma2 *
               (std::pow(kk + 1.0, twoH) - 2.0 * std::pow(kk, twoH) +
                (k == 0 ? 1.0 : std::pow(kk - 1.0, twoH)));
    }
    return {std::move(r), model};
}

AutocovSequence farima_autocov(const FarimaModel& model, std::size_t M) {
    validate_model(model);
    if (model.ar.empty() && model.ma.empty()) {
        std::vector<double> r = fractional_core(model.d, M);
        for (double& v : r) v *= model.sigma2;
        return {std::move(r), model};
    }
    const std::vector<double> h = arma_impulse_response(model);
    const std::size_t J = h.size();
    // w_m = sum_j h_j h_{j+m}; then r(k) = sigma2 sum_m w_|m| r_fd(k+m).
    std::vector<double> w(J, 0.0);
    for (std::size_t m = 0; m < J; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j + m < J; ++j) acc += h[j] * h[j + m];
        w[m] = acc;
    }
    const std::vector<double> core = fractional_core(model.d, M + J);
    auto core_at = [&core](long idx) {
        return core[static_cast<std::size_t>(idx < 0 ? -idx : idx)];
    };
    std::vector<double> r(M, 0.0);
    for (std::size_t k = 0; k < M; ++k) {
        double acc = w[0] * core_at(static_cast<long>(k));
        for (std::size_t m = 1; m < J; ++m)
            acc += w[m] * (core_at(static_cast<long>(k) + static_cast<long>(m)) +
                           core_at(static_cast<long>(k) - static_cast<long>(m)));
        r[k] = model.sigma2 * acc;
    }
    return {std::move(r), model};
}

double farima_spectral_autocov(const FarimaModel& model, long k) {
    validate_model(model);
    auto density = [&model](double lambda) {
        const std::complex<double> z(std::cos(lambda), -std::sin(lambda));
        std::complex<double> theta(1.0, 0.0), phi(1.0, 0.0);
        std::complex<double> zp = z;
        for (double t : model.ma) {
            theta += t * zp;
            zp *= z;
        }
        zp = z;
        for (double p : model.ar) {
            phi -= p * zp;
            zp *= z;
        }
        const double frac =
            std::pow(2.0 * std::sin(0.5 * lambda), -2.0 * model.d);
        return model.sigma2 / (2.0 * kPi) * frac * std::norm(theta) /
               std::norm(phi);
    };
    // Dyadic panels toward the lambda = 0 singularity; each panel gets
    // enough nodes for the cos(k lambda) oscillation it spans.
    double total = 0.0;
    double hi = kPi;
    for (int level = 0; level < 52; ++level) {
        const double lo = 0.5 * hi;
        const std::size_t panels = 1 + static_cast<std::size_t>(
                                           std::abs(k) * (hi - lo) / 2.0);
        total += integrate_composite(
            [&](double lambda) {
                return density(lambda) * std::cos(k * lambda);
            },
            lo, hi, panels, 16);
        hi = lo;
    }
    return 2.0 * total;
}

AutocovSequence powerlaw_autocov(double D, double Dprime, std::size_t M) {
    const PowerLawModel model{D, Dprime};
    validate_model(model);
    std::vector<double> r(M, 0.0);
    r[0] = 2.0 * (std::pow(kPi, 1.0 - D) / (1.0 - D) +
                  std::pow(kPi, 1.0 + Dprime - D) / (1.0 + Dprime - D));
    if (M > 1) {
        const auto t1 = incomplete_cosine_table(-D, M - 1);
        const auto t2 = incomplete_cosine_table(Dprime - D, M - 1);
        for (std::size_t k = 1; k < M; ++k) {
            const double kk = static_cast<double>(k);
            r[k] = 2.0 * (std::pow(kk, D - 1.0) * t1[k] +
                          std::pow(kk, D - Dprime - 1.0) * t2[k]);
        }
    }
    return {std::move(r), model};
}

AutocovSequence p4_autocov(std::size_t M) {
    std::vector<double> r(M, 0.0);
    r[0] = 8.0 * std::sqrt(kPi / 2.0);
    if (M > 1) {
        const std::size_t jmax = (M - 1) / 2;
        const auto table = incomplete_cosine_table(-0.5, std::max<std::size_t>(jmax, 1));
        for (std::size_t k = 2; k < M; k += 2) {
            const std::size_t j = k / 2;
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            r[k] = 4.0 * sign * table[j] / std::sqrt(static_cast<double>(k));
        }
    }
    return {std::move(r), P4Model{}};
}

AutocovSequence model_autocov(const SpectralModel& model, std::size_t M) {
    return std::visit(
        [M](const auto& m) -> AutocovSequence {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FgnModel>)
                return fgn_autocov(m.H, M, m.sigma2);
            else if constexpr (std::is_same_v<T, FarimaModel>)
                return farima_autocov(m, M);
            else if constexpr (std::is_same_v<T, PowerLawModel>)
                return powerlaw_autocov(m.D, m.Dprime, M);
            else
                return p4_autocov(M);
        },
        model);
}

CirculantEmbedding::CirculantEmbedding(AutocovSequence acov, std::size_t N)
    : N_(N) {
    if (N < 2) throw domain_error("circulant: N must be >= 2");
    if (acov.r.size() < N)
        throw domain_error("circulant: autocovariance shorter than N");

    // Power-of-two embedding sizes keep the FFT fast; the model extends the
    // autocovariance as needed.
    std::size_t M = next_pow2(N - 1) + 1;
    double worst_eigenvalue = 0.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        std::vector<double> r;
        if (acov.r.size() >= M) {
            r.assign(acov.r.begin(), acov.r.begin() + static_cast<long>(M));
        } else {
            r = model_autocov(acov.model, M).r;
        }
        const std::size_t L = 2 * (M - 1);
        std::vector<std::complex<double>> c(L);
        for (std::size_t i = 0; i < M; ++i) c[i] = r[i];
        for (std::size_t i = 1; i + 1 < M; ++i) c[L - i] = r[i];
        fft_inplace(c, true);
        double min_eig = 0.0, max_eig = 0.0;
        for (const auto& v : c) {
            min_eig = std::min(min_eig, v.real());
            max_eig = std::max(max_eig, v.real());
        }
        if (min_eig >= -1e-9 * max_eig) {
            eigenvalues_.resize(L);
            for (std::size_t i = 0; i < L; ++i)
                eigenvalues_[i] = std::max(0.0, c[i].real());
            return;
        }
        worst_eigenvalue = min_eig;
        M = 2 * (M - 1) + 1;
    }
    throw embedding_failure(
        "circulant: embedding not nonnegative definite after 3 extensions "
        "(most negative eigenvalue " +
            std::to_string(worst_eigenvalue) + ")",
        worst_eigenvalue);
}

TimeSeries CirculantEmbedding::sample(std::uint64_t seed) const {
    const std::size_t L = eigenvalues_.size();
    RngStream rng(seed, 0x43495243u /* stream tag */);
    std::vector<std::complex<double>> w(L);
    const double inv_sqrt_l = 1.0 / std::sqrt(static_cast<double>(L));
    w[0] = std::sqrt(eigenvalues_[0]) * rng.normal();
    for (std::size_t k = 1; k < L / 2; ++k) {
        const double amp = std::sqrt(0.5 * eigenvalues_[k]);
        const double re = amp * rng.normal();
        const double im = amp * rng.normal();
        w[k] = {re, im};
        w[L - k] = {re, -im};
    }
    w[L / 2] = std::sqrt(eigenvalues_[L / 2]) * rng.normal();
    fft_inplace(w, false);
    std::vector<double> x(N_);
    for (std::size_t i = 0; i < N_; ++i) x[i] = w[i].real() * inv_sqrt_l;
    return TimeSeries(std::move(x));
}

TimeSeries circulant_generate(const AutocovSequence& acov, std::size_t N,
                              std::uint64_t seed) {
    return CirculantEmbedding(acov, N).sample(seed);
}

namespace {

double draw_innovation(InnovationKind dist, RngStream& rng) {
    switch (dist) {
        case InnovationKind::uniform:
            // Unit variance: U(-sqrt(3), sqrt(3)).
            return (2.0 * rng.uniform01() - 1.0) * std::sqrt(3.0);
        case InnovationKind::pareto_like: {
            // Density 3/4 (1+|x|)^{-5/2}: F(x) = 1 - (1+x)^{-3/2}/2 for x>=0,
            // symmetric about 0; sampled by the closed-form inverse.
            const double u = rng.uniform01();
            if (u >= 0.5)
                return std::pow(2.0 * (1.0 - u), -2.0 / 3.0) - 1.0;
            return 1.0 - std::pow(2.0 * u, -2.0 / 3.0);
        }
        case InnovationKind::cauchy:
            return std::tan(kPi * (rng.uniform01() - 0.5));
    }
    return 0.0;
}

} // namespace

TimeSeries nongaussian_farima(InnovationKind dist, double d, std::size_t N,
                              std::uint64_t seed) {
    if (!(std::abs(d) < 0.5))
        throw domain_error("nongaussian_farima: |d| must be < 0.5");
    if (N < 2) throw domain_error("nongaussian_farima: N must be >= 2");
    const std::size_t L = std::min<std::size_t>(N, 10000);
    // MA(infinity) weights of (1-L)^{-d}.
    std::vector<double> psi(L);
    psi[0] = 1.0;
    for (std::size_t j = 1; j < L; ++j)
        psi[j] = psi[j - 1] * (static_cast<double>(j) - 1.0 + d) /
                 static_cast<double>(j);

    RngStream rng(seed, 0x50313233u);
    std::vector<double> eps(N + L);
    for (double& e : eps) e = draw_innovation(dist, rng);

    if (d == 0.0) {
        std::vector<double> x(eps.begin() + static_cast<long>(L),
                              eps.begin() + static_cast<long>(L + N));
        return TimeSeries(std::move(x));
    }

    const std::size_t P = next_pow2(N + 2 * L);
    std::vector<std::complex<double>> fa(P), fb(P);
    for (std::size_t i = 0; i < eps.size(); ++i) fa[i] = eps[i];
    for (std::size_t j = 0; j < L; ++j) fb[j] = psi[j];
    fft_inplace(fa, true);
    fft_inplace(fb, true);
    for (std::size_t i = 0; i < P; ++i) fa[i] *= fb[i];
    fft_inplace(fa, false);
    const double scale = 1.0 / static_cast<double>(P);
    std::vector<double> x(N);
    for (std::size_t i = 0; i < N; ++i)
        x[i] = fa[L + i].real() * scale; // L-sample burn-in
    return TimeSeries(std::move(x));
}

TimeSeries p4_generate(std::size_t N, std::uint64_t seed) {
    if (N < 2) throw domain_error("p4_generate: N must be >= 2");
    return circulant_generate(p4_autocov(next_pow2(N - 1) + 1), N, seed);
}

} // namespace wavemem
