// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Thresholds are pinned here, not configurable.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wavemem/adaptive.hpp"
#include "wavemem/bench.hpp"
#include "wavemem/covariance.hpp"
#include "wavemem/generators.hpp"
#include "wavemem/quadrature.hpp"
#include "wavemem/wavelet.hpp"

using namespace wavemem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

double exact_coeff_variance(const MotherWavelet& w,
                            const std::vector<double>& r, long a) {
    std::vector<double> psi(static_cast<std::size_t>(a));
    for (long k = 1; k <= a; ++k)
        psi[k - 1] = w(static_cast<double>(k) / static_cast<double>(a));
    double sum = 0.0;
    for (long k = 0; k < a; ++k)
        for (long kp = 0; kp < a; ++kp)
            sum += psi[k] * psi[kp] * r[static_cast<std::size_t>(std::abs(k - kp))];
    return sum / static_cast<double>(a);
}

const std::vector<double> kDGrid{0.1, 0.3, 0.5, 0.7, 0.9};

// Criterion 1: fGn and FARIMA(0,d,0), N = 10^3, plain ell = 15, 100
// replications, sqrt MSE averaged over the D grid against the reference
// values:
// D_hat_hat within 0.13/0.14 +- 0.07, D_tilde within 0.17 +- 0.08.
void criterion_1() {
    BenchConfig cfg;
    cfg.processes = {process_by_name("fgn"), process_by_name("farima")};
    cfg.D_values = kDGrid;
    cfg.N_values = {1000};
    cfg.ell_specs = {EllSpec{15, Ell2Mode::fixed, 15}};
    cfg.replications = 100;
    cfg.master_seed = 10101;
    const auto report_data = run_bench(cfg);
    bool pass = true;
    std::string detail;
    for (const auto& row : report_data.averaged) {
        const double target_hh = row.process == "fgn" ? 0.13 : 0.14;
        const bool ok = row.valid &&
                        std::abs(row.rmse_d_hat_hat - target_hh) <= 0.07 &&
                        std::abs(row.rmse_d_tilde - 0.17) <= 0.08;
        pass = pass && ok;
        detail += row.process + ": " + fmt(row.rmse_d_hat_hat) + "/" +
                  fmt(row.rmse_d_tilde) + " vs " + fmt(target_hh) + "/0.17  ";
    }
    report(1, pass, "desk-scale sqrt MSE targets, N=10^3, ell=15", detail);
}

// Criterion 2: fGn at ell = 15, sqrt MSE(D_tilde) drops by at least 2x from
// N = 10^3 to N = 10^4, 50 replications.
void criterion_2() {
    BenchConfig cfg;
    cfg.processes = {process_by_name("fgn")};
    cfg.D_values = kDGrid;
    cfg.N_values = {1000, 10000};
    cfg.ell_specs = {EllSpec{15, Ell2Mode::fixed, 15}};
    cfg.replications = 50;
    cfg.master_seed = 20202;
    const auto r = run_bench(cfg);
    double rmse_small = 0.0, rmse_large = 0.0;
    for (const auto& row : r.averaged) {
        if (row.N == 1000) rmse_small = row.rmse_d_tilde;
        if (row.N == 10000) rmse_large = row.rmse_d_tilde;
    }
    const bool pass = rmse_large * 2.0 <= rmse_small;
    report(2, pass, "large-N error decay for fGn",
           "sqrtMSE(D_tilde): " + fmt(rmse_small) + " -> " + fmt(rmse_large));
}

// Criterion 3: X^{(D,D')} with D = 0.5, D' = 1 (alpha* = 1/3): the mean of
// alpha_hat over 50 replications moves monotonically toward 1/3 over
// N = 10^3 -> 10^4 -> 10^5.
//
// Known-red as stated: at N = 10^3 the selection grid holds only two usable
// exponents {0.29, 0.43}, so the mean sits ~0.04 from 1/3 by construction,
// while at N = 10^4 the richer grid exposes the selector's genuine small-
// alpha preference (~0.09 away) before it climbs back toward 1/3. The
// convergence itself is visible in the supplementary diagnostics printed
// below: the 10^4 -> 10^5 drift of mean alpha_hat toward 1/3 and the
// strictly shrinking bias of D_hat_hat across all three sizes.
void criterion_3() {
    const auto w = make_psi_lm();
    AdaptiveOptions opts;
    opts.compute_ci = false;
    std::vector<double> means, mean_d;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        const CirculantEmbedding embed(powerlaw_autocov(0.5, 1.0, n), n);
        double mean = 0.0, dsum = 0.0;
        for (int rep = 0; rep < 50; ++rep) {
            const auto res = adaptive_estimate(embed.sample(30300 + rep), w, opts);
            mean += res.alpha_hat;
            dsum += res.d_hat_hat();
        }
        means.push_back(mean / 50.0);
        mean_d.push_back(dsum / 50.0);
    }
    const double e1 = std::abs(means[0] - 1.0 / 3.0);
    const double e2 = std::abs(means[1] - 1.0 / 3.0);
    const double e3 = std::abs(means[2] - 1.0 / 3.0);
    const bool pass = e1 > e2 && e2 > e3;
    report(3, pass, "scale selection drifts toward alpha* = 1/3",
           "mean alpha_hat: " + fmt(means[0]) + ", " + fmt(means[1]) + ", " +
               fmt(means[2]));
    std::printf(
        "  info criterion 3: 10^4 -> 10^5 drift toward 1/3: %s (%.4f -> %.4f);"
        " |mean D_hat_hat - D| strictly decreasing: %s (%.3f, %.3f, %.3f)\n",
        (e3 < e2 ? "yes" : "no"), means[1], means[2],
        (std::abs(mean_d[0] - 0.5) > std::abs(mean_d[1] - 0.5) &&
                 std::abs(mean_d[1] - 0.5) > std::abs(mean_d[2] - 0.5)
             ? "yes"
             : "no"),
        std::abs(mean_d[0] - 0.5), std::abs(mean_d[1] - 0.5),
        std::abs(mean_d[2] - 0.5));
}

// Criterion 4: FARIMA(1,d,1), D = 0.5, N = 10^4, 100 replications:
// standardized D_tilde draws pass Cramer-von Mises at the 1% level
// (composite critical value 0.178 with the (1 + 0.5/n) modification).
void criterion_4() {
    const auto w = make_psi_lm();
    const std::size_t n = 10000;
    const FarimaModel model{{0.3}, 0.25, {0.7}, 1.0};
    const CirculantEmbedding embed(farima_autocov(model, n), n);
    AdaptiveOptions opts;
    opts.compute_ci = false;
    std::vector<double> draws;
    for (int rep = 0; rep < 100; ++rep)
        draws.push_back(
            adaptive_estimate(embed.sample(40400 + rep), w, opts).d_tilde());
    const auto summary = normality_summary(draws);
    const double w_mod = summary.W * (1.0 + 0.5 / 100.0);
    const bool pass = w_mod < 0.178;
    report(4, pass, "CLT shape of D_tilde draws (CvM, 1% level)",
           "W = " + fmt(summary.W) + ", modified " + fmt(w_mod) + " < 0.178");
}

// Criterion 5: gamma_11 quadrature vs the Monte Carlo variance of
// sqrt(N/a) (T~_N(a) - 1) on exact fGn, 2000 replications, N = 2^16,
// a = 2^6, within 25% relative.
void criterion_5() {
    const auto w = make_psi_lm();
    const std::size_t n = 1 << 16;
    const long a = 64;
    const auto acov = fgn_autocov(0.75, n);
    const CirculantEmbedding embed(acov, n);
    const double norm = exact_coeff_variance(w, acov.r, a);
    const int reps = 2000;
    double mean = 0.0, m2 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        const TimeSeries x = embed.sample(50500 + rep);
        const double t = sample_variance(x, w, a).variance / norm;
        const double delta = t - mean;
        mean += delta / (rep + 1);
        m2 += delta * (t - mean);
    }
    const double mc = (static_cast<double>(n) / a) * m2 / (reps - 1.0);
    const double predicted = gamma_entry(w, 0.5, 1, 1);
    const double rel = std::abs(mc - predicted) / predicted;
    report(5, rel <= 0.25, "covariance oracle gamma_11 vs Monte Carlo",
           "MC " + fmt(mc) + " vs quadrature " + fmt(predicted) +
               ", rel err " + fmt(rel));
}

// Criterion 6: pooled sample autocovariance of circulant fGn(H = 0.75)
// matches the closed form for k <= 20 within 3 sigma (100 seeds, N = 2^14).
void criterion_6() {
    const std::size_t n = 1 << 14;
    const auto acov = fgn_autocov(0.75, n);
    const CirculantEmbedding embed(acov, n);
    const int seeds = 100, lags = 21;
    std::vector<std::vector<double>> per_seed(seeds, std::vector<double>(lags));
    for (int s = 0; s < seeds; ++s) {
        const TimeSeries x = embed.sample(60600 + s);
        for (int k = 0; k < lags; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i + k < n; ++i) acc += x[i] * x[i + k];
            per_seed[s][k] = acc / static_cast<double>(n - k);
        }
    }
    bool pass = true;
    double worst = 0.0;
    for (int k = 0; k < lags; ++k) {
        double mean = 0.0;
        for (int s = 0; s < seeds; ++s) mean += per_seed[s][k];
        mean /= seeds;
        double ss = 0.0;
        for (int s = 0; s < seeds; ++s)
            ss += (per_seed[s][k] - mean) * (per_seed[s][k] - mean);
        const double se = std::sqrt(ss / (seeds - 1.0) / seeds);
        const double z = std::abs(mean - acov.r[k]) / se;
        worst = std::max(worst, z);
        if (z > 3.0) pass = false;
    }
    report(6, pass, "circulant generator exactness (fGn pooled autocov)",
           "worst |z| over lags 0..20 = " + fmt(worst));
}

// Criterion 7: admissibility suite.
void criterion_7() {
    const auto sm = make_psi_sm();
    const auto lm = make_psi_lm();
    bool pass = true;
    std::string detail;
    const double sm_mean = wavelet_moment(sm, 0);
    const double lm_mean = wavelet_moment(lm, 0);
    const double lm_first = wavelet_moment(lm, 1);
    pass = pass && std::abs(sm_mean) <= 1e-8 && std::abs(lm_mean) <= 1e-8;
    pass = pass && sm(0.0) == 0.0 && sm(1.0) == 0.0 && lm(0.0) == 0.0 &&
           lm(1.0) == 0.0;
    pass = pass && std::abs(lm_first) <= 1e-8;
    const double psi_sq = integrate_adaptive(
        [&lm](double t) { return lm(t) * lm(t); }, 0.0, 1.0, 1e-14);
    const double parseval = 2.0 * 3.14159265358979323846 * psi_sq;
    const double k0 = k_integral(lm, 0.0);
    const double rel = std::abs(k0 - parseval) / parseval;
    pass = pass && rel <= 1e-6;
    detail = "means " + fmt(sm_mean) + "/" + fmt(lm_mean) + ", first moment " +
             fmt(lm_first) + ", Parseval rel err " +
             std::to_string(rel);
    report(7, pass, "wavelet admissibility suite", detail);
}

// Criterion 8: short-memory and robustness spot checks.
void criterion_8() {
    // FARIMA(0,-0.25,0), D = -0.5, N = 10^4, psi_SM, ell2 = [5 N^0.1]:
    // sqrt MSE(D_hat_hat) <= 0.10.
    BenchConfig cfg;
    auto farima = process_by_name("farima");
    cfg.processes = {farima};
    cfg.D_values = {-0.5};
    cfg.N_values = {10000};
    cfg.ell_specs = {EllSpec{15, Ell2Mode::power_n01, 0}};
    cfg.replications = 50;
    cfg.master_seed = 80808;
    cfg.wavelet = "sm";
    const auto short_mem = run_bench(cfg);
    const double rmse_short = short_mem.rows[0].rmse_d_hat_hat;
    const bool short_ok = short_mem.rows[0].valid && rmse_short <= 0.10;

    // P1 (uniform innovations), D grid, N = 10^4, ell1 = 15, ell2 = lhat:
    // averaged sqrt MSE <= 0.15 for both estimators.
    BenchConfig p1;
    p1.processes = {process_by_name("p1")};
    p1.D_values = kDGrid;
    p1.N_values = {10000};
    p1.ell_specs = {EllSpec{15, Ell2Mode::adaptive, 0}};
    p1.replications = 50;
    p1.master_seed = 81818;
    const auto robust = run_bench(p1);
    const double rmse_p1_hh = robust.averaged[0].rmse_d_hat_hat;
    const double rmse_p1_t = robust.averaged[0].rmse_d_tilde;
    const bool p1_ok = robust.averaged[0].valid && rmse_p1_hh <= 0.15 &&
                       rmse_p1_t <= 0.15;

    report(8, short_ok && p1_ok, "short-memory and robustness spot checks",
           "FARIMA(0,-0.25,0) sqrtMSE(D_hat_hat) = " + fmt(rmse_short) +
               " <= 0.10; P1 " + fmt(rmse_p1_hh) + "/" + fmt(rmse_p1_t) +
               " <= 0.15");
}

// Criterion 9: invariant suite.
void criterion_9() {
    bool pass = true;
    std::string detail;

    // Scaling invariance of alpha_hat, ell2, D estimates.
    {
        const auto w = make_psi_lm();
        const TimeSeries x =
            circulant_generate(fgn_autocov(0.7, 8192), 8192, 909);
        std::vector<double> scaled(x.values());
        for (double& v : scaled) v *= 1000.0;
        AdaptiveOptions opts;
        opts.compute_ci = false;
        const auto rx = adaptive_estimate(x, w, opts);
        const auto ry = adaptive_estimate(TimeSeries(scaled), w, opts);
        const bool ok = rx.alpha_hat == ry.alpha_hat && rx.ell2 == ry.ell2 &&
                        std::abs(rx.d_hat_hat() - ry.d_hat_hat()) < 1e-9 &&
                        std::abs(rx.d_tilde() - ry.d_tilde()) < 1e-9;
        pass = pass && ok;
        detail += std::string("scaling ") + (ok ? "ok" : "BROKEN") + "; ";
    }

    // Tie-break determinism: flat contrast picks the smallest alpha and the
    // largest upper scale.
    {
        const auto flat = [](long) { return ScaleVariance{1.0, 100}; };
        const auto sel = select_alpha_from(flat, 10000, 15);
        const auto grid = build_grid(10000, 15);
        const bool ok1 = sel.a_hat == grid.points.front().scale;
        const bool ok2 = select_ell2_from(flat, 10000, 7, 15) == 425;
        pass = pass && ok1 && ok2;
        detail += std::string("tie-break ") + (ok1 && ok2 ? "ok" : "BROKEN") + "; ";
    }

    // Parallel determinism of bench reports.
    {
        BenchConfig cfg;
        cfg.processes = {process_by_name("fgn")};
        cfg.D_values = {0.5};
        cfg.N_values = {1000};
        cfg.ell_specs = {EllSpec{10, Ell2Mode::fixed, 10}};
        cfg.replications = 6;
        cfg.master_seed = 99;
        cfg.threads = 1;
        const auto serial = report_to_json(run_bench(cfg));
        cfg.threads = 2;
        const auto parallel = report_to_json(run_bench(cfg));
        const bool ok = serial == parallel;
        pass = pass && ok;
        detail += std::string("parallel determinism ") + (ok ? "ok" : "BROKEN") + "; ";
    }

    // Gamma symmetry and positive semi-definiteness (enforced on build).
    {
        const auto w = make_psi_lm();
        std::vector<long> mult(15);
        for (std::size_t i = 0; i < 15; ++i) mult[i] = static_cast<long>(i + 1);
        bool ok = true;
        try {
            const auto cov = gamma_matrix(w, 0.5, mult);
            for (std::size_t i = 0; i < 15 && ok; ++i)
                for (std::size_t j = 0; j < i && ok; ++j)
                    ok = std::abs(cov->at(i, j) - cov->at(j, i)) <= 1e-8;
        } catch (...) {
            ok = false;
        }
        pass = pass && ok;
        detail += std::string("gamma symmetry/PSD ") + (ok ? "ok" : "BROKEN");
    }

    report(9, pass, "invariant suite", detail);
}

} // namespace

int main() {
    criterion_7(); // cheap ones first
    criterion_9();
    criterion_6();
    criterion_4();
    criterion_1();
    criterion_2();
    criterion_8();
    criterion_3();
    criterion_5();
    if (failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
}
