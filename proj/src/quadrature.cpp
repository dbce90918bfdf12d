#include "wavemem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace wavemem {

namespace {

GaussRule compute_rule(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on Legendre P_n, symmetric pairs.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double p_prime = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            p_prime = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / p_prime;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * p_prime * p_prime);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_rule(std::size_t order) {
    static std::map<std::size_t, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate_gauss(const std::function<double(double)>& f, double a,
                       double b, std::size_t order) {
    const GaussRule& rule = gauss_rule(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < order; ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

double integrate_composite(const std::function<double(double)>& f, double a,
                           double b, std::size_t panels, std::size_t order) {
    if (panels == 0) panels = 1;
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0, comp = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double term = integrate_gauss(f, a + p * h, a + (p + 1) * h, order);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a,
                     double b, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = integrate_gauss(f, a, mid, 16);
    const double right = integrate_gauss(f, mid, b, 16);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= tol)
        return left + right + delta / 63.0;
    return adaptive_step(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, mid, b, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth) {
    const double whole = integrate_gauss(f, a, b, 16);
    return adaptive_step(f, a, b, whole, abs_tol, max_depth);
}

double integrate_graded_left(const std::function<double(double)>& f, double a,
                             double b, std::size_t levels, std::size_t order) {
    const double width = b - a;
    if (width <= 0.0) return 0.0;
    // Panels [a + w*2^-(j+1), a + w*2^-j]; the leftover sliver at the
    // singular end is dropped, its measure is width * 2^-levels.
    double sum = 0.0, comp = 0.0;
    double hi = width;
    for (std::size_t j = 0; j < levels; ++j) {
        const double lo = 0.5 * hi;
        const double term = integrate_gauss(f, a + lo, a + hi, order);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        hi = lo;
    }
    return sum;
}

std::vector<double> incomplete_cosine_table(double s, std::size_t jmax) {
    if (s <= -1.0)
        throw std::invalid_argument("incomplete_cosine_table: s must be > -1");
    const double pi = std::numbers::pi;
    std::vector<double> table(jmax + 1, 0.0);
    // First interval handles the w^s endpoint behavior with graded panels.
    double acc = integrate_graded_left(
        [s](double w) { return std::pow(w, s) * std::cos(w); }, 0.0, pi);
    if (jmax >= 1) table[1] = acc;
    double comp = 0.0;
    for (std::size_t j = 1; j < jmax; ++j) {
        const double lo = j * pi;
        const double hi = (j + 1) * pi;
        const double inc = integrate_gauss(
            [s](double w) { return std::pow(w, s) * std::cos(w); }, lo, hi, 16);
        const double y = inc - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        table[j + 1] = acc;
    }
    return table;
}

} // namespace wavemem
