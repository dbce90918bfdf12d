// Command-line front end: estimate D from a data file, simulate benchmark
// processes, run Monte Carlo benchmarks, dump log-log plot data and Gamma
// matrices.
//
// Exit codes: 0 success, 2 input parse failure, 3 series too short,
// 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wavemem/adaptive.hpp"
#include "wavemem/bench.hpp"
#include "wavemem/covariance.hpp"
#include "wavemem/errors.hpp"
#include "wavemem/generators.hpp"
#include "wavemem/wavelet.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitParse = 2;
constexpr int kExitTooShort = 3;
constexpr int kExitNumerical = 4;

struct ParseFailure {
    std::size_t line;
    std::string text;
};

// One value per line, '.' decimal, optional single header line.
std::vector<double> read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseFailure{0, "cannot open input file: " + path};
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
            trimmed.pop_back();
        std::size_t start = trimmed.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        trimmed = trimmed.substr(start);
        char* end = nullptr;
        const double v = std::strtod(trimmed.c_str(), &end);
        const bool parsed = end != trimmed.c_str() && *end == '\0' &&
                            std::isfinite(v);
        if (!parsed) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw ParseFailure{line_no, trimmed};
        }
        header_allowed = false;
        values.push_back(v);
    }
    return values;
}

wavemem::MotherWavelet resolve_wavelet(const std::string& spec,
                                       const std::string& csv_class,
                                       int csv_moments) {
    if (spec.rfind("csv:", 0) == 0) {
        const std::string path = spec.substr(4);
        std::ifstream in(path);
        if (!in) throw ParseFailure{0, "cannot open wavelet file: " + path};
        std::vector<double> ts, vs;
        std::string line;
        std::size_t line_no = 0;
        bool header_allowed = true;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::istringstream ls(line);
            std::string a, b;
            if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
                if (header_allowed) {
                    header_allowed = false;
                    continue;
                }
                throw ParseFailure{line_no, line};
            }
            char* ea = nullptr;
            char* eb = nullptr;
            const double t = std::strtod(a.c_str(), &ea);
            const double v = std::strtod(b.c_str(), &eb);
            if (ea == a.c_str() || eb == b.c_str()) {
                if (header_allowed) {
                    header_allowed = false;
                    continue;
                }
                throw ParseFailure{line_no, line};
            }
            header_allowed = false;
            ts.push_back(t);
            vs.push_back(v);
        }
        const auto cls = csv_class == "winf"
                             ? wavemem::SmoothnessClass::w_infinity
                             : wavemem::SmoothnessClass::w_5_2;
        auto w = wavemem::make_tabulated("csv:" + path, ts, vs, cls, csv_moments);
        wavemem::validate_admissibility(w);
        return w;
    }
    return wavemem::wavelet_by_name(spec);
}

wavemem::Ell2Mode parse_ell2_mode(const std::string& mode) {
    if (mode == "adaptive" || mode == "lhat") return wavemem::Ell2Mode::adaptive;
    if (mode == "fixed") return wavemem::Ell2Mode::fixed;
    if (mode == "power-n01") return wavemem::Ell2Mode::power_n01;
    if (mode == "power-alpha") return wavemem::Ell2Mode::power_alpha;
    throw wavemem::domain_error("unknown ell2 mode: " + mode);
}

json adaptive_result_to_json(const wavemem::AdaptiveResult& res, double level) {
    json j;
    j["D_hat_hat"] = res.d_hat_hat();
    j["D_tilde"] = res.d_tilde();
    j["alpha_hat"] = res.alpha_hat;
    j["alpha_tilde"] = res.alpha_tilde;
    j["Dprime_hat"] = res.dprime_hat;
    j["a_hat"] = res.a_hat;
    j["a_tilde"] = res.a_tilde;
    j["ell1"] = res.ell1;
    j["ell2"] = res.ell2;
    auto fit = [level](const wavemem::EstimateResult& r) {
        json f;
        f["D_hat"] = r.D_hat;
        f["K_hat"] = r.K_hat;
        f["base_scale"] = r.base_scale;
        f["ell_used"] = r.ell_used;
        f["residual_ss"] = r.residual_ss;
        if (r.sigma2_D) f["sigma2_D"] = *r.sigma2_D;
        if (r.ci_low && r.ci_high) {
            f["ci_level"] = level;
            f["ci_low"] = *r.ci_low;
            f["ci_high"] = *r.ci_high;
        }
        return f;
    };
    j["fit_at_a_hat"] = fit(res.at_a_hat);
    j["fit_at_a_tilde"] = fit(res.at_a_tilde);
    json profile = json::array();
    for (const auto& p : res.contrast_profile) {
        json row;
        row["alpha"] = p.alpha;
        row["scale"] = p.scale;
        row["feasible"] = p.feasible;
        if (p.feasible) row["Q"] = p.q;
        profile.push_back(row);
    }
    j["contrast_profile"] = profile;
    return j;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::endl;
        return;
    }
    std::ofstream out(path);
    out << content << std::endl;
}

int run_estimate(const std::string& input, const std::string& wavelet_spec,
                 const std::string& csv_class, int csv_moments,
                 std::size_t ell1, const std::string& ell2_mode,
                 std::size_t ell2, double level, bool no_ci,
                 const std::string& output) {
    const std::vector<double> values = read_series_file(input);
    const double min_n = static_cast<double>(ell1) * std::exp(2.0);
    if (static_cast<double>(values.size()) < min_n) {
        std::cerr << "series too short: " << values.size() << " values, need >= "
                  << static_cast<std::size_t>(std::ceil(min_n)) << "\n";
        return kExitTooShort;
    }
    const auto w = resolve_wavelet(wavelet_spec, csv_class, csv_moments);
    wavemem::AdaptiveOptions opts;
    opts.ell1 = ell1;
    opts.ell2_mode = parse_ell2_mode(ell2_mode);
    opts.ell2_fixed = ell2;
    opts.compute_ci = !no_ci;
    opts.ci_level = level;
    const auto res =
        wavemem::adaptive_estimate(wavemem::TimeSeries(values), w, opts);
    write_output(output, adaptive_result_to_json(res, level).dump(2));
    return 0;
}

int run_simulate(const std::string& process, std::optional<double> H,
                 std::optional<double> D, std::optional<double> d,
                 double Dprime, double phi, double theta, bool has_phi,
                 bool has_theta, std::size_t N, std::uint64_t seed,
                 const std::string& output) {
    using wavemem::ProcessSpec;
    wavemem::TimeSeries series({0.0, 0.0});
    if (process == "fgn") {
        const double h = H ? *H : (D ? (*D + 1.0) / 2.0 : 0.5);
        series =
            wavemem::circulant_generate(wavemem::fgn_autocov(h, N), N, seed);
    } else if (process == "farima") {
        wavemem::FarimaModel model;
        model.d = d ? *d : (D ? *D / 2.0 : 0.0);
        if (has_phi) model.ar = {phi};
        if (has_theta) model.ma = {theta};
        series = wavemem::circulant_generate(wavemem::farima_autocov(model, N),
                                             N, seed);
    } else if (process == "powerlaw") {
        series = wavemem::circulant_generate(
            wavemem::powerlaw_autocov(D ? *D : 0.0, Dprime, N), N, seed);
    } else if (process == "p1" || process == "p2" || process == "p3") {
        const auto kind = process == "p1" ? wavemem::InnovationKind::uniform
                          : process == "p2"
                              ? wavemem::InnovationKind::pareto_like
                              : wavemem::InnovationKind::cauchy;
        series = wavemem::nongaussian_farima(
            kind, d ? *d : (D ? *D / 2.0 : 0.0), N, seed);
    } else if (process == "p4") {
        series = wavemem::p4_generate(N, seed);
    } else {
        throw wavemem::domain_error("unknown process: " + process);
    }
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < series.length(); ++i) os << series[i] << "\n";
    if (output.empty() || output == "-") {
        std::cout << os.str();
    } else {
        std::ofstream out(output);
        out << os.str();
    }
    return 0;
}

wavemem::EllSpec parse_ell_token(const std::string& token, std::size_t ell1) {
    wavemem::EllSpec spec;
    spec.ell1 = ell1;
    if (token == "lhat" || token == "adaptive") {
        spec.mode = wavemem::Ell2Mode::adaptive;
    } else if (token == "n01") {
        spec.mode = wavemem::Ell2Mode::power_n01;
    } else if (token == "nalpha") {
        spec.mode = wavemem::Ell2Mode::power_alpha;
    } else {
        spec.mode = wavemem::Ell2Mode::fixed;
        const long v = std::strtol(token.c_str(), nullptr, 10);
        if (v < 3) throw wavemem::domain_error("bad ell token: " + token);
        spec.ell1 = static_cast<std::size_t>(v);
        spec.ell2 = static_cast<std::size_t>(v);
    }
    return spec;
}

wavemem::BenchConfig config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseFailure{0, "cannot open config file: " + path};
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseFailure{0, std::string("config JSON: ") + e.what()};
    }
    wavemem::BenchConfig cfg;
    cfg.wavelet = j.value("wavelet", "lm");
    cfg.master_seed = j.value("master_seed", 1ULL);
    cfg.replications = j.value("replications", 50ULL);
    if (j.contains("threads")) cfg.threads = j["threads"].get<std::size_t>();
    for (const auto& p : j.at("processes")) {
        if (p.is_string()) {
            cfg.processes.push_back(wavemem::process_by_name(p.get<std::string>()));
        } else {
            auto spec = wavemem::process_by_name(p.at("kind").get<std::string>());
            if (p.contains("phi")) spec.ar = {p["phi"].get<double>()};
            if (p.contains("theta")) spec.ma = {p["theta"].get<double>()};
            if (p.contains("Dprime")) spec.dprime = p["Dprime"].get<double>();
            cfg.processes.push_back(spec);
        }
    }
    for (const auto& v : j.at("D_values")) cfg.D_values.push_back(v.get<double>());
    for (const auto& v : j.at("N_values"))
        cfg.N_values.push_back(v.get<std::size_t>());
    const std::size_t ell1 = j.value("ell1", 15ULL);
    for (const auto& v : j.at("ell")) {
        if (v.is_number_integer()) {
            wavemem::EllSpec spec;
            spec.ell1 = v.get<std::size_t>();
            spec.ell2 = spec.ell1;
            spec.mode = wavemem::Ell2Mode::fixed;
            cfg.ell_specs.push_back(spec);
        } else {
            cfg.ell_specs.push_back(parse_ell_token(v.get<std::string>(), ell1));
        }
    }
    return cfg;
}

int run_bench_cmd(const std::string& config_path,
                  const std::vector<std::string>& processes,
                  const std::vector<double>& Ds,
                  const std::vector<std::size_t>& Ns,
                  const std::vector<std::string>& ells, std::size_t ell1,
                  std::size_t reps, std::uint64_t seed,
                  const std::string& wavelet, const std::string& output,
                  bool text) {
    wavemem::BenchConfig cfg;
    if (!config_path.empty()) {
        cfg = config_from_json(config_path);
    } else {
        for (const auto& p : processes)
            cfg.processes.push_back(wavemem::process_by_name(p));
        cfg.D_values = Ds;
        cfg.N_values = Ns;
        for (const auto& e : ells)
            cfg.ell_specs.push_back(parse_ell_token(e, ell1));
        cfg.replications = reps;
        cfg.master_seed = seed;
        cfg.wavelet = wavelet;
    }
    const auto report = wavemem::run_bench(cfg);
    write_output(output, wavemem::report_to_json(report));
    if (text) std::cerr << wavemem::report_to_text(report);
    return 0;
}

int run_loglog(const std::string& input, const std::string& wavelet_spec,
               const std::string& csv_class, int csv_moments, std::size_t ell1,
               const std::string& format, const std::string& output) {
    const std::vector<double> values = read_series_file(input);
    const double min_n = static_cast<double>(ell1) * std::exp(2.0);
    if (static_cast<double>(values.size()) < min_n) {
        std::cerr << "series too short for loglog\n";
        return kExitTooShort;
    }
    const auto w = resolve_wavelet(wavelet_spec, csv_class, csv_moments);
    const wavemem::TimeSeries x(values);
    const auto grid = wavemem::build_grid(x.length(), ell1);
    const auto table = wavemem::loglog_dump(x, w, grid);
    if (format == "csv") {
        std::ostringstream os;
        os.precision(12);
        os << "scale,log_scale,log_variance,count,note\n";
        for (const auto& row : table.rows) {
            os << row.scale << "," << row.log_scale << ",";
            if (row.log_variance) os << *row.log_variance;
            os << "," << row.count << "," << row.note << "\n";
        }
        os << "# a_hat=" << table.a_hat << " a_tilde=" << table.a_tilde
           << " slope=" << table.slope << " intercept=" << table.intercept;
        write_output(output, os.str());
    } else {
        json j;
        j["a_hat"] = table.a_hat;
        j["a_tilde"] = table.a_tilde;
        j["slope"] = table.slope;
        j["intercept"] = table.intercept;
        json rows = json::array();
        for (const auto& row : table.rows) {
            json r;
            r["scale"] = row.scale;
            r["log_scale"] = row.log_scale;
            if (row.log_variance) r["log_variance"] = *row.log_variance;
            r["count"] = row.count;
            if (!row.note.empty()) r["note"] = row.note;
            rows.push_back(r);
        }
        j["rows"] = rows;
        write_output(output, j.dump(2));
    }
    return 0;
}

int run_gamma(const std::string& wavelet_spec, const std::string& csv_class,
              int csv_moments, double D, std::size_t ell,
              const std::string& output) {
    const auto w = resolve_wavelet(wavelet_spec, csv_class, csv_moments);
    std::vector<long> multipliers(ell);
    for (std::size_t i = 0; i < ell; ++i) multipliers[i] = static_cast<long>(i + 1);
    const auto cov = wavemem::gamma_matrix(w, D, multipliers);
    json j;
    j["wavelet"] = w.name();
    j["D"] = cov->D;
    j["ell"] = ell;
    j["sigma2_D"] = wavemem::sigma2_d(*cov);
    j["m_max"] = cov->m_max;
    j["u_max"] = cov->u_max;
    json rows = json::array();
    for (std::size_t i = 0; i < ell; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < ell; ++k) row.push_back(cov->at(i, k));
        rows.push_back(row);
    }
    j["gamma"] = rows;
    write_output(output, j.dump(2));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive wavelet-based estimation of the memory parameter"};
    app.require_subcommand(1);

    std::string input, output, wavelet = "lm", csv_class = "w52";
    int csv_moments = 1;
    std::size_t ell1 = 15, ell2 = 0, N = 1000;
    std::string ell2_mode = "adaptive";
    double level = 0.95;
    bool no_ci = false;

    auto* est = app.add_subcommand("estimate", "Estimate D from a data file");
    est->add_option("--input,-i", input, "series file, one value per line")
        ->required();
    est->add_option("--wavelet,-w", wavelet, "sm | lm | csv:<path>");
    est->add_option("--wavelet-class", csv_class, "winf | w52 (csv wavelets)");
    est->add_option("--wavelet-moments", csv_moments,
                    "vanishing moments (csv wavelets)");
    est->add_option("--ell1", ell1, "number of regression scales");
    est->add_option("--ell2-mode", ell2_mode,
                    "adaptive | fixed | power-n01 | power-alpha");
    est->add_option("--ell2", ell2, "ell2 for fixed mode");
    est->add_option("--level", level, "confidence level in (0,1)");
    est->add_flag("--no-ci", no_ci, "skip confidence intervals");
    est->add_option("--output,-o", output, "output path (default stdout)");

    std::string process = "fgn";
    std::optional<double> opt_H, opt_D, opt_d;
    double Dprime = 1.0, phi = 0.0, theta = 0.0;
    std::uint64_t seed = 1;
    auto* sim = app.add_subcommand("simulate", "Simulate a benchmark process");
    sim->add_option("--process,-p", process,
                    "fgn | farima | powerlaw | p1 | p2 | p3 | p4");
    sim->add_option("--H", opt_H, "Hurst index (fgn)");
    sim->add_option("--D", opt_D, "memory parameter");
    sim->add_option("--d", opt_d, "fractional order (farima, p1-p3)");
    sim->add_option("--Dprime", Dprime, "power-law D'");
    auto* phi_opt = sim->add_option("--phi", phi, "AR(1) coefficient");
    auto* theta_opt = sim->add_option("--theta", theta, "MA(1) coefficient");
    sim->add_option("--N,-n", N, "series length")->required();
    sim->add_option("--seed,-s", seed, "random seed");
    sim->add_option("--output,-o", output, "output path (default stdout)");

    std::string config_path;
    std::vector<std::string> bench_processes, bench_ells;
    std::vector<double> bench_Ds;
    std::vector<std::size_t> bench_Ns;
    std::size_t reps = 50;
    bool text = false;
    auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark");
    bench->add_option("--config,-c", config_path, "JSON config file");
    bench->add_option("--process", bench_processes,
                      "fgn | farima | farima10 | farima11 | powerlaw | p1..p4");
    bench->add_option("--D", bench_Ds, "memory parameter grid");
    bench->add_option("--N", bench_Ns, "series lengths");
    bench->add_option("--ell", bench_ells, "ell columns: integer | lhat | n01 | nalpha");
    bench->add_option("--ell1", ell1, "ell1 for adaptive columns");
    bench->add_option("--reps,-r", reps, "replications per cell");
    bench->add_option("--seed,-s", seed, "master seed");
    bench->add_option("--wavelet,-w", wavelet, "wavelet name");
    bench->add_option("--output,-o", output, "report JSON path");
    bench->add_flag("--text", text, "print aligned text table to stderr");

    std::string format = "csv";
    auto* loglog = app.add_subcommand("loglog", "Dump log-log plot data");
    loglog->add_option("--input,-i", input, "series file")->required();
    loglog->add_option("--wavelet,-w", wavelet, "wavelet name");
    loglog->add_option("--wavelet-class", csv_class, "winf | w52");
    loglog->add_option("--wavelet-moments", csv_moments, "vanishing moments");
    loglog->add_option("--ell1", ell1, "number of regression scales");
    loglog->add_option("--format,-f", format, "csv | json");
    loglog->add_option("--output,-o", output, "output path (default stdout)");

    double gamma_D = 0.5;
    std::size_t gamma_ell = 15;
    auto* gamma = app.add_subcommand("gamma", "Dump Gamma matrix and sigma2_D");
    gamma->add_option("--wavelet,-w", wavelet, "wavelet name");
    gamma->add_option("--wavelet-class", csv_class, "winf | w52");
    gamma->add_option("--wavelet-moments", csv_moments, "vanishing moments");
    gamma->add_option("--D", gamma_D, "memory parameter")->required();
    gamma->add_option("--ell", gamma_ell, "number of multipliers (1..ell)");
    gamma->add_option("--output,-o", output, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed())
            return run_estimate(input, wavelet, csv_class, csv_moments, ell1,
                                ell2_mode, ell2, level, no_ci, output);
        if (sim->parsed())
            return run_simulate(process, opt_H, opt_D, opt_d, Dprime, phi,
                                theta, phi_opt->count() > 0,
                                theta_opt->count() > 0, N, seed, output);
        if (bench->parsed())
            return run_bench_cmd(config_path, bench_processes, bench_Ds,
                                 bench_Ns, bench_ells, ell1, reps, seed,
                                 wavelet, output, text);
        if (loglog->parsed())
            return run_loglog(input, wavelet, csv_class, csv_moments, ell1,
                              format, output);
        if (gamma->parsed())
            return run_gamma(wavelet, csv_class, csv_moments, gamma_D,
                             gamma_ell, output);
    } catch (const ParseFailure& e) {
        if (e.line > 0)
            std::cerr << "parse error at line " << e.line << ": " << e.text
                      << "\n";
        else
            std::cerr << "parse error: " << e.text << "\n";
        return kExitParse;
    } catch (const wavemem::insufficient_data& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitTooShort;
    } catch (const wavemem::error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
