#include "tempo/cli.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "tempo/errors.hpp"
#include "tempo/problems/dahlquist.hpp"
#include "tempo/problems/gray_scott.hpp"
#include "tempo/problems/heat1d.hpp"
#include "tempo/runtime/parallel.hpp"
#include "tempo/solver.hpp"
#include "tempo/theory.hpp"

namespace tempo::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) parts.push_back(t);
    }
    return parts;
}

} // namespace

FlatConfig FlatConfig::parse_text(const std::string& text) {
    FlatConfig cfg;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");
        }
        if (!cfg.values_.emplace(key, value).second) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }
    }
    return cfg;
}

FlatConfig FlatConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

bool FlatConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string FlatConfig::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
}

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double FlatConfig::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: '" + raw + "'");
    }
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int FlatConfig::get_int(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        std::size_t pos = 0;
        const long v = std::stol(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an integer: '" + raw + "'");
    }
}

int FlatConfig::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<int> FlatConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const std::string& part : split_list(get_string(key))) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(part, &pos));
            if (pos != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-integer entry '" +
                              part + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
    return out;
}

std::vector<double> FlatConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& part : split_list(get_string(key))) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(part, &pos));
            if (pos != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-numeric entry '" +
                              part + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
    return out;
}

void FlatConfig::ensure_known_keys(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        (void)value;
        bool known = false;
        for (const std::string& a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("config: unknown key '" + key + "'");
    }
}

// ---------------------------------------------------------------------------
// Shared builders

namespace {

void append(std::vector<std::string>& into, const std::vector<std::string>& more) {
    into.insert(into.end(), more.begin(), more.end());
}

const std::vector<std::string> kGridKeys = {"grid.t0", "grid.tf", "grid.n_points"};

const std::vector<std::string> kSolverCommonKeys = {
    "solver.mode",      "solver.relaxation",     "solver.nu",
    "solver.max_iters", "solver.tol",            "solver.initial_guess",
    "solver.seed",      "solver.coarse_substeps", "solver.norm",
};

const std::vector<std::string> kRuntimeKeys = {"runtime.workers", "runtime.trace"};

std::vector<std::string> problem_keys(const std::string& problem) {
    if (problem == "dahlquist") return {"dahlquist.lambda", "dahlquist.u0"};
    if (problem == "heat1d") return {"heat1d.dof", "heat1d.x0", "heat1d.x1"};
    if (problem == "grayscott") {
        return {"grayscott.n",    "grayscott.domain",     "grayscott.feed",
                "grayscott.kill", "grayscott.du",         "grayscott.dv",
                "grayscott.newton_tol", "grayscott.newton_max_iters"};
    }
    throw ConfigError("config: unknown problem '" + problem + "'");
}

TimeGrid grid_from(const FlatConfig& cfg) {
    return TimeGrid::make(cfg.get_double("grid.t0", 0.0), cfg.get_double("grid.tf"),
                          cfg.get_int("grid.n_points"));
}

CycleMode mode_from(const std::string& name) {
    if (name == "two-level") return CycleMode::TwoLevel;
    if (name == "v-cycle") return CycleMode::VCycle;
    if (name == "nested-v") return CycleMode::NestedV;
    throw ConfigError("config: solver.mode must be two-level, v-cycle or nested-v");
}

SolverConfig solver_config_from(const FlatConfig& cfg) {
    SolverConfig sc;
    sc.mode = mode_from(cfg.get_string("solver.mode", "two-level"));
    const std::string relax = cfg.get_string("solver.relaxation", "F");
    if (relax == "F") {
        sc.relaxation = Relaxation::F;
    } else if (relax == "FCF") {
        sc.relaxation = Relaxation::FCF;
    } else {
        throw ConfigError("config: solver.relaxation must be F or FCF");
    }
    sc.nu = cfg.get_int("solver.nu", 1);
    sc.max_iters = cfg.get_int("solver.max_iters", 100);
    sc.tol = cfg.get_double("solver.tol");
    const std::string guess = cfg.get_string("solver.initial_guess", "constant");
    if (guess == "constant") {
        sc.initial_guess = InitialGuess::Constant;
    } else if (guess == "random") {
        sc.initial_guess = InitialGuess::Random;
    } else {
        throw ConfigError("config: solver.initial_guess must be constant or random");
    }
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("solver.seed", 0));
    sc.coarse_substeps = cfg.get_int("solver.coarse_substeps", 1);
    const std::string norm = cfg.get_string("solver.norm", "residual-2norm");
    if (norm == "residual-2norm") {
        sc.norm = NormKind::ResidualL2;
    } else if (norm == "functional-change") {
        sc.norm = NormKind::FunctionalChange;
        sc.functional = [](const StateVector& u) { return u.norm2(); };
    } else {
        throw ConfigError("config: solver.norm must be residual-2norm or functional-change");
    }
    return sc;
}

std::unique_ptr<Application> application_from(const FlatConfig& cfg,
                                              const std::string& problem, bool folded) {
    if (problem == "dahlquist") {
        return std::make_unique<problems::Dahlquist>(cfg.get_double("dahlquist.lambda", -1.0),
                                                     cfg.get_double("dahlquist.u0", 1.0),
                                                     folded);
    }
    if (problem == "heat1d") {
        problems::Heat1D::Options opt;
        opt.n_dof = cfg.get_int("heat1d.dof", 1025);
        opt.x0 = cfg.get_double("heat1d.x0", 0.0);
        opt.x1 = cfg.get_double("heat1d.x1", 1.0);
        opt.folded = folded;
        return std::make_unique<problems::Heat1D>(opt);
    }
    if (problem == "grayscott") {
        problems::GrayScott::Options opt;
        opt.n = cfg.get_int("grayscott.n", 32);
        opt.domain = cfg.get_double("grayscott.domain", 2.5);
        opt.feed = cfg.get_double("grayscott.feed", 0.024);
        opt.kill = cfg.get_double("grayscott.kill", 0.06);
        opt.du = cfg.get_double("grayscott.du", 8e-5);
        opt.dv = cfg.get_double("grayscott.dv", 4e-5);
        opt.newton_tol = cfg.get_double("grayscott.newton_tol", 1e-10);
        opt.newton_max_iters = cfg.get_int("grayscott.newton_max_iters", 30);
        return std::make_unique<problems::GrayScott>(opt);
    }
    throw ConfigError("config: unknown problem '" + problem + "'");
}

class OutputFile {
public:
    explicit OutputFile(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file '" + path + "'");
        }
    }

    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

SolveResult run_configured(Application& app, const Hierarchy& hier, const SolverConfig& sc,
                           int workers, const std::string& trace_path) {
    TraceSink trace;
    std::shared_ptr<std::ofstream> trace_file;
    if (!trace_path.empty()) {
        trace_file = std::make_shared<std::ofstream>(trace_path);
        if (!*trace_file) throw ConfigError("cannot open trace file '" + trace_path + "'");
        *trace_file << "iter,rank,phase,seconds\n";
        trace = [trace_file](int iter, int rank, const std::string& phase, double seconds) {
            *trace_file << iter << ',' << rank << ',' << phase << ',' << seconds << '\n';
        };
    }
    if (workers <= 1) return solve(app, hier, sc, trace);
    runtime::ParallelOptions opt;
    opt.workers = workers;
    opt.trace = trace;
    return runtime::run_parallel(app, hier, sc, opt);
}

int map_failure(const std::exception& e, std::ostream& diag) {
    diag << "error: " << e.what() << "\n";
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfigError;
    return kExitRuntimeFault;
}

} // namespace

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    try {
        const std::string problem = cfg.get_string("problem");
        std::vector<std::string> allowed = {"problem", "solver.m", "solver.k",
                                            "output.path"};
        append(allowed, kGridKeys);
        append(allowed, kSolverCommonKeys);
        append(allowed, kRuntimeKeys);
        append(allowed, problem_keys(problem));
        cfg.ensure_known_keys(allowed);

        const SolverConfig sc = solver_config_from(cfg);
        const bool folded = sc.mode != CycleMode::TwoLevel;
        std::unique_ptr<Application> app = application_from(cfg, problem, folded);
        const Hierarchy hier = build_hierarchy(grid_from(cfg), cfg.get_int_list("solver.m"),
                                               cfg.get_int("solver.k"));
        const int workers = opt.workers_override > 0 ? opt.workers_override
                                                     : cfg.get_int("runtime.workers", 1);

        const SolveResult result = run_configured(*app, hier, sc, workers,
                                                  cfg.get_string("runtime.trace", ""));

        const std::string out_path =
            !opt.out_path.empty() ? opt.out_path : cfg.get_string("output.path", "");
        OutputFile out(out_path);
        out.stream() << "iter,residual_norm,seconds\n";
        out.stream().precision(17);
        for (std::size_t i = 0; i < result.report.residual_norms.size(); ++i) {
            out.stream() << (i + 1) << ',' << result.report.residual_norms[i] << ','
                         << result.report.iteration_seconds[i] << '\n';
        }
        out.stream() << "converged,iterations,total_seconds\n";
        out.stream() << (result.report.converged ? 1 : 0) << ','
                     << result.report.iterations << ','
                     << result.report.timings.at("total") << '\n';
        return result.report.converged ? kExitOk : kExitNotConverged;
    } catch (const std::exception& e) {
        return map_failure(e, diag);
    }
}

// ---------------------------------------------------------------------------
// sweep-k

int cmd_sweep_k(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    try {
        const std::string problem = cfg.get_string("problem");
        std::vector<std::string> allowed = {"problem", "sweep.m_values", "sweep.k_values",
                                            "output.path"};
        append(allowed, kGridKeys);
        append(allowed, kSolverCommonKeys);
        append(allowed, kRuntimeKeys);
        append(allowed, problem_keys(problem));
        cfg.ensure_known_keys(allowed);

        const SolverConfig sc = solver_config_from(cfg);
        const bool folded = sc.mode != CycleMode::TwoLevel;
        const TimeGrid grid = grid_from(cfg);
        const int workers = opt.workers_override > 0 ? opt.workers_override
                                                     : cfg.get_int("runtime.workers", 1);

        const std::string out_path =
            !opt.out_path.empty() ? opt.out_path : cfg.get_string("output.path", "");
        OutputFile out(out_path);
        out.stream() << "m,k,k_over_ncpoints,iterations,parareal_equivalent\n";

        for (int m : cfg.get_int_list("sweep.m_values")) {
            const int n_coarse = (grid.n_points - 1) / m + 1;
            for (int k_raw : cfg.get_int_list("sweep.k_values")) {
                const int k = k_raw == 0 ? n_coarse : k_raw;  // 0 selects the full grid
                std::unique_ptr<Application> app = application_from(cfg, problem, folded);
                const Hierarchy hier = build_hierarchy(grid, {m}, k);
                const SolveResult result =
                    run_configured(*app, hier, sc, workers, "");
                out.stream() << m << ',' << k << ','
                             << static_cast<double>(k) / n_coarse << ','
                             << result.report.iterations << ','
                             << (k >= n_coarse ? 1 : 0) << '\n';
                if (!result.report.converged) {
                    diag << "warning: m=" << m << " k=" << k
                         << " did not converge within solver.max_iters\n";
                }
            }
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return map_failure(e, diag);
    }
}

// ---------------------------------------------------------------------------
// theory

int cmd_theory(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    try {
        std::vector<std::string> allowed = {
            "theory.lambda", "theory.mu",     "theory.spectrum", "theory.m",
            "theory.k",      "theory.p_count", "output.path",
            "heat1d.dof",    "heat1d.x0",     "heat1d.x1",
        };
        append(allowed, kGridKeys);
        cfg.ensure_known_keys(allowed);

        const int p_count = cfg.get_int("theory.p_count", 32);
        const std::vector<int> ms = cfg.get_int_list("theory.m");
        const std::vector<int> ks = cfg.get_int_list("theory.k");

        const bool spectrum_mode = cfg.has("theory.spectrum");
        std::optional<problems::Heat1D> heat;
        std::optional<TimeGrid> grid;
        if (spectrum_mode) {
            if (cfg.get_string("theory.spectrum") != "heat1d") {
                throw ConfigError("config: theory.spectrum supports only 'heat1d'");
            }
            problems::Heat1D::Options hopt;
            hopt.n_dof = cfg.get_int("heat1d.dof", 1025);
            hopt.x0 = cfg.get_double("heat1d.x0", 0.0);
            hopt.x1 = cfg.get_double("heat1d.x1", 1.0);
            heat.emplace(hopt);
            grid = grid_from(cfg);
        }

        const std::string out_path =
            !opt.out_path.empty() ? opt.out_path : cfg.get_string("output.path", "");
        OutputFile out(out_path);
        out.stream() << "lambda,mu,m,k,norm_Ecc,bound,truncation_term\n";
        out.stream().precision(17);

        int skipped = 0;
        for (int m : ms) {
            std::vector<theory::EigenPair> pairs;
            if (spectrum_mode) {
                const Hierarchy hier = build_hierarchy(*grid, {m}, 2);
                heat->configure(make_level_specs(hier, 1));
                const std::vector<double> fine = heat->step_multipliers(0);
                const std::vector<double> coarse = heat->step_multipliers(1);
                for (std::size_t i = 0; i < fine.size(); ++i) {
                    pairs.push_back({fine[i], coarse[i]});
                }
            } else {
                for (double lam : cfg.get_double_list("theory.lambda")) {
                    for (double mu : cfg.get_double_list("theory.mu")) {
                        pairs.push_back({lam, mu});
                    }
                }
            }
            for (int k : ks) {
                for (const theory::EigenPair& pair : pairs) {
                    if (std::abs(pair.mu) >= 1.0) {
                        ++skipped;
                        continue;
                    }
                    const double norm =
                        theory::operator_norm(theory::cc_block(pair.lambda, pair.mu, m, k,
                                                               p_count));
                    const theory::BoundTerms terms = theory::cc_bound_terms(pair, m, k);
                    out.stream() << pair.lambda.real() << ',' << pair.mu.real() << ','
                                 << m << ',' << k << ',' << norm << ',' << terms.total()
                                 << ',' << terms.truncation_term << '\n';
                }
            }
        }
        if (skipped > 0) {
            diag << "warning: skipped " << skipped << " pairs with |mu| >= 1\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return map_failure(e, diag);
    }
}

// ---------------------------------------------------------------------------
// propagator

int cmd_propagator(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    try {
        cfg.ensure_known_keys({"propagator.operator", "propagator.phi", "propagator.psi",
                               "propagator.lambda", "propagator.mu", "propagator.m",
                               "propagator.k", "propagator.n_t", "propagator.p_count",
                               "output.path"});

        const std::string kind = cfg.get_string("propagator.operator");
        const int m = cfg.get_int("propagator.m");
        const int k = cfg.get_int("propagator.k");

        const std::string out_path =
            !opt.out_path.empty() ? opt.out_path : cfg.get_string("output.path", "");
        OutputFile out(out_path);
        out.stream().precision(17);

        if (kind == "exact" || kind == "approx") {
            const int n_t = cfg.get_int("propagator.n_t");
            const double phi = cfg.get_double("propagator.phi");
            const theory::PropagatorMatrix p =
                kind == "exact"
                    ? theory::error_propagator_exact(phi, m, k, n_t)
                    : theory::error_propagator_approx(phi, cfg.get_double("propagator.psi"),
                                                      m, k, n_t);
            for (Eigen::Index i = 0; i < p.matrix.rows(); ++i) {
                for (Eigen::Index j = 0; j < p.matrix.cols(); ++j) {
                    out.stream() << p.matrix(i, j)
                                 << (j + 1 == p.matrix.cols() ? '\n' : ',');
                }
            }
            return kExitOk;
        }
        if (kind == "cc") {
            const Eigen::MatrixXcd e =
                theory::cc_block(cfg.get_double("propagator.lambda"),
                                 cfg.get_double("propagator.mu"), m, k,
                                 cfg.get_int("propagator.p_count"));
            for (Eigen::Index i = 0; i < e.rows(); ++i) {
                for (Eigen::Index j = 0; j < e.cols(); ++j) {
                    out.stream() << e(i, j).real() << (j + 1 == e.cols() ? '\n' : ',');
                }
            }
            return kExitOk;
        }
        throw ConfigError("config: propagator.operator must be exact, approx or cc");
    } catch (const std::exception& e) {
        return map_failure(e, diag);
    }
}

} // namespace tempo::cli
