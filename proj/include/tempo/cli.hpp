#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tempo::cli {

/// Exit codes shared by every subcommand.
enum ExitCode {
    kExitOk = 0,
    kExitNotConverged = 1,
    kExitConfigError = 2,
    kExitRuntimeFault = 3,
};

/// Flat one-key-per-line run configuration (`solver.k = 12`). '#' starts a
/// comment; values may be scalars or comma-separated lists.
class FlatConfig {
public:
    static FlatConfig parse_file(const std::string& path);
    static FlatConfig parse_text(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    /// Rejects any key outside `allowed` (exact matches).
    void ensure_known_keys(const std::vector<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

struct CommandOptions {
    std::string out_path;          ///< overrides output.path when nonempty
    int workers_override = 0;      ///< overrides runtime.workers when > 0
};

/// `solve`: run the configured problem, write `iter,residual_norm,seconds`
/// rows and a summary line.
int cmd_solve(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag);

/// `theory`: evaluate the C-point block norm and its bound over eigenvalue
/// pairs, writing `lambda,mu,m,k,norm_Ecc,bound,truncation_term` rows.
int cmd_theory(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag);

/// `sweep-k`: iterations to convergence over (m, k) combinations, writing
/// `m,k,k_over_ncpoints,iterations,parareal_equivalent` rows.
int cmd_sweep_k(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag);

/// `propagator`: dump an assembled error-propagator matrix as CSV.
int cmd_propagator(const FlatConfig& cfg, const CommandOptions& opt, std::ostream& diag);

} // namespace tempo::cli
