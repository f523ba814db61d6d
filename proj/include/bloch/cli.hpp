#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace bloch::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchema = 1;

enum ExitCode { kOk = 0, kConfigError = 2, kNumericError = 3, kSelftestFailed = 4 };

struct RunConfig {
    std::string potential_path;
    std::string command = "bands";  // bands | green | expand | compare | selftest
    double k_min = 0.0, k_max = 12.0;
    int k_count = 600;
    double x = 0.4, y = 0.1;
    int order = 2;
    std::optional<double> eps;  // branch rule step, default from BranchOptions
    double tol = 1e-12;         // quadrature
    double rtol = 1e-13;        // ODE
    std::string out;            // empty: stdout
    int threads = 0;            // 0: hardware concurrency

    void validate() const;  // throws ConfigError
};

// Runs one command, writing CSV to cfg.out (or `out` when cfg.out is empty).
// Diagnostics go to `err`. Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// The CSV text a command would write; throws ConfigError / NumericError.
std::string render(const RunConfig& cfg);

int main_entry(int argc, char** argv);

}  // namespace bloch::cli
