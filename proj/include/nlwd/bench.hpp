#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlwd/ebayes.hpp"

namespace nlwd {

enum class TestFunction { blocks, bumps, doppler, lcomb1, lcomb2, lcomb3 };

std::string to_string(TestFunction f);
TestFunction test_function_from_string(const std::string& s);
const std::vector<TestFunction>& all_test_functions();

// Piecewise test signals on (0, 1]; lcomb1..3 blend blocks/bumps/doppler.
double eval_test_function(TestFunction f, double t);

// f evaluated on the grid t_i = i/n, i = 1..n.
std::vector<double> sample_function(TestFunction f, std::size_t n);

// y = f + N(0, sigma^2) with sigma = sd(f)/snr (population sd); seeded.
std::vector<double> add_noise(const std::vector<double>& f, double snr, std::uint64_t seed);

double mse(const std::vector<double>& a, const std::vector<double>& b);

// Universal hard-threshold baseline (sigma_hat sqrt(2 log n) on the
// default pyramid); selectable in method lists as "hard".
std::vector<double> hard_threshold_denoise(const std::vector<double>& signal,
                                           const WaveletFilter& filter);

struct ExperimentPlan {
    std::vector<TestFunction> functions;
    std::vector<std::size_t> n_values = {512, 1024, 2048, 4096};
    std::vector<double> snr_values = {3, 5, 7};
    int replications = 100;
    std::vector<std::string> methods;  // method names, or "hard"
    std::uint64_t seed = 0;
    std::string wavelet = "sym6";
    FitOptions fit_options;
    int threads = 1;  // 0: hardware concurrency
};

struct CellStats {
    std::string function;
    std::size_t n = 0;
    double snr = 0.0;
    std::string method;
    double mean_mse = 0.0;
    double sd_mse = 0.0;
    double seconds = 0.0;  // mean wall-clock per replication
    int failures = 0;
    int replications = 0;
    bool valid() const { return failures * 10 <= replications; }
};

struct ExperimentResult {
    std::vector<CellStats> cells;  // function-major, then n, snr, method
};

// Per-cell mean/sd MSE over replications. Noise is shared across methods
// within a replication; all seeds derive from plan.seed, so results are
// independent of the thread count.
ExperimentResult run_experiment(const ExperimentPlan& plan);

// Long-format CSV: function,n,snr,method,mean_mse,sd_mse,seconds.
// Timing is volatile, so it is written as 0 unless include_timing is set.
std::string to_csv(const ExperimentResult& result, bool include_timing);
std::vector<CellStats> parse_results_csv(std::istream& in);

// Count of (n, snr) cells each method wins per function, lowest mean MSE,
// ties to the earlier method row.
struct CountMatrix {
    std::vector<std::string> methods;    // row labels, first-appearance order
    std::vector<std::string> functions;  // column labels
    std::vector<std::vector<int>> wins;  // [method][function]
};
CountMatrix count_matrix(const std::vector<CellStats>& cells);
std::string render_count_matrix(const CountMatrix& m);

}  // namespace nlwd
