#include "nlwd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "nlwd/errors.hpp"
#include "nlwd/posterior.hpp"
#include "nlwd/rng.hpp"

namespace nlwd {

namespace {

// Jump locations and heights for the dispersed variants of the classic
// piecewise test signals.
constexpr double kT[11] = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr double kBlocksH[11] = {4, -8, 3, -4, 8, -4.2, 2.1, 4.3, -6.1, 2.1, -4.7};
constexpr double kBumpsH[11] = {2, 10, 1, 4, 8, 4.2, 2.1, 4.3, 1.1, 3.1, 8.2};
constexpr double kBumpsW[11] = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005};

double blocks_at(double t) {
    double s = 0.0;
    for (int j = 0; j < 11; ++j) {
        const double u = t - kT[j];
        const double sign = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        s += kBlocksH[j] * 0.5 * (1.0 + sign);
    }
    return s;
}

double bumps_at(double t) {
    double s = 0.0;
    for (int j = 0; j < 11; ++j) {
        const double u = std::fabs((t - kT[j]) / kBumpsW[j]);
        const double b = 1.0 + u;
        const double b2 = b * b;
        s += kBumpsH[j] / (b2 * b2);
    }
    return s;
}

double doppler_at(double t) {
    constexpr double eps = 0.01;
    return std::sqrt(t * (1.0 - t)) *
           std::sin(2.0 * std::numbers::pi * (1.0 + eps) / (t + eps));
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

double population_sd(const std::vector<double>& f) {
    const double n = static_cast<double>(f.size());
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : f) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string to_string(TestFunction f) {
    switch (f) {
        case TestFunction::blocks: return "blocks";
        case TestFunction::bumps: return "bumps";
        case TestFunction::doppler: return "doppler";
        case TestFunction::lcomb1: return "lcomb1";
        case TestFunction::lcomb2: return "lcomb2";
        case TestFunction::lcomb3: return "lcomb3";
    }
    return "?";
}

TestFunction test_function_from_string(const std::string& s) {
    for (TestFunction f : all_test_functions()) {
        if (to_string(f) == s) return f;
    }
    throw data_error("unknown test function '" + s +
                     "'; supported: blocks bumps doppler lcomb1 lcomb2 lcomb3");
}

const std::vector<TestFunction>& all_test_functions() {
    static const std::vector<TestFunction> fns = {
        TestFunction::blocks, TestFunction::bumps,  TestFunction::doppler,
        TestFunction::lcomb1, TestFunction::lcomb2, TestFunction::lcomb3};
    return fns;
}

double eval_test_function(TestFunction f, double t) {
    if (!(t > 0.0) || t > 1.0) {
        throw std::invalid_argument("test functions are defined on (0, 1], got t = " +
                                    std::to_string(t));
    }
    switch (f) {
        case TestFunction::blocks: return blocks_at(t);
        case TestFunction::bumps: return bumps_at(t);
        case TestFunction::doppler: return doppler_at(t);
        case TestFunction::lcomb1:
            return 0.4 * blocks_at(t) + 0.4 * bumps_at(t) + 0.2 * doppler_at(t);
        case TestFunction::lcomb2:
            return 0.4 * blocks_at(t) + 0.2 * bumps_at(t) + 0.4 * doppler_at(t);
        case TestFunction::lcomb3:
            return 0.2 * blocks_at(t) + 0.4 * bumps_at(t) + 0.4 * doppler_at(t);
    }
    throw std::invalid_argument("bad test function");
}

std::vector<double> sample_function(TestFunction f, std::size_t n) {
    if (!is_power_of_two(n)) {
        throw data_error("sample_function requires a power-of-two n, got " + std::to_string(n));
    }
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        out[i - 1] = eval_test_function(f, static_cast<double>(i) / static_cast<double>(n));
    }
    return out;
}

std::vector<double> add_noise(const std::vector<double>& f, double snr, std::uint64_t seed) {
    if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
    const double sd = population_sd(f);
    if (sd == 0.0) throw std::invalid_argument("constant signal: SNR is undefined");
    const double sigma = sd / snr;
    Rng rng(seed);
    std::vector<double> y(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i] + sigma * rng.normal();
    return y;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("mse: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

std::vector<double> hard_threshold_denoise(const std::vector<double>& signal,
                                           const WaveletFilter& filter) {
    CoefficientPyramid p = dwt(signal, filter, default_levels(signal.size(), filter));
    const double sigma = estimate_sigma_mad(p);
    if (sigma == 0.0) return signal;
    const double thr = sigma * std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
    for (auto& level : p.details) {
        for (double& d : level) {
            if (std::fabs(d) < thr) d = 0.0;
        }
    }
    return idwt(p, filter);
}

namespace {

struct MethodRunner {
    std::string name;
    bool hard = false;
    SpecConfig config;
};

struct RepOutcome {
    double mse = 0.0;
    double seconds = 0.0;
    bool failed = false;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
    if (plan.functions.empty()) throw std::invalid_argument("plan has no test functions");
    if (plan.methods.empty()) throw std::invalid_argument("plan has no methods");
    if (plan.replications < 1) throw std::invalid_argument("plan needs replications >= 1");
    for (std::size_t n : plan.n_values) {
        if (!is_power_of_two(n)) {
            throw std::invalid_argument("plan n values must be powers of two");
        }
    }
    const WaveletFilter filter = filter_taps(plan.wavelet);

    std::vector<MethodRunner> methods;
    for (const std::string& name : plan.methods) {
        MethodRunner m;
        m.name = name;
        if (name == "hard") {
            m.hard = true;
        } else {
            m.config = SpecConfig::from_method_name(name);
        }
        methods.push_back(std::move(m));
    }

    // clean signals, shared across cells
    std::map<std::pair<int, std::size_t>, std::vector<double>> truths;
    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        for (std::size_t n : plan.n_values) {
            truths[{static_cast<int>(fi), n}] = sample_function(plan.functions[fi], n);
        }
    }

    struct Job {
        std::size_t fi, ni, si;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
            for (std::size_t si = 0; si < plan.snr_values.size(); ++si) {
                for (int rep = 0; rep < plan.replications; ++rep) {
                    jobs.push_back({fi, ni, si, rep});
                }
            }
        }
    }

    std::vector<std::vector<RepOutcome>> outcomes(jobs.size(),
                                                  std::vector<RepOutcome>(methods.size()));

    auto run_job = [&](std::size_t ji) {
        const Job& job = jobs[ji];
        const std::size_t n = plan.n_values[job.ni];
        const double snr = plan.snr_values[job.si];
        const std::vector<double>& truth = truths.at({static_cast<int>(job.fi), n});
        const std::uint64_t noise_seed =
            mix_seed({plan.seed, static_cast<std::uint64_t>(job.fi),
                      static_cast<std::uint64_t>(n), seed_of(snr),
                      static_cast<std::uint64_t>(job.rep)});
        const std::vector<double> noisy = add_noise(truth, snr, noise_seed);

        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            RepOutcome& out = outcomes[ji][mi];
            try {
                const auto started = std::chrono::steady_clock::now();
                std::vector<double> estimate;
                if (methods[mi].hard) {
                    estimate = hard_threshold_denoise(noisy, filter);
                } else {
                    DenoiseOptions opts;
                    opts.fit = plan.fit_options;
                    opts.fit.seed = mix_seed({noise_seed, 1000 + static_cast<std::uint64_t>(mi)});
                    estimate = denoise(noisy, methods[mi].config, filter, opts).estimate;
                }
                out.seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - started)
                                  .count();
                out.mse = mse(estimate, truth);
            } catch (const std::exception&) {
                out.failed = true;
            }
        }
    };

    unsigned nthreads = plan.threads > 0 ? static_cast<unsigned>(plan.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(jobs.size()));
    if (nthreads <= 1) {
        for (std::size_t ji = 0; ji < jobs.size(); ++ji) run_job(ji);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t ji = next.fetch_add(1);
                    if (ji >= jobs.size()) return;
                    run_job(ji);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // aggregate in deterministic (replication) order
    ExperimentResult result;
    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
            for (std::size_t si = 0; si < plan.snr_values.size(); ++si) {
                const std::size_t base =
                    (fi * plan.n_values.size() + ni) * plan.snr_values.size() + si;
                const std::size_t job0 = base * static_cast<std::size_t>(plan.replications);
                for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                    CellStats cell;
                    cell.function = to_string(plan.functions[fi]);
                    cell.n = plan.n_values[ni];
                    cell.snr = plan.snr_values[si];
                    cell.method = methods[mi].name;
                    cell.replications = plan.replications;
                    double sum = 0.0, time_sum = 0.0;
                    std::vector<double> values;
                    for (int rep = 0; rep < plan.replications; ++rep) {
                        const RepOutcome& out = outcomes[job0 + static_cast<std::size_t>(rep)][mi];
                        if (out.failed) {
                            ++cell.failures;
                            continue;
                        }
                        values.push_back(out.mse);
                        sum += out.mse;
                        time_sum += out.seconds;
                    }
                    if (!values.empty()) {
                        cell.mean_mse = sum / static_cast<double>(values.size());
                        cell.seconds = time_sum / static_cast<double>(values.size());
                        if (values.size() > 1) {
                            double ss = 0.0;
                            for (double v : values) {
                                ss += (v - cell.mean_mse) * (v - cell.mean_mse);
                            }
                            cell.sd_mse = std::sqrt(ss / static_cast<double>(values.size() - 1));
                        }
                    } else {
                        cell.mean_mse = std::numeric_limits<double>::quiet_NaN();
                    }
                    result.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return result;
}

std::string to_csv(const ExperimentResult& result, bool include_timing) {
    std::string out = "function,n,snr,method,mean_mse,sd_mse,seconds\n";
    for (const CellStats& c : result.cells) {
        out += c.function;
        out += ',';
        out += std::to_string(c.n);
        out += ',';
        out += format_g17(c.snr);
        out += ',';
        out += c.method;
        out += ',';
        out += format_g17(c.mean_mse);
        out += ',';
        out += format_g17(c.sd_mse);
        out += ',';
        out += include_timing ? format_g17(c.seconds) : "0";
        out += '\n';
    }
    return out;
}

std::vector<CellStats> parse_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw data_error("results CSV is empty");
    // tolerate trailing CR from other tooling
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "function,n,snr,method,mean_mse,sd_mse,seconds") {
        throw data_error("unexpected results CSV header: " + line);
    }
    std::vector<CellStats> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 7) {
            throw data_error("results CSV line " + std::to_string(lineno) +
                             ": expected 7 fields, got " + std::to_string(fields.size()));
        }
        try {
            CellStats c;
            c.function = fields[0];
            c.n = static_cast<std::size_t>(std::stoull(fields[1]));
            c.snr = std::stod(fields[2]);
            c.method = fields[3];
            c.mean_mse = std::stod(fields[4]);
            c.sd_mse = std::stod(fields[5]);
            c.seconds = std::stod(fields[6]);
            c.replications = 1;
            cells.push_back(std::move(c));
        } catch (const std::exception&) {
            throw data_error("results CSV line " + std::to_string(lineno) +
                             ": malformed numeric field");
        }
    }
    return cells;
}

CountMatrix count_matrix(const std::vector<CellStats>& cells) {
    CountMatrix m;
    auto index_of = [](std::vector<std::string>& v, const std::string& s) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == s) return i;
        }
        v.push_back(s);
        return v.size() - 1;
    };
    struct Key {
        std::string function;
        std::size_t n;
        double snr;
        bool operator<(const Key& o) const {
            return std::tie(function, n, snr) < std::tie(o.function, o.n, o.snr);
        }
    };
    std::map<Key, std::vector<std::pair<std::size_t, double>>> by_cell;
    for (const CellStats& c : cells) {
        const std::size_t mi = index_of(m.methods, c.method);
        index_of(m.functions, c.function);
        if (!c.valid() || std::isnan(c.mean_mse)) continue;
        by_cell[{c.function, c.n, c.snr}].emplace_back(mi, c.mean_mse);
    }
    m.wins.assign(m.methods.size(), std::vector<int>(m.functions.size(), 0));
    for (const auto& [key, entries] : by_cell) {
        std::size_t winner = entries.front().first;
        double best = entries.front().second;
        for (const auto& [mi, v] : entries) {
            if (v < best || (v == best && mi < winner)) {
                winner = mi;
                best = v;
            }
        }
        const auto fi = static_cast<std::size_t>(
            std::find(m.functions.begin(), m.functions.end(), key.function) -
            m.functions.begin());
        ++m.wins[winner][fi];
    }
    return m;
}

std::string render_count_matrix(const CountMatrix& m) {
    std::size_t width = 6;
    for (const auto& s : m.methods) width = std::max(width, s.size());
    std::ostringstream out;
    out << "Cells with lowest mean MSE per function (ties go to the earlier method row)\n\n";
    out << std::string(width, ' ');
    for (const auto& f : m.functions) {
        out << "  " << f;
    }
    out << "  total\n";
    for (std::size_t mi = 0; mi < m.methods.size(); ++mi) {
        out << m.methods[mi] << std::string(width - m.methods[mi].size(), ' ');
        int total = 0;
        for (std::size_t fi = 0; fi < m.functions.size(); ++fi) {
            const int w = m.wins[mi][fi];
            total += w;
            const std::size_t pad = m.functions[fi].size() + 2;
            std::string cell = std::to_string(w);
            out << std::string(pad - std::min(pad, cell.size()), ' ') << cell;
        }
        std::string cell = std::to_string(total);
        out << std::string(7 - std::min<std::size_t>(7, cell.size()), ' ') << cell << '\n';
    }
    return out.str();
}

}  // namespace nlwd
