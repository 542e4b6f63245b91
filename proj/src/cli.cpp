#include "nlwd/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlwd/bench.hpp"
#include "nlwd/blocks.hpp"
#include "nlwd/errors.hpp"
#include "nlwd/posterior.hpp"
#include "nlwd/rng.hpp"
#include "nlwd/signal_io.hpp"

namespace nlwd {

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool has_wav_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return false;
    std::string ext = path.substr(dot);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".wav";
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

struct DenoiseArgs {
    std::string input, output;
    std::string wavelet;  // empty: pick by file type
    std::string slab = "mixture";
    std::string gamma_spec = "logit";
    std::string tau_spec = "polynom";
    std::size_t block = 0;
    std::size_t overlap = 0;
    std::uint64_t seed = 0;
    std::string fit_json;
    int starts = 5;
    int max_evals = 2000;
};

int run_denoise(const DenoiseArgs& args) {
    const bool wav = has_wav_extension(args.input);
    const std::string wavelet_name =
        !args.wavelet.empty() ? args.wavelet : (wav ? "coif5" : "sym6");
    const WaveletFilter filter = filter_taps(wavelet_name);

    SpecConfig config;
    config.slab = slab_from_string(args.slab);
    config.gamma_family = gamma_from_string(args.gamma_spec);
    config.tau_family = tau_from_string(args.tau_spec);

    FitOptions fit_options;
    fit_options.starts = args.starts;
    fit_options.max_evals = args.max_evals;

    nlohmann::json fits = nlohmann::json::array();
    auto record_fit = [&](int channel, std::size_t block_index, const FitResult& fr) {
        fits.push_back({{"channel", channel},
                        {"block", block_index},
                        {"sigma_hat", fr.sigma_hat},
                        {"log_marginal", fr.log_marginal},
                        {"converged", fr.converged},
                        {"n_evals", fr.n_evals},
                        {"starts", fr.starts},
                        {"theta_gamma", fr.theta_gamma},
                        {"theta_tau", fr.theta_tau}});
    };

    auto block_processor = [&](int channel) {
        return [&, channel](const std::vector<double>& chunk, std::size_t block_index) {
            DenoiseOptions opts;
            opts.fit = fit_options;
            opts.fit.seed = mix_seed({args.seed, static_cast<std::uint64_t>(channel),
                                      static_cast<std::uint64_t>(block_index)});
            DenoiseResult r = denoise(chunk, config, filter, opts);
            record_fit(channel, block_index, r.fit);
            return std::move(r.estimate);
        };
    };

    if (wav) {
        AudioBuffer audio = read_wav(args.input);
        BlockPlan plan;
        plan.block_size = args.block != 0 ? args.block : 4096;
        plan.overlap = args.overlap;
        plan.window = args.overlap > 0 ? BlockPlan::Window::hann : BlockPlan::Window::none;
        for (std::size_t ch = 0; ch < audio.channels.size(); ++ch) {
            audio.channels[ch] = process_blocks(audio.channels[ch], plan,
                                                block_processor(static_cast<int>(ch)));
        }
        write_wav(args.output, audio);
    } else {
        const std::vector<double> signal = read_signal_csv(args.input);
        std::vector<double> estimate;
        if (args.block != 0) {
            BlockPlan plan;
            plan.block_size = args.block;
            plan.overlap = args.overlap;
            plan.window = args.overlap > 0 ? BlockPlan::Window::hann : BlockPlan::Window::none;
            estimate = process_blocks(signal, plan, block_processor(0));
        } else {
            if (!is_power_of_two(signal.size())) {
                throw data_error("signal length " + std::to_string(signal.size()) +
                                 " is not a power of two; pass --block N to process "
                                 "in fixed-size blocks");
            }
            DenoiseOptions opts;
            opts.fit = fit_options;
            opts.fit.seed = args.seed;
            DenoiseResult r = denoise(signal, config, filter, opts);
            record_fit(0, 0, r.fit);
            estimate = std::move(r.estimate);
        }
        write_signal_csv(args.output, estimate);
    }

    if (!args.fit_json.empty()) {
        nlohmann::json doc = {{"method", config.method_name()},
                              {"wavelet", wavelet_name},
                              {"block_size", args.block},
                              {"overlap", args.overlap},
                              {"seed", args.seed},
                              {"fits", fits}};
        std::ofstream out(args.fit_json);
        if (!out) throw data_error("cannot write " + args.fit_json);
        out << doc.dump(2) << '\n';
    }
    return 0;
}

struct SimulateArgs {
    std::vector<std::string> functions = {"all"};
    std::vector<std::size_t> n_values = {512, 1024, 2048, 4096};
    std::vector<double> snr_values = {3, 5, 7};
    int reps = 100;
    std::vector<std::string> methods = {"all"};
    std::uint64_t seed = 0;
    std::string out;
    std::string wavelet = "sym6";
    bool timing = false;
    int threads = 0;
    int starts = 5;
    int max_evals = 2000;
};

int run_simulate(const SimulateArgs& args) {
    ExperimentPlan plan;
    if (args.functions.size() == 1 && args.functions[0] == "all") {
        plan.functions = all_test_functions();
    } else {
        for (const auto& name : args.functions) {
            plan.functions.push_back(test_function_from_string(name));
        }
    }
    plan.n_values = args.n_values;
    plan.snr_values = args.snr_values;
    plan.replications = args.reps;
    if (args.methods.size() == 1 && args.methods[0] == "all") {
        plan.methods = all_method_names();
    } else {
        for (const auto& name : args.methods) {
            if (name != "hard") SpecConfig::from_method_name(name);  // validate
            plan.methods.push_back(name);
        }
    }
    plan.seed = args.seed;
    plan.wavelet = args.wavelet;
    plan.fit_options.starts = args.starts;
    plan.fit_options.max_evals = args.max_evals;
    plan.threads = args.threads;

    const ExperimentResult result = run_experiment(plan);
    std::ofstream out(args.out);
    if (!out) throw data_error("cannot write " + args.out);
    out << to_csv(result, args.timing);
    if (!out) throw data_error("write failed for " + args.out);
    return 0;
}

int run_compare(const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) throw data_error("cannot open " + in_path);
    const auto cells = parse_results_csv(in);
    if (cells.empty()) throw data_error(in_path + ": no result rows");
    std::ofstream out(out_path);
    if (!out) throw data_error("cannot write " + out_path);
    out << render_count_matrix(count_matrix(cells));
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"wavelet denoising with nonlocal spike-and-slab priors"};
    app.require_subcommand(1);

    DenoiseArgs d;
    CLI::App* den = app.add_subcommand("denoise", "denoise a CSV or WAV signal");
    den->add_option("--input", d.input, "input file (.wav or CSV)")->required();
    den->add_option("--output", d.output, "output file")->required();
    den->add_option("--wavelet", d.wavelet, "wavelet filter (default: sym6 for CSV, coif5 for WAV)")
        ->check(CLI::IsMember(supported_filters()));
    den->add_option("--slab", d.slab, "slab family")
        ->check(CLI::IsMember({"mom", "imom", "mixture"}));
    den->add_option("--gamma-spec", d.gamma_spec, "mixture-probability specification")
        ->check(CLI::IsMember({"logit", "genlogit", "hypsec", "gennormal"}));
    den->add_option("--tau-spec", d.tau_spec, "scale specification")
        ->check(CLI::IsMember({"polynom", "doubleexp"}));
    den->add_option("--block", d.block, "process in blocks of N samples (power of two)");
    den->add_option("--overlap", d.overlap, "overlap between blocks (Hann recombination)");
    den->add_option("--seed", d.seed, "random seed for the optimizer restarts");
    den->add_option("--fit-json", d.fit_json, "write per-block fit diagnostics to this file");
    den->add_option("--starts", d.starts, "optimizer restarts per block");
    den->add_option("--max-evals", d.max_evals, "objective evaluations per restart");

    SimulateArgs s;
    CLI::App* sim = app.add_subcommand("simulate", "run the simulation benchmark");
    sim->add_option("--functions", s.functions, "test functions or 'all'")->delimiter(',');
    sim->add_option("--n", s.n_values, "sample sizes (powers of two)")->delimiter(',');
    sim->add_option("--snr", s.snr_values, "signal-to-noise ratios")->delimiter(',');
    sim->add_option("--reps", s.reps, "replications per cell");
    sim->add_option("--methods", s.methods, "method names, 'hard', or 'all'")->delimiter(',');
    sim->add_option("--seed", s.seed, "master seed");
    sim->add_option("--out", s.out, "output CSV path")->required();
    sim->add_option("--wavelet", s.wavelet, "wavelet filter")
        ->check(CLI::IsMember(supported_filters()));
    sim->add_flag("--timing", s.timing, "emit wall-clock timings (breaks byte determinism)");
    sim->add_option("--threads", s.threads, "worker threads (0 = all cores)");
    sim->add_option("--starts", s.starts, "optimizer restarts per fit");
    sim->add_option("--max-evals", s.max_evals, "objective evaluations per restart");

    std::string cmp_in, cmp_out;
    CLI::App* cmp = app.add_subcommand("compare", "render the method win-count table");
    cmp->add_option("--in", cmp_in, "results CSV from simulate")->required();
    cmp->add_option("--out", cmp_out, "output text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (den->parsed()) return run_denoise(d);
        if (sim->parsed()) return run_simulate(s);
        return run_compare(cmp_in, cmp_out);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace nlwd
