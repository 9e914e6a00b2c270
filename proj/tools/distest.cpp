// Command-line front end: estimate, sweep, verify, sdpi, reduce.
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 for a
// configuration or I/O error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "distest/error.hpp"
#include "distest/estimation.hpp"
#include "distest/harness.hpp"
#include "distest/infotheory.hpp"

namespace {

using namespace distest;
using nlohmann::json;

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct ModelFlags {
    int m = 1000;
    int n = 4;
    int d = 1;
    double sigma = 1.0;
    std::vector<double> theta{0.0};
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--m", f.m, "machines")->check(CLI::PositiveNumber);
    cmd->add_option("--n", f.n, "samples per machine")->check(CLI::PositiveNumber);
    cmd->add_option("--d", f.d, "dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--sigma", f.sigma, "noise standard deviation")->check(CLI::PositiveNumber);
    cmd->add_option("--theta", f.theta, "mean; one value is repeated over all coordinates")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

estimation::GaussianModel make_model(const ModelFlags& f) {
    estimation::GaussianModel model;
    model.m = f.m;
    model.n = f.n;
    model.d = f.d;
    model.sigma = f.sigma;
    if (f.theta.size() == 1) {
        model.theta.assign(static_cast<std::size_t>(f.d), f.theta.front());
    } else {
        model.theta = f.theta;
    }
    model.validate();
    return model;
}

json model_json(const ModelFlags& f) {
    return {{"m", f.m}, {"n", f.n}, {"d", f.d}, {"sigma", f.sigma}, {"theta", f.theta}};
}

// Flattens a JSON config object into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    std::vector<std::string> out;
    auto scalar = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
        if (v.is_number()) return harness::format_real(v.get<double>());
        throw ConfigError("config values must be scalars or arrays of scalars");
    };
    for (const auto& [key, value] : cfg.items()) {
        out.push_back("--" + key);
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
            out.push_back(joined);
        } else {
            out.push_back(scalar(value));
        }
    }
    return out;
}

// Rewrites argv so that values from --config come right after the subcommand
// tokens; explicit flags appear later and win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::size_t at = args.empty() ? 0 : 1;
    if (!args.empty() && args[0] == "reduce" && args.size() > 1) at = 2;
    const auto extra = config_tokens(path);
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    return args;
}

std::string render(const json& j, const std::string& format, const std::string& csv) {
    return format == "json" ? j.dump(2) + "\n" : csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Communication-bounded distributed estimation: protocols and verification suites"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file whose keys are flag names; flags override it");

    std::uint64_t seed = 1;
    std::string out_path = "-";
    std::string format = "csv";
    int trials = 100;
    int threads = 1;
    auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_path, "output file, - for stdout");
        cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo MSE of one protocol");
    ModelFlags est_model;
    std::string protocol_name = "sign";
    double alpha = 1.0;
    double bound = 16.0;
    add_model_flags(estimate, est_model);
    add_io(estimate);
    estimate->add_option("--protocol", protocol_name, "sign or sawtooth")->check(CLI::IsMember({"sign", "sawtooth"}));
    estimate->add_option("--alpha", alpha, "fraction of machines used by the sign protocol");
    estimate->add_option("--bound", bound, "magnitude bound U of the sawtooth protocol, normalized units");
    estimate->add_option("--trials", trials, "Monte Carlo trials (>= 30)");
    estimate->add_option("--threads", threads, "worker threads; output does not depend on it");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "communication/MSE tradeoff of the sign protocol");
    ModelFlags sweep_model;
    std::vector<double> alphas{0.125, 0.25, 0.5, 1.0};
    add_model_flags(sweep, sweep_model);
    add_io(sweep);
    sweep->add_option("--alphas", alphas, "comma separated fractions in (0, 1]")->delimiter(',');
    sweep->add_option("--trials", trials, "Monte Carlo trials per alpha (>= 30)");
    sweep->add_option("--threads", threads, "worker threads; output does not depend on it");

    // verify
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite;
    int budget = 0;
    verify->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(harness::suite_names()));
    verify->add_option("--budget", budget, "instance count, 0 for the suite default");
    add_io(verify);

    // sdpi
    auto* sdpi = app.add_subcommand("sdpi", "SDPI lower bound for a discretized truncated Gaussian pair");
    double delta = 0.1, sigma = 1.0, tau = 20.0;
    int grid = 2000, grid_points = 2, refine = 20;
    double bsc_eps = -1.0;
    sdpi->add_option("--delta", delta, "mean separation");
    sdpi->add_option("--sigma", sigma, "standard deviation")->check(CLI::PositiveNumber);
    sdpi->add_option("--tau", tau, "truncation radius")->check(CLI::PositiveNumber);
    sdpi->add_option("--grid", grid, "grid size (>= 16)");
    sdpi->add_option("--grid-points", grid_points, "search resolution");
    sdpi->add_option("--refine", refine, "refinement sweeps");
    sdpi->add_option("--bsc-eps", bsc_eps, "use Bernoulli(1/2 -+ eps) instead of Gaussians");
    add_io(sdpi);

    // reduce
    auto* reduce = app.add_subcommand("reduce", "reductions");
    reduce->require_subcommand(1);
    auto* sparse = reduce->add_subcommand("sparse", "sparse detection through an averaging protocol");
    estimation::SparseDetectionConfig sparse_cfg{0.0, 2, 16, 4, 256, 1.0};
    int sparse_trials = 500;
    sparse->add_option("--d", sparse_cfg.d, "dimension");
    sparse->add_option("--k", sparse_cfg.k, "sparsity");
    sparse->add_option("--n", sparse_cfg.n, "samples per machine");
    sparse->add_option("--m", sparse_cfg.m, "machines");
    sparse->add_option("--sigma", sparse_cfg.sigma, "noise standard deviation");
    sparse->add_option("--delta", sparse_cfg.delta, "mean separation; 0 sizes it from the base risk");
    sparse->add_option("--trials", sparse_trials, "trials per hidden bit");
    add_io(sparse);
    auto* slr = reduce->add_subcommand("slr", "sparse linear regression data reduction");
    int slr_n = 8, slr_d = 16, slr_trials = 10000;
    double slr_sigma = 1.0;
    slr->add_option("--n", slr_n, "rows of the design");
    slr->add_option("--d", slr_d, "columns of the design");
    slr->add_option("--sigma", slr_sigma, "noise standard deviation");
    slr->add_option("--trials", slr_trials, "trials");
    add_io(slr);

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }

    try {
        if (*estimate) {
            const auto model = make_model(est_model);
            harness::GmeRunner runner;
            if (protocol_name == "sign") {
                runner = [alpha](const estimation::GaussianModel& m, numerics::RngStream& rng) {
                    return estimation::run_gme_dense(m, alpha, rng);
                };
            } else {
                runner = [bound](const estimation::GaussianModel& m, numerics::RngStream& rng) {
                    return estimation::run_gme_sawtooth(m, bound, rng);
                };
            }
            const auto r = harness::mse_monte_carlo(runner, model, trials, seed, threads);
            const double normalized = r.mse * model.m * model.n / (model.sigma * model.sigma);
            json cfg = model_json(est_model);
            cfg.update({{"protocol", protocol_name}, {"alpha", alpha}, {"bound", bound}, {"trials", trials}, {"seed", seed}});
            json j{{"config", cfg}, {"seed", seed}, {"result", harness::to_json(r)}};
            j["result"]["normalized_mse"] = normalized;
            const std::string csv = "protocol,m,n,d,sigma,trials,seed,mse,mse_stderr,normalized_mse,bits\n" +
                                    protocol_name + ',' + std::to_string(model.m) + ',' + std::to_string(model.n) +
                                    ',' + std::to_string(model.d) + ',' + harness::format_real(model.sigma) + ',' +
                                    std::to_string(trials) + ',' + std::to_string(seed) + ',' +
                                    harness::format_real(r.mse) + ',' + harness::format_real(r.std_error) + ',' +
                                    harness::format_real(normalized) + ',' + std::to_string(r.bits) + '\n';
            harness::write_output(out_path, render(j, format, csv));
            return kPass;
        }
        if (*sweep) {
            const auto model = make_model(sweep_model);
            const auto curve = harness::tradeoff_sweep(model, alphas, trials, seed, threads);
            json cfg = model_json(sweep_model);
            cfg.update({{"alphas", alphas}, {"trials", trials}, {"seed", seed}});
            json j{{"config", cfg}, {"seed", seed}, {"curve", harness::to_json(curve)}};
            harness::write_output(out_path, render(j, format, harness::to_csv(curve)));
            return kPass;
        }
        if (*verify) {
            const auto rep = harness::verify_suite(suite, seed, budget);
            json j{{"config", {{"suite", suite}, {"seed", seed}, {"budget", budget}}},
                   {"seed", seed},
                   {"report", harness::to_json(rep)}};
            harness::write_output(out_path, render(j, format, harness::to_csv(rep)));
            return rep.passed() ? kPass : kCheckFailed;
        }
        if (*sdpi) {
            const auto cp = bsc_eps >= 0.0
                                ? info::make_channel_pair(info::DiscreteDistribution::bernoulli(0.5 - bsc_eps),
                                                          info::DiscreteDistribution::bernoulli(0.5 + bsc_eps))
                                : info::discretize_truncated_gaussian(delta, sigma, tau, grid);
            const auto est = info::sdpi_constant(cp, grid_points, refine);
            json cfg{{"delta", delta}, {"sigma", sigma},         {"tau", tau},         {"grid", grid},
                     {"grid-points", grid_points}, {"refine", refine}, {"bsc-eps", bsc_eps}, {"seed", seed}};
            json j{{"config", cfg},
                   {"seed", seed},
                   {"result",
                    {{"beta_lower", est.beta_lower},
                     {"resolution", est.resolution},
                     {"degenerate", est.degenerate},
                     {"domination_ratio", harness::format_real(cp.domination_ratio)}}}};
            const std::string csv = "beta_lower,resolution,degenerate,domination_ratio\n" +
                                    harness::format_real(est.beta_lower) + ',' + harness::format_real(est.resolution) +
                                    ',' + (est.degenerate ? "1" : "0") + ',' + harness::format_real(cp.domination_ratio) +
                                    '\n';
            harness::write_output(out_path, render(j, format, csv));
            return kPass;
        }
        if (*sparse) {
            const auto r = harness::sparse_reduction_experiment(sparse_cfg, sparse_trials, seed);
            const bool ok = r.success_v0 >= 0.75 && r.success_v1 >= 0.75;
            json cfg{{"d", sparse_cfg.d},         {"k", sparse_cfg.k},         {"n", sparse_cfg.n},
                     {"m", sparse_cfg.m},         {"sigma", sparse_cfg.sigma}, {"delta", sparse_cfg.delta},
                     {"trials", sparse_trials}, {"seed", seed}};
            json j{{"config", cfg},
                   {"seed", seed},
                   {"result",
                    {{"delta", r.config.delta},
                     {"base_risk", r.base_risk},
                     {"success_v0", r.success_v0},
                     {"success_v1", r.success_v1},
                     {"bits", r.bits},
                     {"pass", ok}}}};
            const std::string csv = "delta,base_risk,success_v0,success_v1,bits,pass\n" +
                                    harness::format_real(r.config.delta) + ',' + harness::format_real(r.base_risk) +
                                    ',' + harness::format_real(r.success_v0) + ',' +
                                    harness::format_real(r.success_v1) + ',' + std::to_string(r.bits) + ',' +
                                    (ok ? "1" : "0") + '\n';
            harness::write_output(out_path, render(j, format, csv));
            return ok ? kPass : kCheckFailed;
        }
        if (*slr) {
            const auto r = harness::slr_experiment(slr_n, slr_d, slr_sigma, slr_trials, seed);
            const bool ok = r.max_relative_deviation <= 0.05 && r.rejects_violation;
            json cfg{{"n", slr_n}, {"d", slr_d}, {"sigma", slr_sigma}, {"trials", slr_trials}, {"seed", seed}};
            json j{{"config", cfg},
                   {"seed", seed},
                   {"result",
                    {{"lambda", r.lambda},
                     {"sigma0", r.sigma0},
                     {"max_relative_deviation", r.max_relative_deviation},
                     {"rejects_violation", r.rejects_violation},
                     {"pass", ok}}}};
            const std::string csv = "lambda,sigma0,max_relative_deviation,rejects_violation,pass\n" +
                                    harness::format_real(r.lambda) + ',' + harness::format_real(r.sigma0) + ',' +
                                    harness::format_real(r.max_relative_deviation) + ',' +
                                    (r.rejects_violation ? "1" : "0") + ',' + (ok ? "1" : "0") + '\n';
            harness::write_output(out_path, render(j, format, csv));
            return ok ? kPass : kCheckFailed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kPass;
}
