// Command-line front end: validate, sample, rates, certificate, disjunction, risk-curve.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threshlab/error.hpp"
#include "threshlab/harness.hpp"
#include "threshlab/lowerbound.hpp"
#include "threshlab/perturbation.hpp"
#include "threshlab/risk.hpp"
#include "threshlab/sampling.hpp"

using namespace threshlab;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string out = "out";
    std::string config;
    unsigned workers = 0;
};

std::map<std::string, std::string> read_config(const Globals& g) {
    if (g.config.empty()) return {};
    return load_config(g.config);
}

std::string lookup(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

// Model from --model if given, else from model / model.* config keys, else canonical.
DensityPair pick_model(const std::string& flag, const std::map<std::string, std::string>& kv) {
    if (!flag.empty()) return model_by_name(flag);
    std::map<std::string, std::string> model_keys;
    for (const auto& [k, v] : kv)
        if (k.rfind("model.", 0) == 0) model_keys[k] = v;
    if (!model_keys.empty()) return model_from_config(model_keys);
    return model_by_name(lookup(kv, "model", "canonical"));
}

std::uint64_t seed_of(const Globals& g, const std::map<std::string, std::string>& kv) {
    if (g.seed) return *g.seed;
    return std::stoull(lookup(kv, "seed", "1"));
}

std::size_t trials_of(const Globals& g, const std::map<std::string, std::string>& kv, std::size_t fallback) {
    if (g.trials) return *g.trials;
    return std::stoull(lookup(kv, "trials", std::to_string(fallback)));
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold-classifier lower bounds and rate experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Master seed (u64)");
    app.add_option("--trials", g.trials, "Monte Carlo trials");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--config", g.config, "Flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--workers", g.workers, "Worker threads (0 = all cores)")->capture_default_str();

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a model's membership conditions");
    std::string validate_model;
    validate_cmd->add_option("model", validate_model, "Model name (canonical, tilted, skewed, power:kp,km)")->required();

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Draw a labeled sample to CSV");
    std::string sample_model;
    std::size_t sample_n = 1000;
    std::uint64_t sample_trial = 0;
    sample_cmd->add_option("--model", sample_model, "Model name");
    sample_cmd->add_option("-n", sample_n, "Sample size")->capture_default_str();
    sample_cmd->add_option("--trial", sample_trial, "Trial index for the seed stream")->capture_default_str();

    // rates
    auto* rates_cmd = app.add_subcommand("rates", "Monte Carlo sweep of scaled estimation errors");
    std::string rates_model;
    std::vector<std::string> rates_estimators;
    std::vector<std::uint64_t> rates_ns;
    std::vector<double> rates_scales;
    rates_cmd->add_option("--model", rates_model, "Model name");
    rates_cmd->add_option("--estimators", rates_estimators, "erm, twostep, twostep:L=<v>, clock")->delimiter(',');
    rates_cmd->add_option("-n", rates_ns, "Sample sizes")->delimiter(',');
    rates_cmd->add_option("-L", rates_scales, "Window scales for twostep")->delimiter(',');

    // certificate
    auto* cert_cmd = app.add_subcommand("certificate", "Two-point certificates over a range of n");
    std::string cert_model;
    double cert_delta = 0.05;
    std::vector<std::uint64_t> cert_ns{1000, 10'000, 100'000, 1'000'000};
    double cert_radius = 1.0;
    cert_cmd->add_option("--model", cert_model, "Model name");
    cert_cmd->add_option("--delta", cert_delta, "Confidence parameter in (0, 1/11)")->capture_default_str();
    cert_cmd->add_option("-n", cert_ns, "Sample sizes")->delimiter(',');
    cert_cmd->add_option("--radius", cert_radius, "Bump support radius")->capture_default_str();

    // disjunction
    auto* dis_cmd = app.add_subcommand("disjunction", "Monte Carlo check of the two-point disjunction");
    std::string dis_model, dis_estimator = "erm";
    double dis_delta = 0.05;
    std::uint64_t dis_n = 10'000;
    dis_cmd->add_option("--model", dis_model, "Model name");
    dis_cmd->add_option("--delta", dis_delta, "Confidence parameter in (0, 1/11)")->capture_default_str();
    dis_cmd->add_option("-n", dis_n, "Sample size")->capture_default_str();
    dis_cmd->add_option("--estimator", dis_estimator, "erm, twostep:L=<v> or clock")->capture_default_str();

    // risk-curve
    auto* risk_cmd = app.add_subcommand("risk-curve", "Excess risk and its quadratic bounds on an alpha grid");
    std::string risk_model;
    std::size_t risk_points = 101;
    risk_cmd->add_option("--model", risk_model, "Model name");
    risk_cmd->add_option("--points", risk_points, "Grid points on [0,1]")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto kv = read_config(g);
        const std::filesystem::path out = g.out;

        if (*validate_cmd) {
            const DensityPair base = model_by_name(validate_model);
            bool ok = true;
            for (const auto& line : validate(base.fplus(), base.fminus())) {
                std::cout << (line.passed ? "PASS " : "FAIL ") << line.name << ": " << line.detail << '\n';
                ok = ok && line.passed;
            }
            std::cout << "a(P) = " << format_double(base.threshold()) << '\n';
            return ok ? 0 : 1;
        }

        if (*sample_cmd) {
            const DensityPair p = pick_model(sample_model, kv);
            const std::uint64_t seed = seed_of(g, kv);
            const LabeledSample s = draw(p, sample_n, {seed, sample_trial});
            print_paths({write_text(out, "sample.csv", sample_csv(s, seed, sample_trial))});
            return 0;
        }

        if (*rates_cmd) {
            std::map<std::string, std::string> rate_keys;
            for (const auto& [k, v] : kv)
                if (k != "delta" && k != "points" && k != "estimator") rate_keys[k] = v;
            ExperimentConfig cfg = ExperimentConfig::from_map(rate_keys);
            if (!rates_model.empty()) {
                cfg.model = rates_model;
                cfg.model_keys.clear();
            }
            if (!rates_estimators.empty()) cfg.estimators = rates_estimators;
            if (!rates_ns.empty()) cfg.ns = rates_ns;
            if (!rates_scales.empty()) cfg.scales = rates_scales;
            if (g.trials) cfg.trials = *g.trials;
            if (g.seed) cfg.master_seed = *g.seed;
            if (g.workers) cfg.workers = g.workers;
            const RateReport report = rate_sweep(cfg);
            std::cout << rates_csv(report);
            print_paths(emit_outputs(report, out));
            return 0;
        }

        if (*cert_cmd) {
            const DensityPair p = pick_model(cert_model, kv);
            const double delta = kv.count("delta") && cert_cmd->count("--delta") == 0 ? std::stod(kv.at("delta")) : cert_delta;
            const CertificateSweep s = certificate_sweep(p, make_bump(cert_radius), delta, cert_ns, g.workers);
            std::cout << certificate_csv(s);
            std::cout << "n0 = " << (s.n0 ? std::to_string(*s.n0) : std::string("none")) << '\n';
            print_paths({write_text(out, "certificate.csv", certificate_csv(s)),
                         write_text(out, "certificate.json", certificate_json(s))});
            return 0;
        }

        if (*dis_cmd) {
            const DensityPair p = pick_model(dis_model, kv);
            const double delta = kv.count("delta") && dis_cmd->count("--delta") == 0 ? std::stod(kv.at("delta")) : dis_delta;
            const EstimatorSpec est = EstimatorSpec::parse(dis_cmd->count("--estimator") ? dis_estimator : lookup(kv, "estimator", dis_estimator));
            const TwoPointCertificate cert = build_certificate(p, default_bump(), delta, dis_n);
            const DisjunctionReport r = disjunction_check(p, cert.q, dis_n, cert.beta, delta, est, trials_of(g, kv, 2000),
                                                          seed_of(g, kv), g.workers);
            std::cout << "model " << p.name() << ", Q = " << cert.q.name() << ", n = " << dis_n << ", delta = " << delta
                      << ", estimator " << est.id() << '\n'
                      << "nH = " << format_double(r.n_entropy) << ", beta |a(P) - a(Q)| = " << format_double(r.separation)
                      << '\n'
                      << "E_P chi = " << format_double(r.mean_p) << " +- " << format_double(r.stderr_p) << '\n'
                      << "E_Q chi = " << format_double(r.mean_q) << " +- " << format_double(r.stderr_q) << '\n'
                      << "verdict: " << (r.verdict ? "holds" : "VIOLATED") << " (min < " << format_double(1.0 - delta)
                      << " + 3 stderr)\n";
            return r.verdict ? 0 : 1;
        }

        if (*risk_cmd) {
            const DensityPair p = pick_model(risk_model, kv);
            print_paths({write_text(out, "risk_curve.csv", risk_curve_csv(risk_curve(p, risk_points)))});
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
