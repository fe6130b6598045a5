#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threshlab/estimators.hpp"
#include "threshlab/model.hpp"
#include "threshlab/perturbation.hpp"

namespace threshlab {

/// Flat `key = value` text; '#' starts a comment. Throws Config on malformed lines.
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

struct ExperimentConfig {
    std::string model = "canonical";
    std::map<std::string, std::string> model_keys;  // model.* entries, take precedence over `model`
    std::vector<std::string> estimators{"erm", "twostep"};  // "twostep" expands over scales
    std::vector<std::uint64_t> ns{250, 1000, 4000};
    std::vector<double> scales{1.0};  // L values for a bare "twostep"
    std::size_t trials = 200;
    std::uint64_t master_seed = 1;
    unsigned workers = 0;

    /// Keys: model / model.*, estimators, n, L, trials, seed, workers.
    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
    /// Throws Config for unknown names or n < 4.
    void check() const;
    DensityPair resolve_model() const;
};

struct RateRow {
    std::string model;
    std::string estimator;       // erm, twostep or clock
    std::optional<double> scale; // L for twostep
    std::uint64_t n = 0;
    std::size_t trials = 0;
    double q50 = 0.0, q90 = 0.0, q95 = 0.0;  // of n^(1/3) |a_hat - a(P)|
    double mean_excess_scaled = 0.0;         // mean of n^(2/3) (L_P(a_hat) - L_P(a(P)))
    std::uint64_t seed = 0;                  // master seed
    std::vector<double> scaled_errors;       // per trial, not written to CSV

    /// Fraction of trials with n^(1/3) |a_hat - a| > t.
    double tail_fraction(double t) const;
};

struct RateReport {
    std::vector<RateRow> rows;
};

/// Expanded (estimator, L) pairs in config order.
std::vector<EstimatorSpec> expand_estimators(const ExperimentConfig& cfg);

/// Seed of one trial stream: pure function of (master, n, estimator id) and trial index.
SeedPolicy trial_seed(std::uint64_t master, std::uint64_t n, const std::string& estimator_id, std::size_t trial);

RateReport rate_sweep(const ExperimentConfig& cfg);

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double prob);

struct CertificateRow {
    std::string model;
    double delta = 0.0;
    std::uint64_t n = 0;
    double eps = 0.0, c1 = 0.0, beta = 0.0, n_entropy = 0.0, budget = 0.0, separation = 0.0;
    bool entropy_ok = false, separation_ok = false;
};

struct CertificateSweep {
    std::vector<CertificateRow> rows;
    /// smallest n with both flags and every larger swept n also passing
    std::optional<std::uint64_t> n0;
};

/// Throws DeltaOutOfRange before any computation unless 0 < delta < 1/11.
CertificateSweep certificate_sweep(const DensityPair& p, const BumpProfile& phi, double delta,
                                   const std::vector<std::uint64_t>& ns, unsigned workers = 0);

struct RiskCurveRow {
    double alpha = 0.0, loss = 0.0, excess = 0.0, lower_bound = 0.0, upper_bound = 0.0;
};
std::vector<RiskCurveRow> risk_curve(const DensityPair& p, std::size_t points);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

inline constexpr const char* kRatesHeader = "model,estimator,L,n,trials,q50,q90,q95,mean_excess_scaled,seed";
inline constexpr const char* kCertificateHeader = "model,delta,n,eps,c1,beta,nH,budget,sep,entropy_ok,sep_ok";
inline constexpr const char* kRiskCurveHeader = "alpha,loss,excess,lower_bound,upper_bound";
inline constexpr int kSchemaVersion = 1;

std::string rates_csv(const RateReport& r);
std::string rates_json(const RateReport& r);
std::string rates_svg(const RateReport& r);
/// Parses text produced by rates_csv (scaled_errors stay empty).
RateReport parse_rates_csv(const std::string& text);

std::string certificate_csv(const CertificateSweep& s);
std::string certificate_json(const CertificateSweep& s);
std::string risk_curve_csv(const std::vector<RiskCurveRow>& rows);
std::string sample_csv(const LabeledSample& s, std::uint64_t master_seed, std::uint64_t trial);

/// Writes text to dir/name, creating dir. Throws Io with the path on failure.
std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// rates.csv, rates.json and rates.svg under dir.
std::vector<std::filesystem::path> emit_outputs(const RateReport& r, const std::filesystem::path& dir);

}  // namespace threshlab
