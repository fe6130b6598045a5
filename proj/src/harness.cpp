#include "threshlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "threshlab/error.hpp"
#include "threshlab/parallel.hpp"
#include "threshlab/risk.hpp"
#include "threshlab/sampling.hpp"

namespace threshlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorKind::Config, "bad value '" + text + "' for " + what);
    }
    return v;
}

std::string base_name(const EstimatorSpec& e) {
    switch (e.kind) {
        case EstimatorKind::Erm: return "erm";
        case EstimatorKind::TwoStep: return "twostep";
        case EstimatorKind::Clock: return "clock";
    }
    return "?";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string row_label(const RateRow& r) {
    return r.scale ? r.estimator + " L=" + format_double(*r.scale) : r.estimator;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
            throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "model") {
            cfg.model = value;
        } else if (key.rfind("model.", 0) == 0) {
            cfg.model_keys[key] = value;
        } else if (key == "estimators") {
            cfg.estimators = split(value, ',');
        } else if (key == "n") {
            cfg.ns.clear();
            for (const auto& v : split(value, ',')) cfg.ns.push_back(parse_number<std::uint64_t>(v, "n"));
        } else if (key == "L") {
            cfg.scales.clear();
            for (const auto& v : split(value, ',')) cfg.scales.push_back(parse_number<double>(v, "L"));
        } else if (key == "trials") {
            cfg.trials = parse_number<std::size_t>(value, "trials");
        } else if (key == "seed") {
            cfg.master_seed = parse_number<std::uint64_t>(value, "seed");
        } else if (key == "workers") {
            cfg.workers = parse_number<unsigned>(value, "workers");
        } else {
            throw Error(ErrorKind::Config, "unknown key '" + key + "'");
        }
    }
    return cfg;
}

DensityPair ExperimentConfig::resolve_model() const {
    return model_keys.empty() ? model_by_name(model) : model_from_config(model_keys);
}

void ExperimentConfig::check() const {
    resolve_model();
    expand_estimators(*this);
    for (auto n : ns)
        if (n < 4) throw Error(ErrorKind::Config, "sample sizes must be >= 4, got " + std::to_string(n));
    for (double l : scales)
        if (!(l > 0.0) || !std::isfinite(l)) throw Error(ErrorKind::Config, "window scales must be positive");
}

std::vector<EstimatorSpec> expand_estimators(const ExperimentConfig& cfg) {
    std::vector<EstimatorSpec> out;
    for (const auto& name : cfg.estimators) {
        if (name == "twostep") {
            for (double l : cfg.scales) out.push_back({EstimatorKind::TwoStep, l});
        } else {
            out.push_back(EstimatorSpec::parse(name));
        }
    }
    return out;
}

SeedPolicy trial_seed(std::uint64_t master, std::uint64_t n, const std::string& estimator_id, std::size_t trial) {
    const std::uint64_t row = splitmix64(splitmix64(master) ^ splitmix64(n) ^ fnv1a(estimator_id));
    return {row, trial};
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double RateRow::tail_fraction(double t) const {
    if (scaled_errors.empty()) return 0.0;
    const auto count = std::count_if(scaled_errors.begin(), scaled_errors.end(), [t](double e) { return e > t; });
    return static_cast<double>(count) / static_cast<double>(scaled_errors.size());
}

RateReport rate_sweep(const ExperimentConfig& cfg) {
    cfg.check();
    RateReport report;
    if (cfg.trials == 0) return report;
    const DensityPair p = cfg.resolve_model();
    const double a = p.threshold();
    const std::vector<EstimatorSpec> specs = expand_estimators(cfg);

    struct Cell {
        EstimatorSpec spec;
        std::uint64_t n;
    };
    std::vector<Cell> cells;
    for (const auto& s : specs)
        for (auto n : cfg.ns) cells.push_back({s, n});

    const std::size_t trials = cfg.trials;
    std::vector<double> errors(cells.size() * trials), excess(cells.size() * trials);
    parallel_for(cells.size() * trials, cfg.workers, [&](std::size_t task) {
        const Cell& c = cells[task / trials];
        const std::size_t t = task % trials;
        double a_hat;
        if (c.spec.kind == EstimatorKind::Clock) {
            a_hat = clock_estimator(c.n);
        } else {
            const LabeledSample s = draw(p, c.n, trial_seed(cfg.master_seed, c.n, c.spec.id(), t));
            a_hat = c.spec.apply(s);
        }
        const double nd = static_cast<double>(c.n);
        errors[task] = std::cbrt(nd) * std::abs(a_hat - a);
        excess[task] = std::cbrt(nd * nd) * excess_risk(p, a_hat);
    });

    for (std::size_t i = 0; i < cells.size(); ++i) {
        RateRow row;
        row.model = p.name();
        row.estimator = base_name(cells[i].spec);
        if (cells[i].spec.kind == EstimatorKind::TwoStep) row.scale = cells[i].spec.scale;
        row.n = cells[i].n;
        row.trials = trials;
        row.scaled_errors.assign(errors.begin() + i * trials, errors.begin() + (i + 1) * trials);
        row.q50 = quantile(row.scaled_errors, 0.5);
        row.q90 = quantile(row.scaled_errors, 0.9);
        row.q95 = quantile(row.scaled_errors, 0.95);
        row.mean_excess_scaled = std::accumulate(excess.begin() + i * trials, excess.begin() + (i + 1) * trials, 0.0) /
                                 static_cast<double>(trials);
        row.seed = cfg.master_seed;
        report.rows.push_back(std::move(row));
    }
    return report;
}

CertificateSweep certificate_sweep(const DensityPair& p, const BumpProfile& phi, double delta,
                                   const std::vector<std::uint64_t>& ns, unsigned workers) {
    if (!(delta > 0.0 && delta < 1.0 / 11.0)) {
        throw Error(ErrorKind::DeltaOutOfRange, "delta = " + format_double(delta) + " is outside (0, 1/11)");
    }
    CertificateSweep out;
    if (ns.empty()) return out;
    const double c1 = estimate_c1(p, phi);
    out.rows.resize(ns.size());
    parallel_for(ns.size(), workers, [&](std::size_t i) {
        const TwoPointCertificate cert = build_certificate(p, phi, delta, ns[i], c1);
        out.rows[i] = CertificateRow{p.name(), delta, ns[i], cert.plan.eps, c1, cert.beta, cert.n_entropy(),
                                     cert.entropy_budget, cert.separation, cert.entropy_ok, cert.separation_ok};
    });
    std::vector<std::size_t> order(ns.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto l, auto r) { return ns[l] < ns[r]; });
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const CertificateRow& r = out.rows[*it];
        if (!(r.entropy_ok && r.separation_ok)) break;
        out.n0 = r.n;
    }
    return out;
}

std::vector<RiskCurveRow> risk_curve(const DensityPair& p, std::size_t points) {
    const QuadraticBounds b = quadratic_bounds(p);
    const double a = p.threshold();
    std::vector<RiskCurveRow> rows;
    for (double alpha : unit_grid(points)) {
        rows.push_back({alpha, prediction_error(p, alpha), excess_risk(p, alpha), b.lower(a, alpha), b.upper(a, alpha)});
    }
    return rows;
}

std::string rates_csv(const RateReport& r) {
    std::ostringstream os;
    os << kRatesHeader << '\n';
    for (const auto& row : r.rows) {
        os << row.model << ',' << row.estimator << ',' << (row.scale ? format_double(*row.scale) : "") << ',' << row.n
           << ',' << row.trials << ',' << format_double(row.q50) << ',' << format_double(row.q90) << ','
           << format_double(row.q95) << ',' << format_double(row.mean_excess_scaled) << ',' << row.seed << '\n';
    }
    return os.str();
}

RateReport parse_rates_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kRatesHeader) throw Error(ErrorKind::Config, "not a rates CSV");
    RateReport r;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 10) throw Error(ErrorKind::Config, "rates CSV row needs 10 fields: " + line);
        RateRow row;
        row.model = f[0];
        row.estimator = f[1];
        if (!f[2].empty()) row.scale = parse_number<double>(f[2], "L");
        row.n = parse_number<std::uint64_t>(f[3], "n");
        row.trials = parse_number<std::size_t>(f[4], "trials");
        row.q50 = parse_number<double>(f[5], "q50");
        row.q90 = parse_number<double>(f[6], "q90");
        row.q95 = parse_number<double>(f[7], "q95");
        row.mean_excess_scaled = parse_number<double>(f[8], "mean_excess_scaled");
        row.seed = parse_number<std::uint64_t>(f[9], "seed");
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string rates_json(const RateReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "rates";
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        o["model"] = row.model;
        o["estimator"] = row.estimator;
        o["L"] = row.scale ? nlohmann::ordered_json(*row.scale) : nlohmann::ordered_json(nullptr);
        o["n"] = row.n;
        o["trials"] = row.trials;
        o["q50"] = row.q50;
        o["q90"] = row.q90;
        o["q95"] = row.q95;
        o["mean_excess_scaled"] = row.mean_excess_scaled;
        o["seed"] = row.seed;
        j["rows"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

std::string rates_svg(const RateReport& r) {
    constexpr double W = 800, H = 500, left = 70, right = 190, top = 30, bottom = 60;
    std::vector<std::string> labels;
    for (const auto& row : r.rows)
        if (std::find(labels.begin(), labels.end(), row_label(row)) == labels.end()) labels.push_back(row_label(row));

    double xmin = INFINITY, xmax = -INFINITY, ymax = 0.0;
    for (const auto& row : r.rows) {
        const double x = std::log10(static_cast<double>(row.n));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymax = std::max(ymax, row.q95);
    }
    if (!(xmax > xmin)) {
        xmin = std::isfinite(xmin) ? xmin - 0.5 : 0.0;
        xmax = xmin + 1.0;
    }
    if (!(ymax > 0.0)) ymax = 1.0;
    ymax *= 1.1;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto py = [&](double y) { return H - bottom - y / ymax * (H - top - bottom); };

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    const char* dashes[] = {"", "6,3", "2,3"};
    const char* qnames[] = {"q50", "q90", "q95"};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n"
       << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
       << "\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
        os << "<text x=\"" << px(d) << "\" y=\"" << H - bottom + 18 << "\" font-size=\"12\" text-anchor=\"middle\">1e"
           << d << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double y = ymax * i / 4.0;
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" font-size=\"12\" text-anchor=\"end\">"
           << format_double(std::round(y * 1000.0) / 1000.0) << "</text>\n";
    }
    os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 15
       << "\" font-size=\"13\" text-anchor=\"middle\">n (log scale)</text>\n";
    os << "<text x=\"18\" y=\"" << (top + H - bottom) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (top + H - bottom) / 2 << ")\">n^(1/3) |a_hat - a|</text>\n";

    for (std::size_t e = 0; e < labels.size(); ++e) {
        for (int q = 0; q < 3; ++q) {
            os << "<polyline fill=\"none\" stroke=\"" << colors[e % 8] << "\" stroke-width=\"1.5\"";
            if (*dashes[q]) os << " stroke-dasharray=\"" << dashes[q] << "\"";
            os << " data-series=\"" << xml_escape(labels[e]) << ' ' << qnames[q] << "\" points=\"";
            bool first = true;
            for (const auto& row : r.rows) {
                if (row_label(row) != labels[e]) continue;
                const double v = q == 0 ? row.q50 : q == 1 ? row.q90 : row.q95;
                os << (first ? "" : " ") << px(std::log10(static_cast<double>(row.n))) << ',' << py(v);
                first = false;
            }
            os << "\"/>\n";
        }
        const double ly = top + 20.0 * static_cast<double>(e);
        os << "<text x=\"" << W - right + 12 << "\" y=\"" << ly + 4 << "\" font-size=\"12\" fill=\"" << colors[e % 8]
           << "\">" << xml_escape(labels[e]) << "</text>\n";
    }
    os << "<text x=\"" << W - right + 12 << "\" y=\"" << H - bottom
       << "\" font-size=\"11\">solid q50, dashed q90, dotted q95</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string certificate_csv(const CertificateSweep& s) {
    std::ostringstream os;
    os << kCertificateHeader << '\n';
    for (const auto& r : s.rows) {
        os << r.model << ',' << format_double(r.delta) << ',' << r.n << ',' << format_double(r.eps) << ','
           << format_double(r.c1) << ',' << format_double(r.beta) << ',' << format_double(r.n_entropy) << ','
           << format_double(r.budget) << ',' << format_double(r.separation) << ',' << (r.entropy_ok ? "true" : "false")
           << ',' << (r.separation_ok ? "true" : "false") << '\n';
    }
    return os.str();
}

std::string certificate_json(const CertificateSweep& s) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "certificate";
    j["n0"] = s.n0 ? nlohmann::ordered_json(*s.n0) : nlohmann::ordered_json(nullptr);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : s.rows) {
        j["rows"].push_back({{"model", r.model}, {"delta", r.delta}, {"n", r.n}, {"eps", r.eps}, {"c1", r.c1},
                             {"beta", r.beta}, {"nH", r.n_entropy}, {"budget", r.budget}, {"sep", r.separation},
                             {"entropy_ok", r.entropy_ok}, {"sep_ok", r.separation_ok}});
    }
    return j.dump(2) + "\n";
}

std::string risk_curve_csv(const std::vector<RiskCurveRow>& rows) {
    std::ostringstream os;
    os << kRiskCurveHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.alpha) << ',' << format_double(r.loss) << ',' << format_double(r.excess) << ','
           << format_double(r.lower_bound) << ',' << format_double(r.upper_bound) << '\n';
    }
    return os.str();
}

std::string sample_csv(const LabeledSample& s, std::uint64_t master_seed, std::uint64_t trial) {
    std::ostringstream os;
    os << "# model=" << s.model_name << " n=" << s.size() << " seed=" << master_seed << " trial=" << trial
       << " stream=" << s.seed << '\n'
       << "x,y\n";
    for (const auto& pt : s.points) os << format_double(pt.x) << ',' << pt.y << '\n';
    return os.str();
}

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
    return path;
}

std::vector<std::filesystem::path> emit_outputs(const RateReport& r, const std::filesystem::path& dir) {
    return {write_text(dir, "rates.csv", rates_csv(r)), write_text(dir, "rates.json", rates_json(r)),
            write_text(dir, "rates.svg", rates_svg(r))};
}

}  // namespace threshlab
