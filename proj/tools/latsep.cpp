// latsep: command-line diagnostics for subgroup separation in latent spaces.
//
// Commands: synth, separation, sweep, correlate, bound, fit.
// Exit codes: 0 success, 2 input/config, 3 data sufficiency, 4 artifact
// mismatch, 1 internal.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "latsep/bound.hpp"
#include "latsep/errors.hpp"
#include "latsep/fits.hpp"
#include "latsep/harness.hpp"
#include "latsep/io.hpp"
#include "latsep/pca.hpp"
#include "latsep/separation.hpp"
#include "latsep/synthetic.hpp"
#include "latsep/types.hpp"

using nlohmann::json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out = ".";
    latsep::ReportFormat format = latsep::ReportFormat::json;

    std::string ext() const { return format == latsep::ReportFormat::json ? ".json" : ".csv"; }
    std::string path(const std::string& stem) const { return out + "/" + stem; }
};

std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw latsep::IoError("cannot open: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

bool is_csv(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
}

latsep::EmbeddingSet load_dataset(const std::string& path) {
    if (is_csv(path)) return latsep::load_csv(path);
    std::string stem = path;
    for (const char* suffix : {".bin", ".json"}) {
        const size_t len = std::strlen(suffix);
        if (stem.size() > len && stem.substr(stem.size() - len) == suffix)
            stem = stem.substr(0, stem.size() - len);
    }
    return latsep::load_binary(stem);
}

std::map<std::string, std::string> input_hashes(const std::vector<std::string>& paths) {
    std::map<std::string, std::string> out;
    for (const auto& p : paths) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(file_hash(is_csv(p) ? p : p)));
        out[p] = buf;
    }
    return out;
}

/// Manifest is written before any result artifact. Timing is recorded on
/// stderr rather than in the manifest so re-runs stay byte-identical.
void write_manifest(const GlobalOpts& g, const std::string& command, const json& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& artifacts) {
    json m;
    m["run_id"] = latsep::run_id(config, g.seed);
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = input_hashes(inputs);
    m["artifacts"] = artifacts;
    latsep::write_json_file(m, g.path(command + "_manifest.json"));
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 1.0, step = 0.1;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
        throw latsep::ParseError("grid must be start:end:step with step > 0, got '" + spec + "'");
    std::vector<double> grid;
    for (double a = lo; a <= hi + 1e-9; a += step) grid.push_back(std::min(a, hi));
    if (grid.empty() || grid.back() < hi - 1e-9) grid.push_back(hi);
    return grid;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    std::string cur;
    for (char c : spec + ",") {
        if (c == ',') {
            if (!cur.empty()) seeds.push_back(std::stoull(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (seeds.empty()) throw latsep::ParseError("no seeds in '" + spec + "'");
    return seeds;
}

void print_summary_table(const latsep::SubgroupSummary& s) {
    std::cout << "attribute " << s.attribute << " (n=" << s.n << ")\n";
    std::cout << "  group  gamma     P(Y=1|A)  n(y=0)  n(y=1)\n";
    for (int g : s.groups) {
        auto count = [&](int y) {
            auto it = s.counts.find({y, g});
            return it == s.counts.end() ? 0 : it->second;
        };
        std::printf("  %-6d %-9.4f %-9.4f %-7d %-7d\n", g, s.gamma.at(g),
                    s.class_given_group.at(g), count(0), count(1));
    }
}

// --- synth ---

struct SynthArgs {
    std::string preset;
    std::string config_file;
    int n = 4000;
    int levels = 8;
    bool binary = false;
    std::string name;
};

int cmd_synth(const GlobalOpts& g, const SynthArgs& a) {
    latsep::EmbeddingSet set;
    json config = {{"command", "synth"}, {"n", a.n}, {"seed", g.seed}};
    if (!a.config_file.empty()) {
        json c = latsep::read_json_file(a.config_file);
        latsep::SynthConfig sc;
        sc.n = c.value("n", sc.n);
        sc.d = c.value("d", sc.d);
        sc.attribute_offset = c.value("attribute_offset", sc.attribute_offset);
        sc.entanglement_angle = c.value("entanglement_angle", sc.entanglement_angle);
        sc.class_balance = c.value("class_balance", sc.class_balance);
        sc.group_prevalence = c.value("group_prevalence", sc.group_prevalence);
        sc.noise_std = c.value("noise_std", sc.noise_std);
        sc.attribute_name = c.value("attribute_name", sc.attribute_name);
        sc.seed = g.seed;
        set = latsep::generate(sc);
        config["config_file"] = a.config_file;
        config["synth_config"] = c;
    } else if (!a.preset.empty()) {
        set = latsep::make_preset(a.preset, a.n, g.seed, a.levels);
        config["preset"] = a.preset;
        config["levels"] = a.levels;
    } else {
        throw latsep::ConfigError("synth requires --preset or --config");
    }
    const std::string stem = a.name.empty() ? (a.preset.empty() ? "synth" : a.preset) : a.name;
    const std::string path = g.path(stem + (a.binary ? "" : ".csv"));
    std::vector<std::string> artifacts = {a.binary ? path + ".bin" : path};
    write_manifest(g, "synth", config, {}, artifacts);
    if (a.binary)
        latsep::save_binary(set, path);
    else
        latsep::save_csv(set, path);
    for (const auto& [attr, col] : set.attributes)
        print_summary_table(latsep::summarize(set, attr));
    std::cout << "wrote " << artifacts[0] << "\n";
    return 0;
}

// --- separation ---

struct SeparationArgs {
    std::string embeddings;
    std::vector<std::string> attributes;
    bool all_attributes = false;
    double variance = 0.7;
    bool no_pca = false;
    int bins = 50;
    std::vector<std::string> metrics = {"tv", "wd", "fd"};
    bool equal_class_weights = false;
};

int cmd_separation(const GlobalOpts& g, const SeparationArgs& a) {
    latsep::EmbeddingSet set = load_dataset(a.embeddings);
    std::vector<std::string> attrs = a.attributes;
    if (a.all_attributes) {
        attrs.clear();
        for (const auto& [name, col] : set.attributes) attrs.push_back(name);
    }
    if (attrs.empty()) throw latsep::ConfigError("name an attribute or pass --all-attributes");
    for (const auto& attr : attrs)
        if (!set.has_attribute(attr)) {
            std::string known;
            for (const auto& [name, col] : set.attributes) known += " " + name;
            throw latsep::UnknownAttribute("unknown attribute '" + attr + "'; known:" + known);
        }

    json config = {{"command", "separation"},  {"embeddings", a.embeddings},
                   {"attributes", attrs},      {"variance", a.variance},
                   {"no_pca", a.no_pca},       {"bins", a.bins},
                   {"metrics", a.metrics},     {"equal_class_weights", a.equal_class_weights},
                   {"seed", g.seed}};
    std::vector<std::string> artifacts;
    for (const auto& attr : attrs) artifacts.push_back(g.path("separation_" + attr + g.ext()));
    artifacts.push_back(g.path("pca" + std::string(".json")));
    write_manifest(g, "separation", config, {a.embeddings}, artifacts);

    latsep::EmbeddingSet projected = set;
    if (!a.no_pca) {
        latsep::PcaModel pca = latsep::fit_pca(set, a.variance);
        projected = latsep::project(pca, set);
        latsep::write_json_file(latsep::to_json(pca), g.path("pca.json"));
        std::cout << "pca: k=" << pca.k << " of " << set.dim() << " dims ("
                  << latsep::format_sig9(pca.variance_fraction) << " target fraction)\n";
    }

    latsep::SeparationOptions opts;
    opts.bins = a.bins;
    opts.equal_class_weights = a.equal_class_weights;
    std::vector<latsep::SeparationReport> reports;
    for (const auto& attr : attrs) {
        latsep::SeparationReport r = latsep::compute_separation(projected, attr, opts);
        r.seed = g.seed;
        latsep::save_report(r, g.path("separation_" + attr + g.ext()), g.format);
        reports.push_back(std::move(r));
    }
    std::sort(reports.begin(), reports.end(),
              [](const auto& x, const auto& y) { return x.epsilon_tv > y.epsilon_tv; });
    std::cout << "attribute            tv        wd        fd\n";
    const bool want = true;
    (void)want;
    for (const auto& r : reports)
        std::printf("%-20s %-9.4f %-9.4f %-9.4f\n", r.attribute.c_str(), r.epsilon_tv, r.wd,
                    r.fd);
    for (const auto& r : reports)
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

// --- sweep ---

struct SweepArgs {
    std::string embeddings;
    std::string eval_file;
    double holdout = 0.0;
    std::string attribute;
    int budget = 2000;
    std::string grid = "0:1:0.1";
    std::string seeds = "1,2,3,4,5";
    bool hold_py = false;
    std::string probe = "logistic";
    double lambda = 0.0;
    std::vector<std::string> report_attributes;
};

void save_sweep_plot(const latsep::SweepResult& sweep, const std::string& path) {
    // Seed-aggregated curve per (attribute, group, alpha, metric): plot-ready.
    std::ofstream out(path);
    if (!out) throw latsep::IoError("cannot open for writing: " + path);
    out << "attribute,group,alpha,metric,mean,std,n\n";
    const latsep::MetricKind kinds[] = {latsep::MetricKind::loss,
                                        latsep::MetricKind::balanced_accuracy,
                                        latsep::MetricKind::auc, latsep::MetricKind::accuracy};
    std::map<std::tuple<std::string, int, double, int>, std::vector<double>> cells;
    std::map<std::tuple<std::string, int, double, int>, int> ns;
    for (const auto& run : sweep.runs)
        for (const auto& [attr, groups] : run.per_group)
            for (const auto& [grp, m] : groups)
                for (int k = 0; k < 4; ++k) {
                    cells[{attr, grp, run.alpha, k}].push_back(m.get(kinds[k]));
                    ns[{attr, grp, run.alpha, k}] = m.n;
                }
    for (const auto& [key, vals] : cells) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= vals.size();
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double sd = vals.size() > 1 ? std::sqrt(var / (vals.size() - 1)) : 0.0;
        out << std::get<0>(key) << "," << std::get<1>(key) << ","
            << latsep::format_sig9(std::get<2>(key)) << ","
            << latsep::metric_name(kinds[std::get<3>(key)]) << "," << latsep::format_sig9(mean)
            << "," << latsep::format_sig9(sd) << "," << ns[key] << "\n";
    }
}

int cmd_sweep(const GlobalOpts& g, const SweepArgs& a) {
    latsep::EmbeddingSet train = load_dataset(a.embeddings);
    latsep::EmbeddingSet eval_set;
    if (!a.eval_file.empty()) {
        eval_set = load_dataset(a.eval_file);
    } else if (a.holdout > 0.0 && a.holdout < 1.0) {
        std::vector<int> idx(train.n());
        for (int i = 0; i < train.n(); ++i) idx[i] = i;
        std::mt19937_64 rng(g.seed ^ 0x5deece66dULL);
        std::shuffle(idx.begin(), idx.end(), rng);
        const int n_eval = std::max(1, static_cast<int>(std::lround(a.holdout * train.n())));
        std::vector<int> eval_idx(idx.begin(), idx.begin() + n_eval);
        std::vector<int> train_idx(idx.begin() + n_eval, idx.end());
        std::sort(eval_idx.begin(), eval_idx.end());
        std::sort(train_idx.begin(), train_idx.end());
        eval_set = latsep::take_rows(train, eval_idx);
        train = latsep::take_rows(train, train_idx);
    } else {
        throw latsep::ConfigError("sweep requires --eval FILE or --holdout FRACTION in (0,1)");
    }

    latsep::AllocationSpec spec;
    spec.attribute = a.attribute;
    spec.budget = a.budget;
    spec.grid = parse_grid(a.grid);
    spec.seeds = parse_seeds(a.seeds);
    spec.hold_py = a.hold_py;
    spec.hold_py_given_a = !a.hold_py;
    spec.report_attributes = a.report_attributes;

    json config = {{"command", "sweep"},
                   {"embeddings", a.embeddings},
                   {"eval", a.eval_file},
                   {"holdout", a.holdout},
                   {"attribute", a.attribute},
                   {"budget", a.budget},
                   {"grid", spec.grid},
                   {"seeds", spec.seeds},
                   {"hold_py", a.hold_py},
                   {"probe", a.probe},
                   {"lambda", a.lambda},
                   {"seed", g.seed}};
    const std::string sweep_path = g.path("sweep_" + a.attribute + g.ext());
    std::vector<std::string> artifacts = {sweep_path, g.path("sweep_" + a.attribute + "_plot.csv")};
    const latsep::MetricKind fit_kinds[] = {latsep::MetricKind::loss,
                                            latsep::MetricKind::balanced_accuracy,
                                            latsep::MetricKind::auc, latsep::MetricKind::accuracy};
    for (auto k : fit_kinds)
        artifacts.push_back(g.path("fit_" + a.attribute + "_" + latsep::metric_name(k) + g.ext()));
    std::vector<std::string> inputs = {a.embeddings};
    if (!a.eval_file.empty()) inputs.push_back(a.eval_file);
    write_manifest(g, "sweep", config, inputs, artifacts);

    if (a.probe == "mlp" || a.lambda > 0.0) {
        latsep::EncoderConfig enc;
        enc.lambda = a.lambda;
        latsep::EncoderParams params =
            latsep::pretrain_encoder(train, a.attribute, enc, g.seed + 17);
        train = latsep::encode(params, train);
        eval_set = latsep::encode(params, eval_set);
        std::cout << "encoder: lambda=" << a.lambda << ", final task loss "
                  << latsep::format_sig9(params.loss_trace.back()) << "\n";
    } else if (a.probe != "logistic") {
        throw latsep::ConfigError("--probe must be 'logistic' or 'mlp', got '" + a.probe + "'");
    }

    latsep::SweepResult sweep = latsep::run_sweep(train, spec, eval_set, g.jobs);
    latsep::save_report(sweep, sweep_path, g.format);
    save_sweep_plot(sweep, g.path("sweep_" + a.attribute + "_plot.csv"));

    std::cout << "attribute " << a.attribute << ": " << sweep.runs.size() << " runs ("
              << spec.grid.size() << " allocations x " << spec.seeds.size() << " seeds)\n";
    for (auto k : fit_kinds) {
        latsep::SensitivityFit fit = latsep::fit_linear(sweep, k);
        latsep::save_report(fit, g.path("fit_" + a.attribute + "_" + latsep::metric_name(k) +
                                        g.ext()),
                            g.format);
        std::cout << "  " << latsep::metric_name(k) << " slope mean "
                  << latsep::format_sig9(fit.slope_mean) << " (std "
                  << latsep::format_sig9(fit.slope_std) << ")\n";
    }
    return 0;
}

// --- correlate ---

struct CorrelateArgs {
    std::vector<std::string> separations;
    std::vector<std::string> fits;
};

int cmd_correlate(const GlobalOpts& g, const CorrelateArgs& a) {
    if (a.separations.size() != a.fits.size())
        throw latsep::MismatchedAttributes("need equal counts of --separation and --fit files");
    std::vector<latsep::SeparationReport> seps;
    std::vector<latsep::SensitivityFit> fits;
    for (const auto& p : a.separations)
        seps.push_back(latsep::separation_from_json(latsep::read_json_file(p)));
    for (const auto& p : a.fits) fits.push_back(latsep::fit_from_json(latsep::read_json_file(p)));

    json config = {{"command", "correlate"},
                   {"separations", a.separations},
                   {"fits", a.fits},
                   {"seed", g.seed}};
    std::vector<std::string> inputs = a.separations;
    inputs.insert(inputs.end(), a.fits.begin(), a.fits.end());
    const std::string out_path = g.path("correlation" + g.ext());
    const std::string plot_path = g.path("correlation_plot.csv");
    write_manifest(g, "correlate", config, inputs, {out_path, plot_path});

    latsep::CorrelationReport report = latsep::correlate(seps, fits);
    latsep::save_report(report, out_path, g.format);
    {
        std::ofstream plot(plot_path);
        plot << "attribute,tv,slope,slope_std\n";
        for (size_t i = 0; i < report.attributes.size(); ++i)
            plot << report.attributes[i] << "," << latsep::format_sig9(report.separation[i])
                 << "," << latsep::format_sig9(report.slope[i]) << ","
                 << latsep::format_sig9(report.slope_std[i]) << "\n";
    }
    std::cout << report.metric_pair << ": r = " << latsep::format_sig9(report.pearson_r)
              << " (p = " << latsep::format_sig9(report.p_value) << ", n = "
              << report.attributes.size() << ")\n";
    return 0;
}

// --- bound ---

struct BoundArgs {
    std::string sweep_file;
    std::string separation_file;
    double slack = 0.0;
};

int cmd_bound(const GlobalOpts& g, const BoundArgs& a) {
    latsep::SweepResult sweep = latsep::sweep_from_json(latsep::read_json_file(a.sweep_file));
    latsep::SeparationReport sep =
        latsep::separation_from_json(latsep::read_json_file(a.separation_file));
    json config = {{"command", "bound"},
                   {"sweep", a.sweep_file},
                   {"separation", a.separation_file},
                   {"slack", a.slack},
                   {"seed", g.seed}};
    const std::string out_path = g.path("bound_" + sweep.attribute + g.ext());
    write_manifest(g, "bound", config, {a.sweep_file, a.separation_file}, {out_path});

    std::vector<latsep::BoundCheck> checks =
        latsep::check_sweep_against_bound(sweep, sep, a.slack);
    latsep::save_report(checks, out_path, g.format);
    json summary = latsep::to_json(checks)["summary"];
    std::cout << "epsilon = " << latsep::format_sig9(sep.epsilon_tv) << ", pairs = "
              << summary["pairs"] << ", fraction satisfied = "
              << latsep::format_sig9(summary["fraction_satisfied"].get<double>())
              << ", max violation = "
              << latsep::format_sig9(summary["max_violation"].get<double>())
              << ", out-of-assumption pairs = " << summary["out_of_assumption_pairs"] << "\n";
    return 0;
}

// --- fit ---

struct FitArgs {
    std::string sweep_file;
    std::string metric = "loss";
    std::string model = "linear";
};

int cmd_fit(const GlobalOpts& g, const FitArgs& a) {
    latsep::SweepResult sweep = latsep::sweep_from_json(latsep::read_json_file(a.sweep_file));
    const latsep::MetricKind kind = latsep::metric_from_name(a.metric);
    json config = {{"command", "fit"},
                   {"sweep", a.sweep_file},
                   {"metric", a.metric},
                   {"model", a.model},
                   {"seed", g.seed}};
    if (a.model == "linear") {
        const std::string out_path =
            g.path("fit_" + sweep.attribute + "_" + a.metric + g.ext());
        write_manifest(g, "fit", config, {a.sweep_file}, {out_path});
        latsep::SensitivityFit fit = latsep::fit_linear(sweep, kind);
        latsep::save_report(fit, out_path, g.format);
        for (const auto& [grp, slope] : fit.group_slope)
            std::cout << sweep.attribute << " group " << grp << ": slope "
                      << latsep::format_sig9(slope) << " (std "
                      << latsep::format_sig9(fit.group_slope_std.at(grp)) << ")\n";
        return 0;
    }
    if (a.model != "powerlaw")
        throw latsep::ConfigError("--model must be 'linear' or 'powerlaw', got '" + a.model + "'");

    // Power-law path: per group, points are (n_g, n, loss) across runs.
    std::vector<int> groups;
    for (const auto& [grp, m] : sweep.runs.front().per_group.at(sweep.attribute))
        groups.push_back(grp);
    std::vector<std::string> artifacts;
    for (int grp : groups)
        artifacts.push_back(
            g.path("powerlaw_" + sweep.attribute + "_g" + std::to_string(grp) + ".json"));
    write_manifest(g, "fit", config, {a.sweep_file}, artifacts);
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        const int grp = groups[gi];
        std::vector<std::array<double, 3>> points;
        for (const auto& run : sweep.runs) {
            double n_g = 0.0, n = 0.0;
            for (const auto& [cell, c] : run.cell_counts) {
                n += c;
                if (cell.substr(cell.find("_a") + 2) == std::to_string(grp)) n_g += c;
            }
            if (n_g <= 0.0) continue;
            points.push_back({n_g, n, run.per_group.at(sweep.attribute).at(grp).get(kind)});
        }
        latsep::PowerLawFit fit = latsep::fit_powerlaw(points);
        latsep::write_json_file(latsep::to_json(fit), artifacts[gi]);
        std::cout << sweep.attribute << " group " << grp << ": sigma "
                  << latsep::format_sig9(fit.sigma) << " (" << latsep::format_sig9(fit.sigma_std)
                  << "), p " << latsep::format_sig9(fit.p) << " ("
                  << latsep::format_sig9(fit.p_std) << ")"
                  << (fit.unstable_parameters.empty() ? "" : " [unstable]") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latsep: subgroup separation diagnostics for frozen representations"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global flags after the subcommand name

    GlobalOpts g;
    if (const char* env = std::getenv("LATSEP_OUT")) g.out = env;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads for sweeps")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    std::string format = "json";
    app.add_option("--format", format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic embedding dataset");
    synth_cmd->add_option("--preset", synth.preset, "Preset: invariant, entangled, mnist-like, graded-battery");
    synth_cmd->add_option("--config", synth.config_file, "JSON generator config file");
    synth_cmd->add_option("--n", synth.n, "Sample count")->capture_default_str();
    synth_cmd->add_option("--levels", synth.levels, "Attribute count for graded-battery")
        ->capture_default_str();
    synth_cmd->add_flag("--binary", synth.binary, "Write binary instead of CSV");
    synth_cmd->add_option("--name", synth.name, "Output file stem (default: preset name)");

    SeparationArgs sep;
    auto* sep_cmd = app.add_subcommand("separation", "Measure subgroup separation (TV/WD/FD)");
    sep_cmd->add_option("--embeddings", sep.embeddings, "Dataset file (CSV or binary)")
        ->required();
    sep_cmd->add_option("--attribute", sep.attributes, "Attribute(s) to measure");
    sep_cmd->add_flag("--all-attributes", sep.all_attributes, "Measure every attribute");
    sep_cmd->add_option("--variance", sep.variance, "PCA explained-variance fraction")
        ->capture_default_str();
    sep_cmd->add_flag("--no-pca", sep.no_pca, "Skip PCA; use the full space");
    sep_cmd->add_option("--bins", sep.bins, "Histogram bins for TV")->capture_default_str();
    sep_cmd->add_option("--metric", sep.metrics, "Metrics to report (tv, wd, fd)")
        ->capture_default_str();
    sep_cmd->add_flag("--equal-class-weights", sep.equal_class_weights,
                      "Uniform instead of empirical class weights");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Fixed-budget allocation sweep with probes");
    sweep_cmd->add_option("--embeddings", sweep.embeddings, "Training dataset file")->required();
    sweep_cmd->add_option("--eval", sweep.eval_file, "Evaluation dataset file");
    sweep_cmd->add_option("--holdout", sweep.holdout, "Eval fraction split off the dataset");
    sweep_cmd->add_option("--attribute", sweep.attribute, "Attribute swept over")->required();
    sweep_cmd->add_option("--budget", sweep.budget, "Fine-tuning set size K")
        ->capture_default_str();
    sweep_cmd->add_option("--grid", sweep.grid, "Allocation grid start:end:step")
        ->capture_default_str();
    sweep_cmd->add_option("--seeds", sweep.seeds, "Comma-separated resampling seeds")
        ->capture_default_str();
    sweep_cmd->add_flag("--hold-py", sweep.hold_py,
                        "Stratify cells against the pooled marginal P(Y) "
                        "(default: per-group conditional P(Y|A))");
    sweep_cmd->add_option("--probe", sweep.probe, "Probe: logistic or mlp")
        ->capture_default_str();
    sweep_cmd->add_option("--lambda", sweep.lambda,
                          "TV-surrogate weight for encoder pre-training")
        ->capture_default_str();
    sweep_cmd->add_option("--report-attribute", sweep.report_attributes,
                          "Extra attributes to slice evaluation by");

    CorrelateArgs corr;
    auto* corr_cmd =
        app.add_subcommand("correlate", "Correlate separation with sensitivity slopes");
    corr_cmd->add_option("--separation", corr.separations, "SeparationReport JSON files")
        ->required();
    corr_cmd->add_option("--fit", corr.fits, "SensitivityFit JSON files")->required();

    BoundArgs bound;
    auto* bound_cmd = app.add_subcommand("bound", "Check a sweep against the 4*eps + gap bound");
    bound_cmd->add_option("--sweep", bound.sweep_file, "SweepResult JSON file")->required();
    bound_cmd->add_option("--separation", bound.separation_file, "SeparationReport JSON file")
        ->required();
    bound_cmd->add_option("--slack", bound.slack, "Additive tolerance")->capture_default_str();

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Re-fit summaries from an existing sweep");
    fit_cmd->add_option("--sweep", fit.sweep_file, "SweepResult JSON file")->required();
    fit_cmd->add_option("--metric", fit.metric, "loss, balanced_accuracy, auc, or accuracy")
        ->capture_default_str();
    fit_cmd->add_option("--model", fit.model, "linear or powerlaw")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    g.format = format == "csv" ? latsep::ReportFormat::csv : latsep::ReportFormat::json;

    const auto started = std::chrono::steady_clock::now();
    int rc = 1;
    try {
        if (synth_cmd->parsed()) rc = cmd_synth(g, synth);
        if (sep_cmd->parsed()) rc = cmd_separation(g, sep);
        if (sweep_cmd->parsed()) rc = cmd_sweep(g, sweep);
        if (corr_cmd->parsed()) rc = cmd_correlate(g, corr);
        if (bound_cmd->parsed()) rc = cmd_bound(g, bound);
        if (fit_cmd->parsed()) rc = cmd_fit(g, fit);
    } catch (const latsep::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const latsep::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const latsep::MismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    std::cerr << "elapsed: " << elapsed.count() << " s\n";
    return rc;
}
