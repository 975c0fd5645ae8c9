#include "latsep/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "latsep/errors.hpp"

using nlohmann::json;

namespace latsep {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int row, const std::string& col) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ParseError("row " + std::to_string(row) + ", column '" + col +
                         "': malformed value '" + s + "'");
    return v;
}

int parse_int(const std::string& s, int row, const std::string& col, int lo, int hi) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || v < lo || v > hi)
        throw ParseError("row " + std::to_string(row) + ", column '" + col + "': value '" + s +
                         "' outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

void require_valid(EmbeddingSet& set) {
    auto violations = validate(set);
    if (!violations.empty()) {
        std::string msg = "dataset failed validation:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ValidationError(msg);
    }
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

}  // namespace

std::string format_sig9(double v) { return fmt("%.9g", v); }

EmbeddingSet load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": missing header row");
    auto header = split_line(line);

    if (header.empty() || header[0] != "id")
        throw SchemaError(path + ": first column must be 'id'");
    if (header.size() < 2 || header[1] != "y") throw SchemaError(path + ": 'y' column missing");
    size_t col = 2;
    std::vector<std::string> attr_names;
    while (col < header.size() && header[col].rfind("a_", 0) == 0) {
        attr_names.push_back(header[col].substr(2));
        ++col;
    }
    const size_t z_start = col;
    int d = 0;
    for (; col < header.size(); ++col, ++d)
        if (header[col] != "z_" + std::to_string(d))
            throw SchemaError(path + ": expected column 'z_" + std::to_string(d) + "', found '" +
                              header[col] + "'");
    if (d == 0) throw SchemaError(path + ": no z_* columns");

    EmbeddingSet set;
    for (const auto& name : attr_names) set.attributes[name] = {};
    std::vector<std::vector<double>> rows;
    int rowno = 0;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw ParseError("row " + std::to_string(rowno) + ": expected " +
                             std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
        set.ids.push_back(cells[0]);
        set.y.push_back(parse_int(cells[1], rowno, "y", 0, 1));
        for (size_t a = 0; a < attr_names.size(); ++a)
            set.attributes[attr_names[a]].push_back(
                parse_int(cells[2 + a], rowno, "a_" + attr_names[a], 0, 255));
        std::vector<double> z(d);
        for (int j = 0; j < d; ++j)
            z[j] = parse_double(cells[z_start + j], rowno, "z_" + std::to_string(j));
        rows.push_back(std::move(z));
    }
    set.z.resize(static_cast<int>(rows.size()), d);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < d; ++j) set.z(static_cast<int>(i), j) = rows[i][j];
    require_valid(set);
    return set;
}

void save_csv(const EmbeddingSet& dataset, const std::string& path) {
    auto out = open_out(path);
    out << "id,y";
    for (const auto& [name, col] : dataset.attributes) out << ",a_" << name;
    for (int j = 0; j < dataset.dim(); ++j) out << ",z_" << j;
    out << "\n";
    for (int i = 0; i < dataset.n(); ++i) {
        out << dataset.ids[i] << ',' << dataset.y[i];
        for (const auto& [name, col] : dataset.attributes) out << ',' << col[i];
        for (int j = 0; j < dataset.dim(); ++j) out << ',' << fmt("%.17g", dataset.z(i, j));
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_binary(const EmbeddingSet& dataset, const std::string& path) {
    json header;
    header["format_version"] = 1;
    header["n"] = dataset.n();
    header["d"] = dataset.dim();
    header["encoder_tag"] = dataset.encoder_tag;
    header["attribute_names"] = json::array();
    header["value_dictionaries"] = json::object();
    for (const auto& [name, col] : dataset.attributes) {
        header["attribute_names"].push_back(name);
        json dict = json::object();
        auto vn = dataset.value_names.find(name);
        if (vn != dataset.value_names.end())
            for (const auto& [code, label] : vn->second) dict[std::to_string(code)] = label;
        header["value_dictionaries"][name] = dict;
    }
    write_json_file(header, path + ".json");

    auto out = open_out(path + ".bin", true);
    for (int i = 0; i < dataset.n(); ++i)
        for (int j = 0; j < dataset.dim(); ++j) {
            const float v = static_cast<float>(dataset.z(i, j));
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    for (int i = 0; i < dataset.n(); ++i) {
        const std::uint8_t y = static_cast<std::uint8_t>(dataset.y[i]);
        out.write(reinterpret_cast<const char*>(&y), 1);
    }
    for (const auto& name : header["attribute_names"]) {
        const auto& col = dataset.attributes.at(name.get<std::string>());
        for (int i = 0; i < dataset.n(); ++i) {
            const std::uint8_t a = static_cast<std::uint8_t>(col[i]);
            out.write(reinterpret_cast<const char*>(&a), 1);
        }
    }
    if (!out) throw IoError("write failed: " + path + ".bin");
}

EmbeddingSet load_binary(const std::string& path) {
    json header = read_json_file(path + ".json");
    if (!header.contains("format_version") || header["format_version"].get<int>() != 1)
        throw VersionError(path + ".json: unknown format_version");
    const int n = header.at("n").get<int>();
    const int d = header.at("d").get<int>();
    if (n < 1 || d < 1) throw SchemaError(path + ".json: n, d must be >= 1");
    std::vector<std::string> attr_names =
        header.at("attribute_names").get<std::vector<std::string>>();

    std::ifstream in(path + ".bin", std::ios::binary);
    if (!in) throw IoError("cannot open: " + path + ".bin");
    in.seekg(0, std::ios::end);
    const std::int64_t expect = static_cast<std::int64_t>(n) * d * 4 + n +
                                static_cast<std::int64_t>(n) * attr_names.size();
    if (static_cast<std::int64_t>(in.tellg()) != expect)
        throw SizeMismatch(path + ".bin: file length " + std::to_string(in.tellg()) +
                           " != expected " + std::to_string(expect));
    in.seekg(0);

    EmbeddingSet set;
    set.encoder_tag = header.value("encoder_tag", "");
    set.z.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            float v;
            in.read(reinterpret_cast<char*>(&v), 4);
            set.z(i, j) = v;
        }
    set.y.resize(n);
    for (int i = 0; i < n; ++i) {
        std::uint8_t y;
        in.read(reinterpret_cast<char*>(&y), 1);
        set.y[i] = y;
    }
    for (const auto& name : attr_names) {
        std::vector<int> col(n);
        for (int i = 0; i < n; ++i) {
            std::uint8_t a;
            in.read(reinterpret_cast<char*>(&a), 1);
            col[i] = a;
        }
        set.attributes[name] = std::move(col);
    }
    if (header.contains("value_dictionaries"))
        for (const auto& [name, dict] : header["value_dictionaries"].items())
            for (const auto& [code, label] : dict.items())
                set.value_names[name][std::stoi(code)] = label.get<std::string>();
    set.ids.resize(n);
    for (int i = 0; i < n; ++i) set.ids[i] = std::to_string(i);
    require_valid(set);
    return set;
}

// --- report serialization ---

namespace {

json metrics_to_json(const Metrics& m) {
    return {{"loss", m.loss},
            {"balanced_accuracy", m.balanced_accuracy},
            {"auc", m.auc},
            {"accuracy", m.accuracy},
            {"n", m.n}};
}

Metrics metrics_from_json(const json& j) {
    Metrics m;
    m.loss = j.at("loss").get<double>();
    m.balanced_accuracy = j.at("balanced_accuracy").get<double>();
    m.auc = j.at("auc").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    m.n = j.at("n").get<int>();
    return m;
}

template <typename T>
json int_map_to_json(const std::map<int, T>& m) {
    json out = json::object();
    for (const auto& [k, v] : m) out[std::to_string(k)] = v;
    return out;
}

}  // namespace

json to_json(const SeparationReport& report) {
    json j;
    j["attribute"] = report.attribute;
    j["tv"] = report.epsilon_tv;
    j["per_class_tv"] = int_map_to_json(report.per_class_tv);
    j["wd"] = report.wd;
    j["fd"] = report.fd;
    j["k"] = report.k;
    j["bins"] = report.bins;
    j["n_per_cell"] = report.n_per_cell;
    j["seed"] = report.seed;
    j["warnings"] = report.warnings;
    return j;
}

SeparationReport separation_from_json(const json& j) {
    SeparationReport r;
    r.attribute = j.at("attribute").get<std::string>();
    r.epsilon_tv = j.at("tv").get<double>();
    for (const auto& [k, v] : j.at("per_class_tv").items())
        r.per_class_tv[std::stoi(k)] = v.get<double>();
    r.wd = j.at("wd").get<double>();
    r.fd = j.at("fd").get<double>();
    r.k = j.at("k").get<int>();
    r.bins = j.at("bins").get<int>();
    if (j.contains("n_per_cell"))
        r.n_per_cell = j["n_per_cell"].get<std::map<std::string, int>>();
    r.seed = j.value("seed", 0ULL);
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    return r;
}

json to_json(const PcaModel& model) {
    json j;
    j["k"] = model.k;
    j["variance_fraction"] = model.variance_fraction;
    j["total_variance"] = model.total_variance;
    j["explained_variance"] = std::vector<double>(
        model.explained_variance.data(), model.explained_variance.data() + model.k);
    j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
    json comps = json::array();
    for (int i = 0; i < model.k; ++i)
        comps.push_back(std::vector<double>(model.components.row(i).data(),
                                            model.components.row(i).data() +
                                                model.components.cols()));
    j["components"] = comps;
    return j;
}

json to_json(const SweepResult& sweep) {
    json spec;
    spec["attribute"] = sweep.spec.attribute;
    spec["budget"] = sweep.spec.budget;
    spec["grid"] = sweep.spec.grid;
    spec["hold_py"] = sweep.spec.hold_py;
    spec["hold_py_given_a"] = sweep.spec.hold_py_given_a;
    spec["seeds"] = sweep.spec.seeds;
    spec["probe"] = {{"learning_rate", sweep.spec.probe.learning_rate},
                     {"epochs", sweep.spec.probe.epochs},
                     {"l2", sweep.spec.probe.l2}};
    spec["report_attributes"] = sweep.spec.report_attributes;

    json runs = json::array();
    for (const auto& run : sweep.runs) {
        json r;
        r["alpha"] = run.alpha;
        r["seed"] = run.seed;
        r["cell_counts"] = run.cell_counts;
        r["realized_py"] = run.realized_py;
        r["degenerate_probe"] = run.degenerate_probe;
        r["overall"] = metrics_to_json(run.overall);
        json pg = json::object();
        for (const auto& [attr, groups] : run.per_group) {
            json gm = json::object();
            for (const auto& [g, m] : groups) gm[std::to_string(g)] = metrics_to_json(m);
            pg[attr] = gm;
        }
        r["per_group"] = pg;
        runs.push_back(std::move(r));
    }
    return {{"attribute", sweep.attribute},
            {"spec", spec},
            {"dataset_hash", sweep.dataset_hash},
            {"eval_hash", sweep.eval_hash},
            {"runs", runs}};
}

SweepResult sweep_from_json(const json& j) {
    SweepResult sweep;
    sweep.attribute = j.at("attribute").get<std::string>();
    const json& spec = j.at("spec");
    sweep.spec.attribute = spec.at("attribute").get<std::string>();
    sweep.spec.budget = spec.at("budget").get<int>();
    sweep.spec.grid = spec.at("grid").get<std::vector<double>>();
    sweep.spec.hold_py = spec.at("hold_py").get<bool>();
    sweep.spec.hold_py_given_a = spec.at("hold_py_given_a").get<bool>();
    sweep.spec.seeds = spec.at("seeds").get<std::vector<std::uint64_t>>();
    sweep.spec.probe.learning_rate = spec.at("probe").at("learning_rate").get<double>();
    sweep.spec.probe.epochs = spec.at("probe").at("epochs").get<int>();
    sweep.spec.probe.l2 = spec.at("probe").at("l2").get<double>();
    sweep.spec.report_attributes = spec.at("report_attributes").get<std::vector<std::string>>();
    sweep.dataset_hash = j.at("dataset_hash").get<std::uint64_t>();
    sweep.eval_hash = j.at("eval_hash").get<std::uint64_t>();
    for (const auto& r : j.at("runs")) {
        RunRecord run;
        run.alpha = r.at("alpha").get<double>();
        run.seed = r.at("seed").get<std::uint64_t>();
        run.cell_counts = r.at("cell_counts").get<std::map<std::string, int>>();
        run.realized_py = r.at("realized_py").get<double>();
        run.degenerate_probe = r.value("degenerate_probe", false);
        run.overall = metrics_from_json(r.at("overall"));
        for (const auto& [attr, groups] : r.at("per_group").items())
            for (const auto& [g, m] : groups.items())
                run.per_group[attr][std::stoi(g)] = metrics_from_json(m);
        sweep.runs.push_back(std::move(run));
    }
    return sweep;
}

json to_json(const SensitivityFit& fit) {
    json j;
    j["attribute"] = fit.attribute;
    j["metric"] = metric_name(fit.metric);
    j["group_slope"] = int_map_to_json(fit.group_slope);
    j["group_slope_std"] = int_map_to_json(fit.group_slope_std);
    j["group_slope_stderr"] = int_map_to_json(fit.group_slope_stderr);
    j["group_intercept"] = int_map_to_json(fit.group_intercept);
    j["group_r2"] = int_map_to_json(fit.group_r2);
    j["delta_endpoint"] = int_map_to_json(fit.delta_endpoint);
    j["delta_endpoint_std"] = int_map_to_json(fit.delta_endpoint_std);
    j["slope_mean"] = fit.slope_mean;
    j["slope_std"] = fit.slope_std;
    return j;
}

SensitivityFit fit_from_json(const json& j) {
    SensitivityFit fit;
    fit.attribute = j.at("attribute").get<std::string>();
    fit.metric = metric_from_name(j.at("metric").get<std::string>());
    auto read_map = [&](const char* key, std::map<int, double>& out) {
        if (!j.contains(key)) return;
        for (const auto& [k, v] : j.at(key).items()) out[std::stoi(k)] = v.get<double>();
    };
    read_map("group_slope", fit.group_slope);
    read_map("group_slope_std", fit.group_slope_std);
    read_map("group_slope_stderr", fit.group_slope_stderr);
    read_map("group_intercept", fit.group_intercept);
    read_map("group_r2", fit.group_r2);
    read_map("delta_endpoint", fit.delta_endpoint);
    read_map("delta_endpoint_std", fit.delta_endpoint_std);
    fit.slope_mean = j.at("slope_mean").get<double>();
    fit.slope_std = j.at("slope_std").get<double>();
    return fit;
}

json to_json(const PowerLawFit& fit) {
    return {{"sigma", fit.sigma},
            {"sigma_std", fit.sigma_std},
            {"p", fit.p},
            {"p_std", fit.p_std},
            {"tau", fit.tau},
            {"tau_std", fit.tau_std},
            {"q", fit.q},
            {"q_std", fit.q_std},
            {"delta", fit.delta},
            {"delta_std", fit.delta_std},
            {"converged", fit.converged},
            {"residual_norm", fit.residual_norm},
            {"degenerate", fit.degenerate},
            {"unstable_parameters", fit.unstable_parameters}};
}

json to_json(const CorrelationReport& report) {
    return {{"attributes", report.attributes},
            {"separation", report.separation},
            {"slope", report.slope},
            {"slope_std", report.slope_std},
            {"pearson_r", report.pearson_r},
            {"p_value", report.p_value},
            {"metric_pair", report.metric_pair}};
}

json to_json(const std::vector<BoundCheck>& checks) {
    json arr = json::array();
    int satisfied = 0, total = 0, out_of_assumption = 0;
    double max_violation = 0.0;
    for (const auto& c : checks) {
        json jc;
        jc["attribute"] = c.attribute;
        jc["alpha_a"] = c.alpha_a;
        jc["alpha_b"] = c.alpha_b;
        jc["epsilon"] = c.epsilon;
        jc["overall_gap"] = c.overall_gap;
        jc["bound_value"] = c.bound_value;
        jc["slack"] = c.slack;
        jc["in_assumption"] = c.in_assumption;
        jc["group_gaps"] = int_map_to_json(c.group_gaps);
        jc["satisfied"] = int_map_to_json(c.satisfied);
        arr.push_back(std::move(jc));
        if (!c.in_assumption) {
            ++out_of_assumption;
            continue;
        }
        for (const auto& [g, ok] : c.satisfied) {
            ++total;
            if (ok)
                ++satisfied;
            else
                max_violation =
                    std::max(max_violation, c.group_gaps.at(g) - (c.bound_value + c.slack));
        }
    }
    json summary;
    summary["pairs"] = static_cast<int>(checks.size());
    summary["in_assumption_checks"] = total;
    summary["fraction_satisfied"] = total > 0 ? static_cast<double>(satisfied) / total : 1.0;
    summary["max_violation"] = max_violation;
    summary["out_of_assumption_pairs"] = out_of_assumption;
    // The Bayes-optimality assumption cannot hold for trained probes; these
    // verdicts are empirical, not certificates.
    summary["mode"] = "empirical";
    return {{"checks", arr}, {"summary", summary}};
}

json to_json(const SubgroupSummary& summary) {
    json j;
    j["attribute"] = summary.attribute;
    j["n"] = summary.n;
    j["groups"] = summary.groups;
    j["gamma"] = int_map_to_json(summary.gamma);
    j["class_given_group"] = int_map_to_json(summary.class_given_group);
    json counts = json::object();
    for (const auto& [cell, c] : summary.counts)
        counts["y" + std::to_string(cell.first) + "_a" + std::to_string(cell.second)] = c;
    j["counts"] = counts;
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string run_id(const json& config, std::uint64_t seed) {
    const std::string dump = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const void* data, size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(dump.data(), dump.size());
    mix(&seed, sizeof seed);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- CSV report writers ---

namespace {

void save_json_report(const json& j, const std::string& path) { write_json_file(j, path); }

}  // namespace

void save_report(const SeparationReport& report, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        save_json_report(to_json(report), path);
        return;
    }
    auto out = open_out(path);
    out << "attribute,group,allocation,metric,value,std,n\n";
    out << report.attribute << ",,,tv," << format_sig9(report.epsilon_tv) << ",,\n";
    for (const auto& [y, tv] : report.per_class_tv)
        out << report.attribute << ",,,tv_y" << y << "," << format_sig9(tv) << ",,\n";
    out << report.attribute << ",,,wd," << format_sig9(report.wd) << ",,\n";
    out << report.attribute << ",,,fd," << format_sig9(report.fd) << ",,\n";
    if (!out) throw IoError("write failed: " + path);
}

void save_report(const SweepResult& sweep, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        save_json_report(to_json(sweep), path);
        return;
    }
    auto out = open_out(path);
    out << "attribute,group,allocation,seed,metric,value,n\n";
    const MetricKind kinds[] = {MetricKind::loss, MetricKind::balanced_accuracy, MetricKind::auc,
                                MetricKind::accuracy};
    for (const auto& run : sweep.runs) {
        for (MetricKind k : kinds)
            out << sweep.attribute << ",," << format_sig9(run.alpha) << "," << run.seed << ","
                << metric_name(k) << "," << format_sig9(run.overall.get(k)) << ","
                << run.overall.n << "\n";
        for (const auto& [attr, groups] : run.per_group)
            for (const auto& [g, m] : groups)
                for (MetricKind k : kinds)
                    out << attr << "," << g << "," << format_sig9(run.alpha) << "," << run.seed
                        << "," << metric_name(k) << "," << format_sig9(m.get(k)) << "," << m.n
                        << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_report(const SensitivityFit& fit, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        save_json_report(to_json(fit), path);
        return;
    }
    auto out = open_out(path);
    out << "attribute,group,metric,quantity,value\n";
    const std::string base = fit.attribute + "," ;
    for (const auto& [g, v] : fit.group_slope) {
        out << fit.attribute << "," << g << "," << metric_name(fit.metric) << ",slope,"
            << format_sig9(v) << "\n";
        out << fit.attribute << "," << g << "," << metric_name(fit.metric) << ",slope_std,"
            << format_sig9(fit.group_slope_std.at(g)) << "\n";
        out << fit.attribute << "," << g << "," << metric_name(fit.metric) << ",intercept,"
            << format_sig9(fit.group_intercept.at(g)) << "\n";
        out << fit.attribute << "," << g << "," << metric_name(fit.metric) << ",r2,"
            << format_sig9(fit.group_r2.at(g)) << "\n";
        auto de = fit.delta_endpoint.find(g);
        if (de != fit.delta_endpoint.end())
            out << fit.attribute << "," << g << "," << metric_name(fit.metric)
                << ",delta_endpoint," << format_sig9(de->second) << "\n";
    }
    out << fit.attribute << ",," << metric_name(fit.metric) << ",slope_mean,"
        << format_sig9(fit.slope_mean) << "\n";
    out << fit.attribute << ",," << metric_name(fit.metric) << ",slope_std,"
        << format_sig9(fit.slope_std) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void save_report(const CorrelationReport& report, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        save_json_report(to_json(report), path);
        return;
    }
    auto out = open_out(path);
    out << "attribute,separation,slope,slope_std\n";
    for (size_t i = 0; i < report.attributes.size(); ++i)
        out << report.attributes[i] << "," << format_sig9(report.separation[i]) << ","
            << format_sig9(report.slope[i]) << "," << format_sig9(report.slope_std[i]) << "\n";
    out << "_pearson_r," << format_sig9(report.pearson_r) << ",,\n";
    out << "_p_value," << format_sig9(report.p_value) << ",,\n";
    if (!out) throw IoError("write failed: " + path);
}

void save_report(const std::vector<BoundCheck>& checks, const std::string& path,
                 ReportFormat format) {
    if (format == ReportFormat::json) {
        save_json_report(to_json(checks), path);
        return;
    }
    auto out = open_out(path);
    out << "attribute,alpha_a,alpha_b,group,gap,bound_value,satisfied,in_assumption\n";
    for (const auto& c : checks)
        for (const auto& [g, gap] : c.group_gaps)
            out << c.attribute << "," << format_sig9(c.alpha_a) << "," << format_sig9(c.alpha_b)
                << "," << g << "," << format_sig9(gap) << "," << format_sig9(c.bound_value) << ","
                << (c.satisfied.at(g) ? 1 : 0) << "," << (c.in_assumption ? 1 : 0) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace latsep
