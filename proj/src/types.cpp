#include "latsep/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include "latsep/errors.hpp"

namespace latsep {

std::string metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::loss: return "loss";
        case MetricKind::balanced_accuracy: return "balanced_accuracy";
        case MetricKind::auc: return "auc";
        case MetricKind::accuracy: return "accuracy";
    }
    return "unknown";
}

MetricKind metric_from_name(const std::string& name) {
    if (name == "loss") return MetricKind::loss;
    if (name == "balanced_accuracy") return MetricKind::balanced_accuracy;
    if (name == "auc") return MetricKind::auc;
    if (name == "accuracy") return MetricKind::accuracy;
    throw ConfigError("unknown metric kind: " + name);
}

std::vector<int> attribute_groups(const EmbeddingSet& dataset, const std::string& attribute) {
    auto it = dataset.attributes.find(attribute);
    if (it == dataset.attributes.end())
        throw UnknownAttribute("unknown attribute: " + attribute);
    std::set<int> seen(it->second.begin(), it->second.end());
    return {seen.begin(), seen.end()};
}

SubgroupSummary summarize(const EmbeddingSet& dataset, const std::string& attribute) {
    auto it = dataset.attributes.find(attribute);
    if (it == dataset.attributes.end())
        throw UnknownAttribute("unknown attribute: " + attribute);
    const auto& a = it->second;
    const int n = dataset.n();

    SubgroupSummary s;
    s.attribute = attribute;
    s.n = n;
    s.groups = attribute_groups(dataset, attribute);
    for (int i = 0; i < n; ++i)
        s.counts[{dataset.y[i], a[i]}] += 1;
    for (int g : s.groups) {
        int total = 0, pos = 0;
        for (int y : {0, 1}) {
            auto c = s.counts.find({y, g});
            int cnt = (c == s.counts.end()) ? 0 : c->second;
            total += cnt;
            if (y == 1) pos = cnt;
        }
        if (total == 0)
            throw EmptySubgroup(attribute + ": group " + std::to_string(g) + " has 0 rows");
        s.gamma[g] = static_cast<double>(total) / n;
        s.class_given_group[g] = static_cast<double>(pos) / total;
    }
    return s;
}

std::vector<std::string> validate(const EmbeddingSet& dataset) {
    std::vector<std::string> out;
    const int n = dataset.n();
    const int d = dataset.dim();
    if (n < 1) out.push_back("dataset has no rows (N >= 1 required)");
    if (d < 1) out.push_back("dataset has no columns (D >= 1 required)");
    if (static_cast<int>(dataset.ids.size()) != n)
        out.push_back("ids length " + std::to_string(dataset.ids.size()) +
                      " != N=" + std::to_string(n));
    if (static_cast<int>(dataset.y.size()) != n)
        out.push_back("label length " + std::to_string(dataset.y.size()) +
                      " != N=" + std::to_string(n));

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            if (!std::isfinite(dataset.z(i, j)))
                out.push_back("non-finite embedding value at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");

    for (size_t i = 0; i < dataset.y.size(); ++i)
        if (dataset.y[i] != 0 && dataset.y[i] != 1)
            out.push_back("label at row " + std::to_string(i) + " is " +
                          std::to_string(dataset.y[i]) + " (binary labels only)");

    for (const auto& [name, col] : dataset.attributes) {
        if (static_cast<int>(col.size()) != n) {
            out.push_back("attribute '" + name + "' length " + std::to_string(col.size()) +
                          " != N=" + std::to_string(n));
            continue;
        }
        std::set<int> distinct(col.begin(), col.end());
        if (distinct.size() < 2)
            out.push_back("attribute '" + name + "' has one group (>= 2 distinct values required)");
        for (int v : distinct)
            if (v < 0 || v > 255)
                out.push_back("attribute '" + name + "' has out-of-range code " + std::to_string(v));
    }
    return out;
}

EmbeddingSet take_rows(const EmbeddingSet& dataset, const std::vector<int>& rows) {
    EmbeddingSet out;
    out.encoder_tag = dataset.encoder_tag;
    out.value_names = dataset.value_names;
    out.z.resize(static_cast<int>(rows.size()), dataset.dim());
    out.ids.reserve(rows.size());
    out.y.reserve(rows.size());
    for (auto& [name, col] : dataset.attributes)
        out.attributes[name].reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        out.z.row(static_cast<int>(i)) = dataset.z.row(r);
        out.ids.push_back(dataset.ids[r]);
        out.y.push_back(dataset.y[r]);
        for (const auto& [name, col] : dataset.attributes)
            out.attributes[name].push_back(col[r]);
    }
    return out;
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

std::uint64_t dataset_hash(const EmbeddingSet& dataset) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const int n = dataset.n(), d = dataset.dim();
    fnv_bytes(h, &n, sizeof n);
    fnv_bytes(h, &d, sizeof d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const double v = dataset.z(i, j);
            fnv_bytes(h, &v, sizeof v);
        }
    fnv_bytes(h, dataset.y.data(), dataset.y.size() * sizeof(int));
    for (const auto& [name, col] : dataset.attributes) {
        fnv_bytes(h, name.data(), name.size());
        fnv_bytes(h, col.data(), col.size() * sizeof(int));
    }
    return h;
}

}  // namespace latsep
