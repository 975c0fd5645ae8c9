#include "latsep/synthetic.hpp"

#include <cmath>
#include <random>
#include <set>

#include "latsep/errors.hpp"

namespace latsep {

namespace {

void check_config(const SynthConfig& c) {
    if (c.n < 4) throw ConfigError("synthetic: n >= 4 required");
    if (c.attribute_offset < 0) throw ConfigError("synthetic: attribute_offset must be >= 0");
    if (c.entanglement_angle > 0 && c.d < 3)
        throw ConfigError("synthetic: d >= 3 required when entanglement_angle > 0");
    if (c.d < 2) throw ConfigError("synthetic: d >= 2 required");
    if (c.class_balance <= 0 || c.class_balance >= 1)
        throw ConfigError("synthetic: class_balance must be in (0,1)");
    if (c.group_prevalence <= 0 || c.group_prevalence >= 1)
        throw ConfigError("synthetic: group_prevalence must be in (0,1)");
    if (c.noise_std <= 0) throw ConfigError("synthetic: noise_std must be > 0");
}

void append_random_attribute(EmbeddingSet& set, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::bernoulli_distribution coin(0.5);
    std::vector<int> col(set.n());
    for (auto& v : col) v = coin(rng) ? 1 : 0;
    set.attributes["random"] = std::move(col);
}

// Seed-qualified ids keep independently generated sets disjoint, so one can
// serve as the evaluation split of another.
void fill_ids(EmbeddingSet& set, std::uint64_t seed) {
    set.ids.resize(set.n());
    for (int i = 0; i < set.n(); ++i)
        set.ids[i] = "s" + std::to_string(seed) + "-" + std::to_string(i);
}

}  // namespace

EmbeddingSet generate(const SynthConfig& c) {
    check_config(c);
    std::mt19937_64 rng(c.seed);
    std::bernoulli_distribution draw_y(c.class_balance);
    std::bernoulli_distribution draw_a(c.group_prevalence);
    std::normal_distribution<double> noise(0.0, c.noise_std);

    // u = e0, v = e1, v' = e2. u_a is u rotated by phi*(2a-1)/2 in (u, v').
    EmbeddingSet set;
    set.z.setZero(c.n, c.d);
    set.y.resize(c.n);
    set.encoder_tag = "synthetic";
    std::vector<int> acol(c.n);
    for (int i = 0; i < c.n; ++i) {
        const int y = draw_y(rng) ? 1 : 0;
        const int a = draw_a(rng) ? 1 : 0;
        set.y[i] = y;
        acol[i] = a;
        const double cls = (y == 1) ? 1.0 : -1.0;
        const double grp = (a == 1) ? 1.0 : -1.0;
        const double phi_a = c.entanglement_angle * grp / 2.0;
        set.z(i, 0) = cls * std::cos(phi_a);
        set.z(i, 1) = c.attribute_offset * grp;
        if (c.d >= 3) set.z(i, 2) = cls * std::sin(phi_a);
        for (int j = 0; j < c.d; ++j) set.z(i, j) += noise(rng);
    }
    set.attributes[c.attribute_name] = std::move(acol);
    append_random_attribute(set, c.seed);
    fill_ids(set, c.seed);
    return set;
}

EmbeddingSet battery(const SynthConfig& base, const std::vector<BatteryEntry>& entries) {
    check_config(base);
    if (entries.empty()) throw ConfigError("battery: at least one entry required");
    {
        std::set<std::string> names;
        for (const auto& e : entries)
            if (!names.insert(e.name).second)
                throw ConfigError("battery: duplicate attribute name '" + e.name + "'");
    }
    const int L = static_cast<int>(entries.size());
    const int d = std::max(base.d, 1 + 2 * L);

    std::mt19937_64 rng(base.seed);
    std::bernoulli_distribution draw_y(base.class_balance);
    std::normal_distribution<double> noise(0.0, base.noise_std);

    EmbeddingSet set;
    set.z.setZero(base.n, d);
    set.y.resize(base.n);
    set.encoder_tag = "synthetic-battery";
    for (int i = 0; i < base.n; ++i) set.y[i] = draw_y(rng) ? 1 : 0;

    // Attribute l owns axes 1+2l (mean offset) and 2+2l (class-direction
    // interaction); axis 0 carries the shared class signal.
    for (int l = 0; l < L; ++l) {
        std::mt19937_64 arng(base.seed + 1001 * (l + 1));
        std::bernoulli_distribution draw_a(base.group_prevalence);
        std::vector<int> col(base.n);
        const double s = entries[l].offset;
        const double tilt = std::sin(entries[l].angle / 2.0);
        for (int i = 0; i < base.n; ++i) {
            const int a = draw_a(arng) ? 1 : 0;
            col[i] = a;
            const double grp = (a == 1) ? 1.0 : -1.0;
            const double cls = (set.y[i] == 1) ? 1.0 : -1.0;
            set.z(i, 1 + 2 * l) += s * grp;
            set.z(i, 2 + 2 * l) += tilt * cls * grp;
        }
        set.attributes[entries[l].name] = std::move(col);
    }
    for (int i = 0; i < base.n; ++i) {
        set.z(i, 0) += (set.y[i] == 1) ? 1.0 : -1.0;
        for (int j = 0; j < d; ++j) set.z(i, j) += noise(rng);
    }
    append_random_attribute(set, base.seed);
    fill_ids(set, base.seed);
    return set;
}

std::vector<std::string> preset_names() {
    return {"invariant", "entangled", "graded-battery", "mnist-like"};
}

EmbeddingSet make_preset(const std::string& name, int n, std::uint64_t seed, int levels) {
    SynthConfig c;
    c.n = n;
    c.seed = seed;
    c.d = 6;
    c.noise_std = 0.5;
    if (name == "invariant") {
        c.attribute_name = "group";
        return generate(c);
    }
    if (name == "entangled") {
        c.attribute_name = "group";
        c.entanglement_angle = 1.1;
        return generate(c);
    }
    if (name == "mnist-like") {
        std::vector<BatteryEntry> entries = {
            {"colour", 0.10, 0.0},
            {"digit", 0.0, 1.1},
        };
        return battery(c, entries);
    }
    if (name == "graded-battery") {
        if (levels < 3) throw ConfigError("graded-battery: levels >= 3 required");
        std::vector<BatteryEntry> entries;
        for (int l = 0; l < levels; ++l) {
            const double t = static_cast<double>(l) / (levels - 1);
            entries.push_back({"g" + std::to_string(l), 1.5 * t, 1.2 * t});
        }
        return battery(c, entries);
    }
    throw ConfigError("unknown preset: " + name);
}

}  // namespace latsep
