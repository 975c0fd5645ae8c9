#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latsep/types.hpp"

namespace latsep {

/// Configuration for the controllable synthetic generator. Class structure
/// lives along a unit direction u; an attribute can shift group means along an
/// orthogonal direction v (offset s) and/or rotate the class direction per
/// group by +-phi/2 in the (u, v') plane (entanglement).
struct SynthConfig {
    int n = 4000;
    int d = 8;
    double attribute_offset = 0.0;      // s >= 0
    double entanglement_angle = 0.0;    // phi in [0, pi/2]
    double class_balance = 0.5;         // P(Y=1)
    double group_prevalence = 0.5;      // P(A=1)
    double noise_std = 0.5;
    std::uint64_t seed = 0;
    std::string attribute_name = "group";
};

struct BatteryEntry {
    std::string name;
    double offset = 0.0;  // s
    double angle = 0.0;   // phi
};

/// One attribute plus an always-appended "random" attribute.
EmbeddingSet generate(const SynthConfig& config);

/// Single Z with one attribute column per entry (independent seeds) plus a
/// "random" column; attribute effects occupy disjoint orthogonal directions.
EmbeddingSet battery(const SynthConfig& base, const std::vector<BatteryEntry>& entries);

/// Named presets: invariant, entangled, graded-battery, mnist-like.
/// `levels` applies to graded-battery only.
EmbeddingSet make_preset(const std::string& name, int n, std::uint64_t seed, int levels = 8);

std::vector<std::string> preset_names();

}  // namespace latsep
