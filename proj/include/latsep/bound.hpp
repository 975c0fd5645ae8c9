#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "latsep/separation.hpp"
#include "latsep/types.hpp"

namespace latsep {

struct SweepResult;  // harness.hpp

/// Small discrete joint over (Z, Y, A) with |Y| = 2, used to verify the
/// mixture identity and the representation-closeness bound by enumeration.
struct DiscreteJoint {
    int nz = 2;
    int na = 2;
    std::vector<double> table;  // p(z, y, a), index z*(2*na) + y*na + a

    double p(int z, int y, int a) const { return table[z * (2 * na) + y * na + a]; }
    double& p(int z, int y, int a) { return table[z * (2 * na) + y * na + a]; }

    void check() const;  // throws on an invalid table
    static DiscreteJoint random(std::mt19937_64& rng, int nz, int na = 2);
};

struct Lemma1Result {
    double epsilon = 0.0;            // max_y TV(mu1(.|y), mu0(.|y))
    double identity_residual = 0.0;  // | TV(mu1, mu) - (1-pi_y) TV(mu1, mu0) | maxed over y
    double max_deviation = 0.0;      // max_{y,a,z} |P(z|y,a) - P(z|y)|
    bool bound_holds = false;        // max_deviation <= epsilon
};

/// Exact enumeration of both sides of the mixture identity and the bound.
Lemma1Result lemma1_check(const DiscreteJoint& joint);

/// 4*eps + overall accuracy gap.
double theorem_bound(double epsilon, double overall_gap);

/// 2*eps' + 2*eps'' + gap (distinct per-dataset TV bounds).
double theorem_bound_asym(double epsilon_a, double epsilon_b, double overall_gap);

struct BoundCheck {
    std::string attribute;
    double alpha_a = 0.0, alpha_b = 0.0;   // the allocation pair compared
    double epsilon = 0.0;
    double overall_gap = 0.0;
    double bound_value = 0.0;              // 4*eps + overall_gap
    double slack = 0.0;
    std::map<int, double> group_gaps;      // group -> |Acc'(a) - Acc''(a)|
    std::map<int, bool> satisfied;         // observed <= bound + slack
    bool in_assumption = true;             // realized P(Y) matched between the pair
};

/// One check per allocation pair of the sweep (seed-averaged accuracies).
/// Pairs whose realized P(Y) differ beyond rounding are flagged out-of-assumption.
std::vector<BoundCheck> check_sweep_against_bound(const SweepResult& sweep,
                                                  const SeparationReport& separation,
                                                  double slack);

}  // namespace latsep
