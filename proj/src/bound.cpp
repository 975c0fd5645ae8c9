#include "latsep/bound.hpp"

#include <cmath>

#include "latsep/errors.hpp"
#include "latsep/harness.hpp"

namespace latsep {

void DiscreteJoint::check() const {
    if (nz < 1 || na < 2) throw ConfigError("DiscreteJoint: nz >= 1 and na >= 2 required");
    if (static_cast<int>(table.size()) != nz * 2 * na)
        throw ConfigError("DiscreteJoint: table size mismatch");
    double sum = 0.0;
    for (double v : table) {
        if (v < 0.0) throw ConfigError("DiscreteJoint: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError("DiscreteJoint: table does not sum to 1");
    for (int y = 0; y < 2; ++y)
        for (int a = 0; a < na; ++a) {
            double cell = 0.0;
            for (int z = 0; z < nz; ++z) cell += p(z, y, a);
            if (cell <= 0.0)
                throw DegenerateConditional("DiscreteJoint: zero-probability cell (y=" +
                                            std::to_string(y) + ", a=" + std::to_string(a) + ")");
        }
}

DiscreteJoint DiscreteJoint::random(std::mt19937_64& rng, int nz, int na) {
    DiscreteJoint joint;
    joint.nz = nz;
    joint.na = na;
    joint.table.resize(nz * 2 * na);
    std::uniform_real_distribution<double> unif(0.05, 1.0);  // bounded away from 0
    double sum = 0.0;
    for (auto& v : joint.table) {
        v = unif(rng);
        sum += v;
    }
    for (auto& v : joint.table) v /= sum;
    // Renormalize exactly so check() passes at 1e-12.
    double s2 = 0.0;
    for (size_t i = 0; i + 1 < joint.table.size(); ++i) s2 += joint.table[i];
    joint.table.back() = 1.0 - s2;
    return joint;
}

Lemma1Result lemma1_check(const DiscreteJoint& joint) {
    joint.check();
    if (joint.na != 2)
        throw ConfigError("lemma1_check: binary attribute required");

    Lemma1Result result;
    result.identity_residual = 0.0;
    for (int y = 0; y < 2; ++y) {
        double py = 0.0, py_a1 = 0.0;
        for (int z = 0; z < joint.nz; ++z)
            for (int a = 0; a < 2; ++a) {
                py += joint.p(z, y, a);
                if (a == 1) py_a1 += joint.p(z, y, a);
            }
        if (py <= 0.0) throw DegenerateConditional("lemma1_check: P(Y=y) = 0");
        const double pi_y = py_a1 / py;  // P(A=1 | Y=y)
        if (pi_y <= 0.0 || pi_y >= 1.0)
            throw DegenerateConditional("lemma1_check: pi_y in {0,1} (empty group)");

        double pa[2] = {0.0, 0.0};
        for (int z = 0; z < joint.nz; ++z)
            for (int a = 0; a < 2; ++a) pa[a] += joint.p(z, y, a);

        double tv01 = 0.0, tv1mix = 0.0;
        for (int z = 0; z < joint.nz; ++z) {
            const double mu0 = joint.p(z, y, 0) / pa[0];
            const double mu1 = joint.p(z, y, 1) / pa[1];
            const double mu = (joint.p(z, y, 0) + joint.p(z, y, 1)) / py;
            tv01 += std::abs(mu1 - mu0);
            tv1mix += std::abs(mu1 - mu);
            result.max_deviation = std::max({result.max_deviation, std::abs(mu1 - mu),
                                             std::abs(mu0 - mu)});
        }
        tv01 *= 0.5;
        tv1mix *= 0.5;
        result.epsilon = std::max(result.epsilon, tv01);
        result.identity_residual =
            std::max(result.identity_residual, std::abs(tv1mix - (1.0 - pi_y) * tv01));
    }
    result.bound_holds = result.max_deviation <= result.epsilon + 1e-14;
    return result;
}

double theorem_bound(double epsilon, double overall_gap) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw RangeError("theorem_bound: epsilon outside [0,1]");
    if (overall_gap < 0.0 || overall_gap > 1.0)
        throw RangeError("theorem_bound: overall_gap outside [0,1]");
    return 4.0 * epsilon + overall_gap;
}

double theorem_bound_asym(double epsilon_a, double epsilon_b, double overall_gap) {
    if (epsilon_a < 0.0 || epsilon_a > 1.0 || epsilon_b < 0.0 || epsilon_b > 1.0)
        throw RangeError("theorem_bound_asym: epsilon outside [0,1]");
    if (overall_gap < 0.0 || overall_gap > 1.0)
        throw RangeError("theorem_bound_asym: overall_gap outside [0,1]");
    return 2.0 * epsilon_a + 2.0 * epsilon_b + overall_gap;
}

std::vector<BoundCheck> check_sweep_against_bound(const SweepResult& sweep,
                                                  const SeparationReport& separation,
                                                  double slack) {
    if (sweep.attribute != separation.attribute)
        throw MismatchedRuns("bound check: sweep attribute '" + sweep.attribute +
                             "' != separation attribute '" + separation.attribute + "'");
    if (sweep.runs.empty()) throw InsufficientPoints("bound check: empty sweep");

    // Seed-averaged accuracies per allocation.
    struct PerAlpha {
        double overall = 0.0;
        std::map<int, double> per_group;
        double py = 0.0;
        int count = 0;
    };
    std::map<double, PerAlpha> by_alpha;
    for (const auto& run : sweep.runs) {
        auto git = run.per_group.find(sweep.attribute);
        if (git == run.per_group.end())
            throw MismatchedRuns("bound check: sweep run lacks per-group metrics for '" +
                                 sweep.attribute + "'");
        auto& acc = by_alpha[run.alpha];
        acc.overall += run.overall.accuracy;
        acc.py += run.realized_py;
        for (const auto& [g, m] : git->second) acc.per_group[g] += m.accuracy;
        acc.count += 1;
    }
    for (auto& [alpha, acc] : by_alpha) {
        acc.overall /= acc.count;
        acc.py /= acc.count;
        for (auto& [g, v] : acc.per_group) v /= acc.count;
    }

    const double eps = separation.epsilon_tv;
    const double py_tol = 1.0 / sweep.spec.budget + 1e-9;
    std::vector<BoundCheck> checks;
    for (auto ia = by_alpha.begin(); ia != by_alpha.end(); ++ia)
        for (auto ib = std::next(ia); ib != by_alpha.end(); ++ib) {
            BoundCheck c;
            c.attribute = sweep.attribute;
            c.alpha_a = ia->first;
            c.alpha_b = ib->first;
            c.epsilon = eps;
            c.overall_gap = std::abs(ia->second.overall - ib->second.overall);
            c.bound_value = theorem_bound(std::clamp(eps, 0.0, 1.0), c.overall_gap);
            c.slack = slack;
            c.in_assumption = std::abs(ia->second.py - ib->second.py) <= py_tol;
            for (const auto& [g, acc_a] : ia->second.per_group) {
                const double gap = std::abs(acc_a - ib->second.per_group.at(g));
                c.group_gaps[g] = gap;
                c.satisfied[g] = gap <= c.bound_value + slack;
            }
            checks.push_back(std::move(c));
        }
    return checks;
}

}  // namespace latsep
