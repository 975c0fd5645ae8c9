#include "latsep/fits.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "latsep/errors.hpp"

namespace latsep {

namespace {

struct Line {
    double slope = 0.0, intercept = 0.0, r2 = 0.0, stderr_slope = 0.0;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw InsufficientPoints("ols: no variation in x");
    Line line;
    line.slope = sxy / sxx;
    line.intercept = my - line.slope * mx;
    double ssr = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e = y[i] - (line.intercept + line.slope * x[i]);
        ssr += e * e;
    }
    line.r2 = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
    if (n > 2) line.stderr_slope = std::sqrt(ssr / (n - 2) / sxx);
    return line;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

// value of metric for (alpha, seed, group); group alpha is alpha for g=1 and 1-alpha for g=0.
struct SweepTable {
    std::vector<double> alphas;          // sorted grid
    std::vector<std::uint64_t> seeds;
    std::vector<int> groups;
    // (alpha idx, seed idx, group) -> value
    std::map<std::tuple<int, int, int>, double> value;
};

SweepTable tabulate(const SweepResult& sweep, MetricKind metric) {
    SweepTable t;
    std::set<double> alphas;
    std::set<std::uint64_t> seeds;
    std::set<int> groups;
    for (const auto& run : sweep.runs) {
        alphas.insert(run.alpha);
        seeds.insert(run.seed);
        auto it = run.per_group.find(sweep.attribute);
        if (it == run.per_group.end())
            throw MismatchedRuns("fit: sweep lacks per-group metrics for '" + sweep.attribute +
                                 "'");
        for (const auto& [g, m] : it->second) groups.insert(g);
    }
    t.alphas.assign(alphas.begin(), alphas.end());
    t.seeds.assign(seeds.begin(), seeds.end());
    t.groups.assign(groups.begin(), groups.end());
    auto aidx = [&](double a) {
        return static_cast<int>(std::lower_bound(t.alphas.begin(), t.alphas.end(), a) -
                                t.alphas.begin());
    };
    auto sidx = [&](std::uint64_t s) {
        return static_cast<int>(std::lower_bound(t.seeds.begin(), t.seeds.end(), s) -
                                t.seeds.begin());
    };
    for (const auto& run : sweep.runs)
        for (const auto& [g, m] : run.per_group.at(sweep.attribute))
            t.value[{aidx(run.alpha), sidx(run.seed), g}] = m.get(metric);
    return t;
}

}  // namespace

SensitivityFit fit_linear(const SweepResult& sweep, MetricKind metric) {
    if (sweep.runs.empty()) throw InsufficientPoints("fit_linear: empty sweep");
    SweepTable t = tabulate(sweep, metric);
    if (t.alphas.size() < 2)
        throw InsufficientPoints("fit_linear: need >= 2 distinct allocations");

    SensitivityFit fit;
    fit.attribute = sweep.attribute;
    fit.metric = metric;

    std::map<int, std::vector<double>> seed_slopes;  // group -> per-seed slope
    for (int g : t.groups) {
        for (size_t s = 0; s < t.seeds.size(); ++s) {
            std::vector<double> xs, ys;
            for (size_t a = 0; a < t.alphas.size(); ++a) {
                auto it = t.value.find({static_cast<int>(a), static_cast<int>(s), g});
                if (it == t.value.end()) continue;
                xs.push_back(g == 0 ? 1.0 - t.alphas[a] : t.alphas[a]);
                ys.push_back(it->second);
            }
            if (xs.size() < 2) continue;
            seed_slopes[g].push_back(ols(xs, ys).slope);
        }
        // seed-mean regression for intercept / r2 / standard error
        std::vector<double> xs, ys;
        for (size_t a = 0; a < t.alphas.size(); ++a) {
            double sum = 0.0;
            int cnt = 0;
            for (size_t s = 0; s < t.seeds.size(); ++s) {
                auto it = t.value.find({static_cast<int>(a), static_cast<int>(s), g});
                if (it == t.value.end()) continue;
                sum += it->second;
                ++cnt;
            }
            if (cnt == 0) continue;
            xs.push_back(g == 0 ? 1.0 - t.alphas[a] : t.alphas[a]);
            ys.push_back(sum / cnt);
        }
        Line line = ols(xs, ys);
        fit.group_intercept[g] = line.intercept;
        fit.group_r2[g] = line.r2;
        fit.group_slope_stderr[g] = line.stderr_slope;
        fit.group_slope[g] = mean_of(seed_slopes[g]);
        fit.group_slope_std[g] = sample_std(seed_slopes[g]);
    }

    // Mean over groups, per seed, then across seeds.
    std::vector<double> combined;
    const size_t nseeds = seed_slopes.begin()->second.size();
    for (size_t s = 0; s < nseeds; ++s) {
        double sum = 0.0;
        int cnt = 0;
        for (int g : t.groups)
            if (s < seed_slopes[g].size()) {
                sum += seed_slopes[g][s];
                ++cnt;
            }
        combined.push_back(sum / cnt);
    }
    fit.slope_mean = mean_of(combined);
    fit.slope_std = sample_std(combined);

    // Endpoint gaps when the grid covers them.
    const bool has0 = std::abs(t.alphas.front()) < 1e-12;
    const bool has1 = std::abs(t.alphas.back() - 1.0) < 1e-12;
    if (has0 && has1) {
        auto de = delta_endpoint(sweep, metric);
        for (const auto& [g, ms] : de) {
            fit.delta_endpoint[g] = ms.first;
            fit.delta_endpoint_std[g] = ms.second;
        }
    }
    return fit;
}

std::map<int, std::pair<double, double>> delta_endpoint(const SweepResult& sweep,
                                                        MetricKind metric) {
    SweepTable t = tabulate(sweep, metric);
    const bool has0 = !t.alphas.empty() && std::abs(t.alphas.front()) < 1e-12;
    const bool has1 = !t.alphas.empty() && std::abs(t.alphas.back() - 1.0) < 1e-12;
    if (!has0 || !has1)
        throw MissingEndpoint("delta_endpoint: grid must contain alpha = 0 and alpha = 1");
    const int i0 = 0;
    const int i1 = static_cast<int>(t.alphas.size()) - 1;

    std::map<int, std::pair<double, double>> out;
    for (int g : t.groups) {
        // alpha_g = 1 corresponds to grid alpha 1 for group 1 and alpha 0 for group 0.
        const int hi = g == 0 ? i0 : i1;
        const int lo = g == 0 ? i1 : i0;
        std::vector<double> deltas;
        for (size_t s = 0; s < t.seeds.size(); ++s) {
            auto a = t.value.find({hi, static_cast<int>(s), g});
            auto b = t.value.find({lo, static_cast<int>(s), g});
            if (a == t.value.end() || b == t.value.end()) continue;
            deltas.push_back(a->second - b->second);
        }
        if (deltas.empty()) throw MissingEndpoint("delta_endpoint: no endpoint runs for group " +
                                                  std::to_string(g));
        out[g] = {mean_of(deltas), sample_std(deltas)};
    }
    return out;
}

double PowerLawFit::eval(double n_g, double n) const {
    return sigma * sigma * std::pow(n_g, -p) + tau * tau * std::pow(n, -q) + delta;
}

namespace {

// Residuals and Jacobian in log-parameter space theta = log(sigma,p,tau,q,delta).
void powerlaw_residuals(const std::vector<std::array<double, 3>>& pts,
                        const Eigen::VectorXd& theta, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    const double sigma = std::exp(theta(0)), p = std::exp(theta(1)), tau = std::exp(theta(2)),
                 q = std::exp(theta(3)), delta = std::exp(theta(4));
    const int m = static_cast<int>(pts.size());
    r.resize(m);
    jac.resize(m, 5);
    for (int i = 0; i < m; ++i) {
        const double ng = pts[i][0], n = pts[i][1];
        const double t1 = sigma * sigma * std::pow(ng, -p);
        const double t2 = tau * tau * std::pow(n, -q);
        r(i) = t1 + t2 + delta - pts[i][2];
        jac(i, 0) = 2.0 * t1;                  // d/d log sigma
        jac(i, 1) = -t1 * std::log(ng) * p;    // d/d log p
        jac(i, 2) = 2.0 * t2;
        jac(i, 3) = -t2 * std::log(n) * q;
        jac(i, 4) = delta;
    }
}

struct LmOutcome {
    Eigen::VectorXd theta;
    double cost = 0.0;
    bool converged = false;
};

LmOutcome levenberg_marquardt(const std::vector<std::array<double, 3>>& pts,
                              Eigen::VectorXd theta) {
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    powerlaw_residuals(pts, theta, r, jac);
    double cost = 0.5 * r.squaredNorm();
    double mu = 1e-3;
    LmOutcome out;
    for (int iter = 0; iter < 300; ++iter) {
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd jtr = jac.transpose() * r;
        Eigen::MatrixXd damped = jtj;
        for (int i = 0; i < 5; ++i) damped(i, i) += mu * std::max(jtj(i, i), 1e-12);
        Eigen::VectorXd step = damped.ldlt().solve(-jtr);
        if (!step.allFinite()) break;
        Eigen::VectorXd trial = theta + step;
        for (int i = 0; i < 5; ++i) trial(i) = std::clamp(trial(i), -40.0, 40.0);
        Eigen::VectorXd rt;
        Eigen::MatrixXd jt;
        powerlaw_residuals(pts, trial, rt, jt);
        const double trial_cost = 0.5 * rt.squaredNorm();
        if (trial_cost < cost) {
            const double drop = cost - trial_cost;
            theta = trial;
            r = rt;
            jac = jt;
            cost = trial_cost;
            mu = std::max(mu * 0.3, 1e-12);
            if (drop < 1e-14 * (1.0 + cost)) {
                out.converged = true;
                break;
            }
        } else {
            mu *= 3.0;
            if (mu > 1e12) break;
        }
    }
    out.theta = theta;
    out.cost = cost;
    return out;
}

}  // namespace

PowerLawFit fit_powerlaw(const std::vector<std::array<double, 3>>& points) {
    if (points.size() < 5) throw InsufficientPoints("fit_powerlaw: need >= 5 points");
    double lo = points[0][2], hi = points[0][2];
    for (const auto& pt : points) {
        if (pt[0] > pt[1] + 1e-9)
            throw ConfigError("fit_powerlaw: n_g must not exceed n");
        if (pt[2] <= 0.0) throw ConfigError("fit_powerlaw: losses must be > 0");
        lo = std::min(lo, pt[2]);
        hi = std::max(hi, pt[2]);
    }

    PowerLawFit fit;
    if (hi - lo < 1e-12) {
        // Constant losses: pure offset, exponents unidentifiable.
        fit.sigma = fit.tau = 1e-9;
        fit.p = fit.q = 1.0;
        fit.delta = lo;
        fit.converged = true;
        fit.degenerate = true;
        fit.unstable_parameters = {"p", "q"};
        return fit;
    }

    const double delta0 = std::max(1e-4, lo * 0.5);
    LmOutcome best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int start = 0; start < 8; ++start) {
        Eigen::VectorXd theta(5);
        theta(0) = std::log(start & 1 ? 2.0 : 0.5);       // sigma
        theta(1) = std::log(start & 2 ? 1.5 : 0.5);       // p
        theta(2) = std::log(start & 4 ? 2.0 : 0.5);       // tau
        theta(3) = theta(1);                              // q starts at p
        theta(4) = std::log(delta0);
        LmOutcome out = levenberg_marquardt(points, theta);
        if (out.cost < best.cost) best = out;
    }

    fit.sigma = std::exp(best.theta(0));
    fit.p = std::exp(best.theta(1));
    fit.tau = std::exp(best.theta(2));
    fit.q = std::exp(best.theta(3));
    fit.delta = std::exp(best.theta(4));
    fit.converged = best.converged;
    fit.residual_norm = std::sqrt(2.0 * best.cost);

    // Parameter stds from the Jacobian in original parameter space.
    const int m = static_cast<int>(points.size());
    Eigen::MatrixXd jac(m, 5);
    for (int i = 0; i < m; ++i) {
        const double ng = points[i][0], n = points[i][1];
        const double a1 = std::pow(ng, -fit.p), a2 = std::pow(n, -fit.q);
        jac(i, 0) = 2.0 * fit.sigma * a1;
        jac(i, 1) = -fit.sigma * fit.sigma * a1 * std::log(ng);
        jac(i, 2) = 2.0 * fit.tau * a2;
        jac(i, 3) = -fit.tau * fit.tau * a2 * std::log(n);
        jac(i, 4) = 1.0;
    }
    const double dof = std::max(1, m - 5);
    const double s2 = 2.0 * best.cost / dof;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    Eigen::VectorXd inv2(5);
    const double cutoff = sv(0) * 1e-14;
    for (int i = 0; i < 5; ++i)
        inv2(i) = sv(i) > cutoff ? 1.0 / (sv(i) * sv(i)) : 1.0 / (cutoff * cutoff);
    Eigen::MatrixXd cov = svd.matrixV() * inv2.asDiagonal() * svd.matrixV().transpose() * s2;
    double* stds[5] = {&fit.sigma_std, &fit.p_std, &fit.tau_std, &fit.q_std, &fit.delta_std};
    double vals[5] = {fit.sigma, fit.p, fit.tau, fit.q, fit.delta};
    const char* names[5] = {"sigma", "p", "tau", "q", "delta"};
    for (int i = 0; i < 5; ++i) {
        *stds[i] = std::sqrt(std::max(0.0, cov(i, i)));
        if (*stds[i] > std::abs(vals[i])) fit.unstable_parameters.push_back(names[i]);
    }
    return fit;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw InsufficientPoints("pearson: need >= 3 matched points");
    const double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw DegenerateVariance("pearson: zero variance in one of the variables");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

// Regularized incomplete beta via continued fraction (Lentz's algorithm).
double betacf(double a, double b, double x) {
    const double eps = 1e-14, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          b * std::log(1.0 - x) + a * std::log(x)) *
                     betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double students_t_pvalue(double t, int dof) {
    if (dof < 1) return 1.0;
    const double x = dof / (dof + t * t);
    return incbeta(0.5 * dof, 0.5, x);
}

CorrelationReport correlate(const std::vector<SeparationReport>& separations,
                            const std::vector<SensitivityFit>& fits) {
    if (separations.size() < 3 || fits.size() < 3)
        throw MismatchedAttributes("correlate: need >= 3 matched (separation, fit) pairs");
    std::map<std::string, const SensitivityFit*> by_attr;
    for (const auto& f : fits) by_attr[f.attribute] = &f;
    if (by_attr.size() != fits.size())
        throw MismatchedAttributes("correlate: duplicate attributes in fits");

    CorrelationReport report;
    std::set<std::string> seen;
    for (const auto& sep : separations) {
        auto it = by_attr.find(sep.attribute);
        if (it == by_attr.end())
            throw MismatchedAttributes("correlate: no fit for attribute '" + sep.attribute + "'");
        if (!seen.insert(sep.attribute).second)
            throw MismatchedAttributes("correlate: duplicate attribute '" + sep.attribute + "'");
        report.attributes.push_back(sep.attribute);
        report.separation.push_back(sep.epsilon_tv);
        report.slope.push_back(it->second->slope_mean);
        report.slope_std.push_back(it->second->slope_std);
    }
    if (seen.size() != by_attr.size())
        throw MismatchedAttributes("correlate: fits contain attributes without separations");

    report.pearson_r = pearson(report.separation, report.slope);
    const int dof = static_cast<int>(report.separation.size()) - 2;
    const double r = report.pearson_r;
    const double t = r * std::sqrt(dof / std::max(1e-15, 1.0 - r * r));
    report.p_value = students_t_pvalue(t, dof);
    if (!fits.empty()) report.metric_pair = "tv_vs_" + metric_name(fits.front().metric) + "_slope";
    return report;
}

}  // namespace latsep
