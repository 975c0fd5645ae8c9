#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "latsep/harness.hpp"
#include "latsep/separation.hpp"

namespace latsep {

/// Linear sensitivity summary. Each group is regressed against its own
/// allocation (group 0 against 1 - alpha_1), so the mean over groups is
/// well defined.
struct SensitivityFit {
    std::string attribute;
    MetricKind metric = MetricKind::loss;
    std::map<int, double> group_slope;         // seed-mean slope per group
    std::map<int, double> group_slope_std;     // std of seed-wise slopes
    std::map<int, double> group_slope_stderr;  // regression standard error on seed-mean points
    std::map<int, double> group_intercept;
    std::map<int, double> group_r2;
    std::map<int, double> delta_endpoint;      // metric(alpha_g=1) - metric(alpha_g=0)
    std::map<int, double> delta_endpoint_std;
    double slope_mean = 0.0;                   // mean of the per-group slopes
    double slope_std = 0.0;                    // std across seeds of the group-mean slope
};

SensitivityFit fit_linear(const SweepResult& sweep, MetricKind metric);

/// Seed-averaged endpoint gap per group; throws MissingEndpoint if the grid
/// lacks alpha = 0 or alpha = 1.
std::map<int, std::pair<double, double>> delta_endpoint(const SweepResult& sweep,
                                                        MetricKind metric);

struct PowerLawFit {
    double sigma = 0.0, p = 0.0, tau = 0.0, q = 0.0, delta = 0.0;
    double sigma_std = 0.0, p_std = 0.0, tau_std = 0.0, q_std = 0.0, delta_std = 0.0;
    bool converged = false;
    double residual_norm = 0.0;
    std::vector<std::string> unstable_parameters;  // std exceeds the estimate
    bool degenerate = false;                       // constant losses; exponents unidentifiable

    double eval(double n_g, double n) const;
};

/// Constrained nonlinear least squares for
/// loss = sigma^2 * n_g^{-p} + tau^2 * n^{-q} + delta  (all positive, delta >= 0),
/// Levenberg-Marquardt in log-parameter space from 8 deterministic starts.
/// Points are (n_g, n, loss).
PowerLawFit fit_powerlaw(const std::vector<std::array<double, 3>>& points);

struct CorrelationReport {
    std::vector<std::string> attributes;
    std::vector<double> separation;       // x
    std::vector<double> slope;            // y
    std::vector<double> slope_std;        // error bars
    double pearson_r = 0.0;
    double p_value = 1.0;
    std::string metric_pair;              // e.g. "tv_vs_loss_slope"
};

CorrelationReport correlate(const std::vector<SeparationReport>& separations,
                            const std::vector<SensitivityFit>& fits);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double students_t_pvalue(double t, int dof);  // two-sided

}  // namespace latsep
