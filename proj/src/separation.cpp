#include "latsep/separation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "latsep/errors.hpp"

namespace latsep {

namespace {

// Row indices per (y, group). y = -1 means "all rows" (unconditioned).
using CellIndex = std::map<std::pair<int, int>, std::vector<int>>;

struct Partition {
    std::vector<int> classes;        // {-1} or {0,1}
    std::vector<int> groups;
    CellIndex cells;
    std::map<int, double> class_weight;
};

Partition partition_cells(const EmbeddingSet& dataset, const std::string& attribute,
                          bool condition_on_y, bool equal_class_weights) {
    auto it = dataset.attributes.find(attribute);
    if (it == dataset.attributes.end())
        throw UnknownAttribute("unknown attribute: " + attribute);
    const auto& a = it->second;
    const int n = dataset.n();

    Partition part;
    part.groups = attribute_groups(dataset, attribute);
    if (condition_on_y) {
        // only the classes actually present; a one-class set conditions trivially
        std::set<int> seen(dataset.y.begin(), dataset.y.end());
        part.classes.assign(seen.begin(), seen.end());
    } else {
        part.classes = {-1};
    }
    for (int i = 0; i < n; ++i) {
        const int y = condition_on_y ? dataset.y[i] : -1;
        part.cells[{y, a[i]}].push_back(i);
    }
    for (int y : part.classes) {
        int ny = 0;
        for (int g : part.groups) {
            auto c = part.cells.find({y, g});
            if (c == part.cells.end() || c->second.empty())
                throw EmptySubgroup(attribute + ": empty cell (y=" + std::to_string(y) +
                                    ", a=" + std::to_string(g) + ")");
            ny += static_cast<int>(c->second.size());
        }
        part.class_weight[y] =
            equal_class_weights ? 1.0 / part.classes.size() : static_cast<double>(ny) / n;
    }
    return part;
}

std::vector<double> column_values(const EmbeddingSet& dataset, const std::vector<int>& rows,
                                  int dim) {
    std::vector<double> v(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) v[i] = dataset.z(rows[i], dim);
    return v;
}

double dims_mean(const std::vector<double>& per_dim, const std::vector<double>& weights) {
    if (weights.empty()) {
        double s = 0.0;
        for (double v : per_dim) s += v;
        return s / per_dim.size();
    }
    if (weights.size() != per_dim.size())
        throw DimensionMismatch("dim_weights length does not match dimensionality");
    double s = 0.0, w = 0.0;
    for (size_t i = 0; i < per_dim.size(); ++i) {
        s += weights[i] * per_dim[i];
        w += weights[i];
    }
    if (w <= 0) throw ConfigError("dim_weights must have positive sum");
    return s / w;
}

// Mean-over-dimensions histogram TV between two row sets.
double pair_tv(const EmbeddingSet& dataset, const std::vector<int>& rows_a,
               const std::vector<int>& rows_b, int bins, const std::vector<double>& weights) {
    std::vector<double> per_dim(dataset.dim());
    for (int j = 0; j < dataset.dim(); ++j)
        per_dim[j] = tv_hist_1d(column_values(dataset, rows_a, j),
                                column_values(dataset, rows_b, j), bins);
    return dims_mean(per_dim, weights);
}

void mean_cov(const EmbeddingSet& dataset, const std::vector<int>& rows, Vector& mean,
              Matrix& cov) {
    const int d = dataset.dim();
    const int m = static_cast<int>(rows.size());
    if (m < 2) throw EmptySubgroup("covariance needs >= 2 samples per cell");
    Matrix sub(m, d);
    for (int i = 0; i < m; ++i) sub.row(i) = dataset.z.row(rows[i]);
    mean = sub.colwise().mean();
    Matrix centered = sub.rowwise() - mean.transpose();
    cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
}

Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
    if (solver.info() != Eigen::Success)
        throw NumericalError("matrix square root: eigendecomposition failed");
    Vector evals = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * evals.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

double tv_hist_1d(const std::vector<double>& a, const std::vector<double>& b, int bins) {
    if (bins < 2) throw ConfigError("tv_hist_1d: bins >= 2 required");
    if (a.empty() || b.empty()) throw EmptySubgroup("tv_hist_1d: empty sample");
    double lo = a[0], hi = a[0];
    for (double v : a) { lo = std::min(lo, v); hi = std::max(hi, v); }
    for (double v : b) { lo = std::min(lo, v); hi = std::max(hi, v); }
    if (hi <= lo) return 0.0;  // all pooled values identical
    std::vector<double> p(bins, 0.0), q(bins, 0.0);
    const double scale = bins / (hi - lo);
    auto accumulate = [&](const std::vector<double>& vals, std::vector<double>& h) {
        const double mass = 1.0 / vals.size();
        for (double v : vals) {
            int idx = static_cast<int>((v - lo) * scale);
            idx = std::clamp(idx, 0, bins - 1);
            h[idx] += mass;
        }
    };
    accumulate(a, p);
    accumulate(b, q);
    double tv = 0.0;
    for (int i = 0; i < bins; ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptySubgroup("wasserstein_1d: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // Integrate |F_a - F_b| over the merged support.
    double dist = 0.0;
    size_t i = 0, j = 0;
    double prev = std::min(a[0], b[0]);
    const double wa = 1.0 / a.size(), wb = 1.0 / b.size();
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        dist += std::abs(i * wa - j * wb) * (x - prev);
        prev = x;
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
    }
    return dist;
}

double frechet_gaussian(const Vector& mean0, const Matrix& cov0, const Vector& mean1,
                        const Matrix& cov1) {
    Matrix s0 = psd_sqrt(cov0);
    Matrix inner = s0 * cov1 * s0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (inner + inner.transpose()));
    if (solver.info() != Eigen::Success)
        throw NumericalError("frechet_gaussian: eigendecomposition failed");
    double cross = 0.0;
    for (int i = 0; i < solver.eigenvalues().size(); ++i)
        cross += std::sqrt(std::max(0.0, solver.eigenvalues()(i)));
    return (mean0 - mean1).squaredNorm() + cov0.trace() + cov1.trace() - 2.0 * cross;
}

SeparationReport tv_distance(const EmbeddingSet& dataset, const std::string& attribute, int bins,
                             bool condition_on_y) {
    SeparationOptions opts;
    opts.bins = bins;
    opts.condition_on_y = condition_on_y;
    auto part = partition_cells(dataset, attribute, condition_on_y, false);
    if (part.groups.size() != 2)
        throw ConfigError("tv_distance: attribute '" + attribute +
                          "' is not binary (use tv_multigroup)");

    SeparationReport report;
    report.attribute = attribute;
    report.bins = bins;
    report.k = dataset.dim();
    double tv = 0.0;
    for (int y : part.classes) {
        const auto& rows0 = part.cells.at({y, part.groups[0]});
        const auto& rows1 = part.cells.at({y, part.groups[1]});
        for (int g : part.groups) {
            const auto& rows = part.cells.at({y, g});
            report.n_per_cell["y" + std::to_string(y) + "_a" + std::to_string(g)] =
                static_cast<int>(rows.size());
            if (static_cast<int>(rows.size()) < bins)
                report.warnings.push_back("cell (y=" + std::to_string(y) + ", a=" +
                                          std::to_string(g) + ") has " +
                                          std::to_string(rows.size()) + " < bins=" +
                                          std::to_string(bins) + " samples; TV may be inflated");
        }
        const double tvy = pair_tv(dataset, rows0, rows1, bins, opts.dim_weights);
        report.per_class_tv[y] = tvy;
        tv += part.class_weight.at(y) * tvy;
    }
    report.epsilon_tv = tv;
    return report;
}

double wasserstein_distance(const EmbeddingSet& dataset, const std::string& attribute,
                            bool condition_on_y) {
    auto part = partition_cells(dataset, attribute, condition_on_y, false);
    if (part.groups.size() != 2)
        throw ConfigError("wasserstein_distance: attribute '" + attribute + "' is not binary");
    double out = 0.0;
    for (int y : part.classes) {
        const auto& rows0 = part.cells.at({y, part.groups[0]});
        const auto& rows1 = part.cells.at({y, part.groups[1]});
        std::vector<double> per_dim(dataset.dim());
        for (int j = 0; j < dataset.dim(); ++j)
            per_dim[j] = wasserstein_1d(column_values(dataset, rows0, j),
                                        column_values(dataset, rows1, j));
        out += part.class_weight.at(y) * dims_mean(per_dim, {});
    }
    return out;
}

double frechet_distance(const EmbeddingSet& dataset, const std::string& attribute,
                        bool condition_on_y) {
    auto part = partition_cells(dataset, attribute, condition_on_y, false);
    if (part.groups.size() != 2)
        throw ConfigError("frechet_distance: attribute '" + attribute + "' is not binary");
    double out = 0.0;
    for (int y : part.classes) {
        Vector m0, m1;
        Matrix c0, c1;
        mean_cov(dataset, part.cells.at({y, part.groups[0]}), m0, c0);
        mean_cov(dataset, part.cells.at({y, part.groups[1]}), m1, c1);
        out += part.class_weight.at(y) * frechet_gaussian(m0, c0, m1, c1);
    }
    return out;
}

double tv_multigroup(const EmbeddingSet& dataset, const std::string& attribute, int bins) {
    auto part = partition_cells(dataset, attribute, true, false);
    if (part.groups.size() < 2)
        throw ConfigError("tv_multigroup: attribute '" + attribute + "' needs >= 2 groups");
    double out = 0.0;
    for (int y : part.classes) {
        double worst = 0.0;
        for (size_t i = 0; i < part.groups.size(); ++i)
            for (size_t j = i + 1; j < part.groups.size(); ++j)
                worst = std::max(worst, pair_tv(dataset, part.cells.at({y, part.groups[i]}),
                                                part.cells.at({y, part.groups[j]}), bins, {}));
        out += part.class_weight.at(y) * worst;
    }
    return out;
}

SeparationReport compute_separation(const EmbeddingSet& dataset, const std::string& attribute,
                                    const SeparationOptions& opts) {
    auto part = partition_cells(dataset, attribute, opts.condition_on_y, opts.equal_class_weights);
    SeparationReport report;
    report.attribute = attribute;
    report.bins = opts.bins;
    report.k = dataset.dim();

    double tv = 0.0, wd = 0.0, fd = 0.0;
    for (int y : part.classes) {
        for (int g : part.groups) {
            const auto& rows = part.cells.at({y, g});
            report.n_per_cell["y" + std::to_string(y) + "_a" + std::to_string(g)] =
                static_cast<int>(rows.size());
            if (static_cast<int>(rows.size()) < opts.bins)
                report.warnings.push_back("cell (y=" + std::to_string(y) + ", a=" +
                                          std::to_string(g) + ") has " +
                                          std::to_string(rows.size()) + " < bins=" +
                                          std::to_string(opts.bins) +
                                          " samples; TV may be inflated");
        }
        // Pairwise metrics; for K > 2 the max over group pairs is reported.
        double tvy = 0.0, wdy = 0.0, fdy = 0.0;
        for (size_t i = 0; i < part.groups.size(); ++i)
            for (size_t j = i + 1; j < part.groups.size(); ++j) {
                const auto& ra = part.cells.at({y, part.groups[i]});
                const auto& rb = part.cells.at({y, part.groups[j]});
                tvy = std::max(tvy, pair_tv(dataset, ra, rb, opts.bins, opts.dim_weights));
                std::vector<double> per_dim(dataset.dim());
                for (int dd = 0; dd < dataset.dim(); ++dd)
                    per_dim[dd] = wasserstein_1d(column_values(dataset, ra, dd),
                                                 column_values(dataset, rb, dd));
                wdy = std::max(wdy, dims_mean(per_dim, {}));
                Vector m0, m1;
                Matrix c0, c1;
                mean_cov(dataset, ra, m0, c0);
                mean_cov(dataset, rb, m1, c1);
                fdy = std::max(fdy, frechet_gaussian(m0, c0, m1, c1));
            }
        report.per_class_tv[y] = tvy;
        const double w = part.class_weight.at(y);
        tv += w * tvy;
        wd += w * wdy;
        fd += w * fdy;
    }
    report.epsilon_tv = tv;
    report.wd = wd;
    report.fd = std::max(0.0, fd);
    return report;
}

}  // namespace latsep
