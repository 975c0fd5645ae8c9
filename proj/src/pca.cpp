#include "latsep/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "latsep/errors.hpp"

namespace latsep {

PcaModel fit_pca(const EmbeddingSet& dataset, double variance_fraction) {
    if (dataset.n() < 2) throw DegenerateData("fit_pca: N >= 2 required");
    if (variance_fraction <= 0.0 || variance_fraction > 1.0)
        throw ConfigError("fit_pca: variance_fraction must be in (0,1]");

    const int n = dataset.n();
    const int d = dataset.dim();
    PcaModel model;
    model.variance_fraction = variance_fraction;
    model.mean = dataset.z.colwise().mean();
    Matrix centered = dataset.z.rowwise() - model.mean.transpose();
    Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericalError("fit_pca: eigendecomposition failed to converge");

    // Eigen returns ascending eigenvalues; reverse to descending.
    Vector evals(d);
    Matrix evecs(d, d);
    for (int i = 0; i < d; ++i) {
        evals(i) = std::max(0.0, solver.eigenvalues()(d - 1 - i));
        evecs.col(i) = solver.eigenvectors().col(d - 1 - i);
    }
    model.total_variance = evals.sum();
    if (model.total_variance < 1e-12)
        throw DegenerateData("fit_pca: total variance below 1e-12 (all rows identical?)");

    int k = d;
    double cum = 0.0;
    for (int i = 0; i < d; ++i) {
        cum += evals(i);
        if (cum / model.total_variance >= variance_fraction - 1e-12) {
            k = i + 1;
            break;
        }
    }
    model.k = k;
    model.explained_variance = evals.head(k);
    model.components.resize(k, d);
    for (int i = 0; i < k; ++i) {
        Vector c = evecs.col(i);
        int imax = 0;
        c.cwiseAbs().maxCoeff(&imax);
        if (c(imax) < 0) c = -c;
        model.components.row(i) = c.transpose();
    }
    return model;
}

EmbeddingSet project(const PcaModel& model, const EmbeddingSet& dataset) {
    if (dataset.dim() != static_cast<int>(model.mean.size()))
        throw DimensionMismatch("project: dataset D=" + std::to_string(dataset.dim()) +
                                " != model D=" + std::to_string(model.mean.size()));
    EmbeddingSet out;
    out.ids = dataset.ids;
    out.y = dataset.y;
    out.attributes = dataset.attributes;
    out.value_names = dataset.value_names;
    out.encoder_tag = dataset.encoder_tag;
    Matrix centered = dataset.z.rowwise() - model.mean.transpose();
    out.z = centered * model.components.transpose();
    return out;
}

}  // namespace latsep
