#pragma once

#include "latsep/types.hpp"

namespace latsep {

/// Top-k principal components retaining a target explained-variance fraction.
struct PcaModel {
    Vector mean;               // D
    Matrix components;         // k x D, orthonormal rows
    Vector explained_variance; // k, non-increasing
    double variance_fraction = 0.7;
    double total_variance = 0.0;
    int k = 0;
};

/// Eigendecomposition of the centered covariance (denominator N-1); k is the
/// minimal count whose cumulative variance fraction reaches the target. Each
/// component's sign is fixed so its largest-magnitude entry is positive.
PcaModel fit_pca(const EmbeddingSet& dataset, double variance_fraction = 0.7);

/// Rows mapped to (z - mean) * components^T; labels and attributes carried through.
EmbeddingSet project(const PcaModel& model, const EmbeddingSet& dataset);

}  // namespace latsep
