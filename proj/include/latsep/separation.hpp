#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latsep/types.hpp"

namespace latsep {

struct SeparationOptions {
    int bins = 50;
    bool condition_on_y = true;
    bool equal_class_weights = false;       // expectation over y: empirical P(Y=y) vs uniform
    std::vector<double> dim_weights;        // optional per-dimension weights (e.g. explained variance)
};

struct SeparationReport {
    std::string attribute;
    double epsilon_tv = 0.0;                // class-averaged TV
    std::map<int, double> per_class_tv;     // y -> TV
    double wd = 0.0;
    double fd = 0.0;
    int k = 0;                              // dimensions the metrics were computed on
    int bins = 50;
    std::map<std::string, int> n_per_cell;  // "y<y>_a<a>" -> count
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// 1-D building blocks (shared bin edges span the pooled min-max of both samples).
double tv_hist_1d(const std::vector<double>& a, const std::vector<double>& b, int bins);
double wasserstein_1d(std::vector<double> a, std::vector<double> b);
double frechet_gaussian(const Vector& mean0, const Matrix& cov0,
                        const Vector& mean1, const Matrix& cov1);

/// Class-conditional histogram TV averaged over dimensions and y.
SeparationReport tv_distance(const EmbeddingSet& dataset, const std::string& attribute,
                             int bins = 50, bool condition_on_y = true);

/// Mean per-dimension Wasserstein-1, expectation over y.
double wasserstein_distance(const EmbeddingSet& dataset, const std::string& attribute,
                            bool condition_on_y = true);

/// Gaussian-approximation distance from per-cell means/covariances, expectation over y.
double frechet_distance(const EmbeddingSet& dataset, const std::string& attribute,
                        bool condition_on_y = true);

/// E_y[max over group pairs of pairwise TV]; equals tv_distance for K=2.
double tv_multigroup(const EmbeddingSet& dataset, const std::string& attribute, int bins = 50);

/// TV + WD + FD in one report.
SeparationReport compute_separation(const EmbeddingSet& dataset, const std::string& attribute,
                                    const SeparationOptions& opts = {});

}  // namespace latsep
