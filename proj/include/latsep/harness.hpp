#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latsep/types.hpp"

namespace latsep {

struct ProbeConfig {
    double learning_rate = 0.1;
    int epochs = 500;
    double l2 = 1e-4;
};

/// Affine logistic classifier over fixed representations, trained by
/// full-batch gradient descent on standardized features.
struct Probe {
    Vector weights;   // k
    double bias = 0.0;
    Vector feat_mean; // standardization parameters from the training set
    Vector feat_std;
    double final_loss = 0.0;
    int epochs = 0;
    bool degenerate = false;  // single-class training set -> constant prior predictor

    Vector scores(const Matrix& z) const;  // probabilities in (0,1)
};

struct AllocationSpec {
    std::string attribute;
    int budget = 2000;                                       // K
    std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};    // alpha_1 values
    bool hold_py = false;
    bool hold_py_given_a = true;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    ProbeConfig probe;
    std::vector<std::string> report_attributes;  // extra attributes to slice eval by
};

struct Metrics {
    double loss = 0.0;
    double balanced_accuracy = 0.0;
    double auc = 0.0;
    double accuracy = 0.0;
    int n = 0;

    double get(MetricKind kind) const;
    MetricValue value(MetricKind kind) const { return {kind, get(kind), n}; }
};

struct RunRecord {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::map<std::string, int> cell_counts;  // "y<y>_a<a>" -> realized training count
    double realized_py = 0.0;                // realized P(Y=1) of the fine-tuning set
    bool degenerate_probe = false;
    Metrics overall;
    std::map<std::string, std::map<int, Metrics>> per_group;  // attribute -> group -> metrics
};

struct SweepResult {
    std::string attribute;
    AllocationSpec spec;
    std::uint64_t dataset_hash = 0;
    std::uint64_t eval_hash = 0;
    std::vector<RunRecord> runs;  // ordered by (grid index, seed index)
};

// Evaluation metric primitives.
double log_loss(const Vector& scores, const std::vector<int>& labels);
double accuracy_score(const Vector& scores, const std::vector<int>& labels);
double balanced_accuracy_score(const Vector& scores, const std::vector<int>& labels);
double auc_score(const Vector& scores, const std::vector<int>& labels);  // Mann-Whitney, tie-corrected

/// Fixed-budget index set: round(alpha*K) rows from group 1 (round half to
/// even), the rest from group 0, uniform without replacement within group.
/// hold_py stratifies per (Y, A) cell against the pool's marginal P(Y);
/// hold_py_given_a stratifies against the pool's per-group P(Y | A).
std::vector<int> resample(const EmbeddingSet& dataset, const AllocationSpec& spec, double alpha,
                          std::uint64_t seed);

Probe train_probe(const Matrix& features, const std::vector<int>& labels,
                  const ProbeConfig& config, std::uint64_t seed);

Metrics evaluate_probe(const Probe& probe, const Matrix& features, const std::vector<int>& labels);

/// resample -> train_probe -> per-subgroup evaluation for every (alpha, seed).
SweepResult run_sweep(const EmbeddingSet& dataset, const AllocationSpec& spec,
                      const EmbeddingSet& eval_set, int jobs = 1);

// --- synthetic end-to-end encoder path ---

struct EncoderConfig {
    int hidden = 16;
    double learning_rate = 0.05;
    int epochs = 60;
    int batch = 128;
    double lambda = 0.0;  // TV-surrogate weight
};

struct EncoderParams {
    Matrix w1;   // hidden x d
    Vector b1;   // hidden
    Vector w2;   // hidden
    double b2 = 0.0;
    double lambda = 0.0;
    std::vector<double> loss_trace;       // mean task loss per epoch
    std::vector<double> surrogate_trace;  // mean surrogate per epoch
    int skipped_surrogate_batches = 0;    // batches where a (y, a) cell was empty
};

/// Two-layer perceptron trained with cross-entropy plus lambda times the
/// per-batch Mahalanobis-squared distance between per-label group mean
/// embeddings (pooled diagonal within-batch covariance, floored at 1e-6;
/// gradients flow through the means only).
EncoderParams pretrain_encoder(const EmbeddingSet& dataset, const std::string& attribute,
                               const EncoderConfig& config, std::uint64_t seed);

/// Hidden-layer activations as a new EmbeddingSet (labels/attributes carried).
EmbeddingSet encode(const EncoderParams& params, const EmbeddingSet& dataset);

}  // namespace latsep
