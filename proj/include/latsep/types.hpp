#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace latsep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// N x D latent matrix with per-row label and attribute annotations.
/// All fields are treated as immutable after construction.
struct EmbeddingSet {
    std::vector<std::string> ids;
    Matrix z;                 // N x D, row-major semantics (row = sample)
    std::vector<int> y;       // binary labels {0,1}
    std::map<std::string, std::vector<int>> attributes;         // name -> per-row group code
    std::map<std::string, std::map<int, std::string>> value_names;  // name -> code -> label
    std::string encoder_tag;

    int n() const { return static_cast<int>(z.rows()); }
    int dim() const { return static_cast<int>(z.cols()); }

    bool has_attribute(const std::string& name) const {
        return attributes.count(name) > 0;
    }
};

/// Per-attribute prevalence and class-conditional summary.
struct SubgroupSummary {
    std::string attribute;
    std::vector<int> groups;                 // distinct codes present, ascending
    std::map<int, double> gamma;             // group -> base prevalence
    std::map<int, double> class_given_group; // group -> P(Y=1 | A=group)
    std::map<std::pair<int, int>, int> counts;  // (y, group) -> count
    int n = 0;
};

enum class MetricKind { loss, balanced_accuracy, auc, accuracy };

std::string metric_name(MetricKind kind);
MetricKind metric_from_name(const std::string& name);

struct MetricValue {
    MetricKind kind = MetricKind::loss;
    double value = 0.0;
    int n = 0;
};

/// gamma_k = count(A=k)/N; class_given_group from the (y, a) cell counts.
/// Throws UnknownAttribute / EmptySubgroup.
SubgroupSummary summarize(const EmbeddingSet& dataset, const std::string& attribute);

/// Returns one message per invariant violation; empty iff the set is well formed.
/// Never throws.
std::vector<std::string> validate(const EmbeddingSet& dataset);

/// Row subset by index, carrying labels and attributes through.
EmbeddingSet take_rows(const EmbeddingSet& dataset, const std::vector<int>& rows);

/// Stable content hash of the numeric payload (matrix, labels, attributes).
std::uint64_t dataset_hash(const EmbeddingSet& dataset);

/// Distinct values of an attribute column, ascending.
std::vector<int> attribute_groups(const EmbeddingSet& dataset, const std::string& attribute);

}  // namespace latsep
