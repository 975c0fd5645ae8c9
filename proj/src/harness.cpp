#include "latsep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cfenv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "latsep/errors.hpp"

namespace latsep {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int round_half_even(double x) {
    // std::nearbyint honours the default FE_TONEAREST (ties to even) mode.
    return static_cast<int>(std::nearbyint(x));
}

// First m elements of a seeded partial Fisher-Yates shuffle of `pool`.
std::vector<int> sample_without_replacement(std::vector<int> pool, int m, std::mt19937_64& rng) {
    const int n = static_cast<int>(pool.size());
    for (int i = 0; i < m; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(m);
    return pool;
}

}  // namespace

double Metrics::get(MetricKind kind) const {
    switch (kind) {
        case MetricKind::loss: return loss;
        case MetricKind::balanced_accuracy: return balanced_accuracy;
        case MetricKind::auc: return auc;
        case MetricKind::accuracy: return accuracy;
    }
    return 0.0;
}

double log_loss(const Vector& scores, const std::vector<int>& labels) {
    double sum = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(scores(static_cast<int>(i)), 1e-12, 1.0 - 1e-12);
        sum += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / labels.size();
}

double accuracy_score(const Vector& scores, const std::vector<int>& labels) {
    int correct = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int pred = scores(static_cast<int>(i)) >= 0.5 ? 1 : 0;
        correct += pred == labels[i];
    }
    return static_cast<double>(correct) / labels.size();
}

double balanced_accuracy_score(const Vector& scores, const std::vector<int>& labels) {
    int tp = 0, fn = 0, tn = 0, fp = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int pred = scores(static_cast<int>(i)) >= 0.5 ? 1 : 0;
        if (labels[i] == 1)
            pred ? ++tp : ++fn;
        else
            pred ? ++fp : ++tn;
    }
    const int pos = tp + fn, neg = tn + fp;
    if (pos == 0) return static_cast<double>(tn) / neg;  // one-class slice: recall of present class
    if (neg == 0) return static_cast<double>(tp) / pos;
    return 0.5 * (static_cast<double>(tp) / pos + static_cast<double>(tn) / neg);
}

double auc_score(const Vector& scores, const std::vector<int>& labels) {
    const int n = static_cast<int>(labels.size());
    int pos = 0;
    for (int v : labels) pos += v;
    const int neg = n - pos;
    if (pos == 0 || neg == 0) return 0.5;  // undefined; ties convention

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores(a) < scores(b); });
    // Midranks for tie correction.
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
        const double mid = 0.5 * (i + j) + 1.0;
        for (int k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum = 0.0;
    for (int k = 0; k < n; ++k)
        if (labels[k] == 1) rank_sum += rank[k];
    const double u = rank_sum - 0.5 * pos * (pos + 1.0);
    return u / (static_cast<double>(pos) * neg);
}

std::vector<int> resample(const EmbeddingSet& dataset, const AllocationSpec& spec, double alpha,
                          std::uint64_t seed) {
    if (alpha < 0.0 || alpha > 1.0) throw RangeError("resample: alpha outside [0,1]");
    auto it = dataset.attributes.find(spec.attribute);
    if (it == dataset.attributes.end())
        throw UnknownAttribute("resample: unknown attribute " + spec.attribute);
    const auto& a = it->second;
    const int k = spec.budget;
    const int m1 = round_half_even(alpha * k);
    const int per_group[2] = {k - m1, m1};

    // Cell pools keyed (a, y); group codes are taken as 0/1.
    std::vector<int> pool[2];
    std::vector<int> cell[2][2];
    int pos_total = 0;
    for (int i = 0; i < dataset.n(); ++i) {
        if (a[i] != 0 && a[i] != 1)
            throw ConfigError("resample: attribute '" + spec.attribute + "' is not binary");
        pool[a[i]].push_back(i);
        cell[a[i]][dataset.y[i]].push_back(i);
        pos_total += dataset.y[i];
    }
    const double py = static_cast<double>(pos_total) / dataset.n();

    std::mt19937_64 rng(seed);
    std::vector<int> out;
    out.reserve(k);
    for (int g = 0; g < 2; ++g) {
        const int mg = per_group[g];
        if (mg == 0) continue;
        if (static_cast<int>(pool[g].size()) < mg)
            throw InsufficientSamples("resample: group " + std::to_string(g) + " has " +
                                      std::to_string(pool[g].size()) + " rows, needs " +
                                      std::to_string(mg) + " (short by " +
                                      std::to_string(mg - static_cast<int>(pool[g].size())) + ")");
        if (spec.hold_py || spec.hold_py_given_a) {
            double target_py = py;
            if (!spec.hold_py) {  // per-group conditional instead of the marginal
                const int gtot = static_cast<int>(pool[g].size());
                target_py = static_cast<double>(cell[g][1].size()) / gtot;
            }
            int n1 = round_half_even(target_py * mg);
            n1 = std::clamp(n1, 0, mg);
            const int want[2] = {mg - n1, n1};  // rounding excess goes to class 0
            for (int y : {1, 0}) {
                if (static_cast<int>(cell[g][y].size()) < want[y])
                    throw InsufficientSamples(
                        "resample: cell (y=" + std::to_string(y) + ", a=" + std::to_string(g) +
                        ") has " + std::to_string(cell[g][y].size()) + " rows, needs " +
                        std::to_string(want[y]) + " (short by " +
                        std::to_string(want[y] - static_cast<int>(cell[g][y].size())) + ")");
                auto picked = sample_without_replacement(cell[g][y], want[y], rng);
                out.insert(out.end(), picked.begin(), picked.end());
            }
        } else {
            auto picked = sample_without_replacement(pool[g], mg, rng);
            out.insert(out.end(), picked.begin(), picked.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Vector Probe::scores(const Matrix& z) const {
    if (z.cols() != feat_mean.size())
        throw DimensionMismatch("Probe::scores: feature dimension mismatch");
    Vector out(z.rows());
    for (int i = 0; i < z.rows(); ++i) {
        double logit = bias;
        for (int j = 0; j < z.cols(); ++j)
            logit += weights(j) * (z(i, j) - feat_mean(j)) / feat_std(j);
        out(i) = sigmoid(logit);
    }
    return out;
}

Probe train_probe(const Matrix& features, const std::vector<int>& labels,
                  const ProbeConfig& config, std::uint64_t /*seed*/) {
    const int m = static_cast<int>(features.rows());
    const int d = static_cast<int>(features.cols());
    if (m < 1 || static_cast<int>(labels.size()) != m)
        throw ConfigError("train_probe: empty or mismatched training set");

    Probe probe;
    probe.feat_mean = features.colwise().mean();
    probe.feat_std.resize(d);
    for (int j = 0; j < d; ++j) {
        const double var = (features.col(j).array() - probe.feat_mean(j)).square().mean();
        probe.feat_std(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    probe.weights = Vector::Zero(d);

    int pos = 0;
    for (int v : labels) pos += v;
    if (pos == 0 || pos == m) {
        // Legitimate at alpha in {0,1} with correlated labels: fall back to
        // the constant prior predictor.
        const double prior = std::clamp(static_cast<double>(pos) / m, 1e-3, 1.0 - 1e-3);
        probe.bias = std::log(prior / (1.0 - prior));
        probe.degenerate = true;
        Vector s = Vector::Constant(m, sigmoid(probe.bias));
        probe.final_loss = log_loss(s, labels);
        return probe;
    }

    Matrix x(m, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j)
            x(i, j) = (features(i, j) - probe.feat_mean(j)) / probe.feat_std(j);
    Vector yv(m);
    for (int i = 0; i < m; ++i) yv(i) = labels[i];

    Vector w = Vector::Zero(d);
    double b = 0.0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Vector p = (x * w).array() + b;
        p = p.unaryExpr([](double v) { return sigmoid(v); });
        Vector resid = p - yv;
        Vector grad_w = x.transpose() * resid / m + config.l2 * w;
        const double grad_b = resid.mean();
        w -= config.learning_rate * grad_w;
        b -= config.learning_rate * grad_b;
    }
    probe.weights = w;
    probe.bias = b;
    probe.epochs = config.epochs;
    Vector p = (x * w).array() + b;
    p = p.unaryExpr([](double v) { return sigmoid(v); });
    probe.final_loss = log_loss(p, labels) + 0.5 * config.l2 * w.squaredNorm();
    return probe;
}

Metrics evaluate_probe(const Probe& probe, const Matrix& features, const std::vector<int>& labels) {
    Vector s = probe.scores(features);
    Metrics m;
    m.n = static_cast<int>(labels.size());
    m.loss = log_loss(s, labels);
    m.accuracy = accuracy_score(s, labels);
    m.balanced_accuracy = balanced_accuracy_score(s, labels);
    m.auc = auc_score(s, labels);
    return m;
}

SweepResult run_sweep(const EmbeddingSet& dataset, const AllocationSpec& spec,
                      const EmbeddingSet& eval_set, int jobs) {
    if (spec.budget < 2) throw ConfigError("run_sweep: budget K >= 2 required");
    if (spec.grid.empty()) throw ConfigError("run_sweep: empty allocation grid");
    for (size_t i = 1; i < spec.grid.size(); ++i)
        if (spec.grid[i] <= spec.grid[i - 1])
            throw ConfigError("run_sweep: grid must be strictly increasing");
    if (eval_set.dim() != dataset.dim())
        throw DimensionMismatch("run_sweep: eval set dimensionality differs");
    {
        std::set<std::string> train_ids(dataset.ids.begin(), dataset.ids.end());
        for (const auto& id : eval_set.ids)
            if (train_ids.count(id))
                throw ConfigError("run_sweep: eval set shares id '" + id +
                                  "' with the fine-tuning pool");
    }

    std::vector<std::string> slice_attrs{spec.attribute};
    for (const auto& extra : spec.report_attributes)
        if (extra != spec.attribute && eval_set.has_attribute(extra))
            slice_attrs.push_back(extra);

    SweepResult result;
    result.attribute = spec.attribute;
    result.spec = spec;
    result.dataset_hash = dataset_hash(dataset);
    result.eval_hash = dataset_hash(eval_set);

    struct Task {
        double alpha;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (double alpha : spec.grid)
        for (std::uint64_t seed : spec.seeds) tasks.push_back({alpha, seed});
    result.runs.resize(tasks.size());

    auto run_one = [&](size_t idx) {
        const auto& task = tasks[idx];
        auto rows = resample(dataset, spec, task.alpha, task.seed);
        Matrix xtrain(rows.size(), dataset.dim());
        std::vector<int> ytrain(rows.size());
        const auto& acol = dataset.attributes.at(spec.attribute);
        RunRecord rec;
        rec.alpha = task.alpha;
        rec.seed = task.seed;
        int pos = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            xtrain.row(static_cast<int>(i)) = dataset.z.row(rows[i]);
            ytrain[i] = dataset.y[rows[i]];
            pos += ytrain[i];
            rec.cell_counts["y" + std::to_string(ytrain[i]) + "_a" +
                            std::to_string(acol[rows[i]])] += 1;
        }
        rec.realized_py = static_cast<double>(pos) / rows.size();

        Probe probe = train_probe(xtrain, ytrain, spec.probe, task.seed);
        rec.degenerate_probe = probe.degenerate;
        rec.overall = evaluate_probe(probe, eval_set.z, eval_set.y);
        Vector scores = probe.scores(eval_set.z);
        for (const auto& attr : slice_attrs) {
            const auto& col = eval_set.attributes.at(attr);
            for (int g : attribute_groups(eval_set, attr)) {
                std::vector<int> gi;
                for (int i = 0; i < eval_set.n(); ++i)
                    if (col[i] == g) gi.push_back(i);
                Vector gs(gi.size());
                std::vector<int> gy(gi.size());
                for (size_t i = 0; i < gi.size(); ++i) {
                    gs(static_cast<int>(i)) = scores(gi[i]);
                    gy[i] = eval_set.y[gi[i]];
                }
                Metrics m;
                m.n = static_cast<int>(gi.size());
                m.loss = log_loss(gs, gy);
                m.accuracy = accuracy_score(gs, gy);
                m.balanced_accuracy = balanced_accuracy_score(gs, gy);
                m.auc = auc_score(gs, gy);
                rec.per_group[attr][g] = m;
            }
        }
        result.runs[idx] = std::move(rec);
    };

    jobs = std::max(1, jobs);
    if (jobs == 1 || tasks.size() <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        const int nthreads = std::min<size_t>(jobs, tasks.size());
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

EncoderParams pretrain_encoder(const EmbeddingSet& dataset, const std::string& attribute,
                               const EncoderConfig& config, std::uint64_t seed) {
    if (config.lambda < 0) throw ConfigError("pretrain_encoder: lambda must be >= 0");
    auto it = dataset.attributes.find(attribute);
    if (it == dataset.attributes.end())
        throw UnknownAttribute("pretrain_encoder: unknown attribute " + attribute);
    const auto& acol = it->second;
    const int n = dataset.n();
    const int d = dataset.dim();
    const int h = config.hidden;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> init(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
    EncoderParams params;
    params.lambda = config.lambda;
    params.w1.resize(h, d);
    params.b1 = Vector::Zero(h);
    params.w2.resize(h);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < d; ++j) params.w1(i, j) = init(rng);
        params.w2(i) = init(rng);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_task = 0.0, epoch_surr = 0.0;
        int nbatches = 0;
        for (int start = 0; start < n; start += config.batch) {
            const int bsz = std::min(config.batch, n - start);
            Matrix x(bsz, d);
            Vector yv(bsz);
            std::vector<int> ab(bsz), yb(bsz);
            for (int i = 0; i < bsz; ++i) {
                const int r = order[start + i];
                x.row(i) = dataset.z.row(r);
                yv(i) = dataset.y[r];
                yb[i] = dataset.y[r];
                ab[i] = acol[r];
            }
            // forward
            Matrix pre = (params.w1 * x.transpose()).colwise() + params.b1;  // h x bsz
            Matrix hid = pre.array().tanh();
            Vector logits = hid.transpose() * params.w2;
            logits.array() += params.b2;
            Vector p = logits.unaryExpr([](double v) { return sigmoid(v); });

            epoch_task += log_loss(p, yb);

            Vector dlogit = (p - yv) / bsz;
            Matrix dhid = params.w2 * dlogit.transpose();  // h x bsz

            // TV surrogate: per label, Mahalanobis^2 between group mean
            // embeddings under the pooled diagonal within-batch variance.
            if (config.lambda > 0) {
                Vector var(h);
                for (int j = 0; j < h; ++j) {
                    const double mu = hid.row(j).mean();
                    var(j) = std::max(1e-6, (hid.row(j).array() - mu).square().mean());
                }
                double surr = 0.0;
                int terms = 0;
                std::vector<std::vector<int>> cells(4);  // y*2 + a
                for (int i = 0; i < bsz; ++i)
                    if (ab[i] == 0 || ab[i] == 1) cells[yb[i] * 2 + ab[i]].push_back(i);
                struct Term {
                    Vector coef;  // h, shared factor 2*(m1-m0)/var
                    const std::vector<int>* g0;
                    const std::vector<int>* g1;
                };
                std::vector<Term> active;
                for (int y = 0; y < 2; ++y) {
                    const auto& g0 = cells[y * 2 + 0];
                    const auto& g1 = cells[y * 2 + 1];
                    if (g0.empty() || g1.empty()) {
                        params.skipped_surrogate_batches += 1;
                        continue;
                    }
                    Vector m0 = Vector::Zero(h), m1 = Vector::Zero(h);
                    for (int i : g0) m0 += hid.col(i);
                    for (int i : g1) m1 += hid.col(i);
                    m0 /= g0.size();
                    m1 /= g1.size();
                    Vector diff = m1 - m0;
                    surr += (diff.array().square() / var.array()).sum();
                    active.push_back({2.0 * (diff.array() / var.array()).matrix(), &g0, &g1});
                    ++terms;
                }
                if (terms > 0) {
                    surr /= terms;
                    epoch_surr += surr;
                    const double scale = config.lambda / terms;
                    for (const auto& t : active) {
                        // gradients through the means only
                        for (int i : *t.g1)
                            dhid.col(i) += scale * t.coef / static_cast<double>(t.g1->size());
                        for (int i : *t.g0)
                            dhid.col(i) -= scale * t.coef / static_cast<double>(t.g0->size());
                    }
                }
            }

            Matrix dpre = dhid.array() * (1.0 - hid.array().square());
            Matrix dw1 = dpre * x;
            Vector db1 = dpre.rowwise().sum();
            Vector dw2 = hid * dlogit;
            const double db2 = dlogit.sum();

            params.w1 -= config.learning_rate * dw1;
            params.b1 -= config.learning_rate * db1;
            params.w2 -= config.learning_rate * dw2;
            params.b2 -= config.learning_rate * db2;
            ++nbatches;
        }
        params.loss_trace.push_back(epoch_task / nbatches);
        params.surrogate_trace.push_back(epoch_surr / nbatches);
    }
    return params;
}

EmbeddingSet encode(const EncoderParams& params, const EmbeddingSet& dataset) {
    if (dataset.dim() != params.w1.cols())
        throw DimensionMismatch("encode: dataset dimensionality does not match encoder");
    EmbeddingSet out;
    out.ids = dataset.ids;
    out.y = dataset.y;
    out.attributes = dataset.attributes;
    out.value_names = dataset.value_names;
    out.encoder_tag = "mlp-encoder(lambda=" + std::to_string(params.lambda) + ")";
    Matrix pre = (params.w1 * dataset.z.transpose()).colwise() + params.b1;
    out.z = pre.array().tanh().transpose();
    return out;
}

}  // namespace latsep
