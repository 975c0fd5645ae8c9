#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "latsep/errors.hpp"
#include "latsep/harness.hpp"
#include "latsep/synthetic.hpp"
#include "latsep/types.hpp"

using namespace latsep;

namespace {

// Pool with controllable per-cell counts; ids unique.
EmbeddingSet pool_with_cells(int n00, int n10, int n01, int n11, std::uint64_t seed = 1) {
    EmbeddingSet set;
    const int n = n00 + n10 + n01 + n11;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    set.z.resize(n, 2);
    set.y.resize(n);
    std::vector<int> a(n);
    int i = 0;
    auto fill = [&](int count, int y, int grp) {
        for (int c = 0; c < count; ++c, ++i) {
            set.y[i] = y;
            a[i] = grp;
            set.z(i, 0) = gauss(rng) + y;
            set.z(i, 1) = gauss(rng);
            set.ids.push_back("p" + std::to_string(i));
        }
    };
    fill(n00, 0, 0);
    fill(n10, 1, 0);
    fill(n01, 0, 1);
    fill(n11, 1, 1);
    set.attributes["group"] = a;
    return set;
}

AllocationSpec basic_spec(int budget) {
    AllocationSpec spec;
    spec.attribute = "group";
    spec.budget = budget;
    return spec;
}

std::map<std::pair<int, int>, int> cell_histogram(const EmbeddingSet& set,
                                                  const std::vector<int>& rows) {
    std::map<std::pair<int, int>, int> counts;
    for (int r : rows) ++counts[{set.y[r], set.attributes.at("group")[r]}];
    return counts;
}

}  // namespace

TEST_CASE("resample: alpha = 0.5, K = 100 gives a 50/50 group split") {
    EmbeddingSet pool = pool_with_cells(100, 100, 100, 100);
    AllocationSpec spec = basic_spec(100);
    auto rows = resample(pool, spec, 0.5, 3);
    REQUIRE(rows.size() == 100);
    auto cells = cell_histogram(pool, rows);
    CHECK(cells[{0, 0}] + cells[{1, 0}] == 50);
    CHECK(cells[{0, 1}] + cells[{1, 1}] == 50);
    // indices unique
    CHECK(std::set<int>(rows.begin(), rows.end()).size() == 100);
}

TEST_CASE("resample: alpha = 1 draws everything from group 1") {
    EmbeddingSet pool = pool_with_cells(100, 100, 100, 100);
    auto rows = resample(pool, basic_spec(100), 1.0, 3);
    auto cells = cell_histogram(pool, rows);
    CHECK(cells[{0, 0}] == 0);
    CHECK(cells[{1, 0}] == 0);
    CHECK(cells[{0, 1}] + cells[{1, 1}] == 100);
}

TEST_CASE("resample: hold_py worked example, P(Y=1)=0.3, K=100, alpha=0.4") {
    // pool marginal P(Y=1) = 0.3 in both groups
    EmbeddingSet pool = pool_with_cells(140, 60, 140, 60);
    AllocationSpec spec = basic_spec(100);
    spec.hold_py = true;
    spec.hold_py_given_a = false;
    auto rows = resample(pool, spec, 0.4, 9);
    auto cells = cell_histogram(pool, rows);
    CHECK(cells[{1, 1}] == 12);
    CHECK(cells[{0, 1}] == 28);
    CHECK(cells[{1, 0}] == 18);
    CHECK(cells[{0, 0}] == 42);
}

TEST_CASE("resample: round-half-even on the group split") {
    EmbeddingSet pool = pool_with_cells(100, 100, 100, 100);
    AllocationSpec spec = basic_spec(10);
    spec.hold_py = false;
    spec.hold_py_given_a = false;
    // 0.25 * 10 = 2.5 -> rounds to 2 (even); 0.35 * 10 = 3.5 -> rounds to 4
    auto cells = cell_histogram(pool, resample(pool, spec, 0.25, 1));
    CHECK(cells[{0, 1}] + cells[{1, 1}] == 2);
    cells = cell_histogram(pool, resample(pool, spec, 0.35, 1));
    CHECK(cells[{0, 1}] + cells[{1, 1}] == 4);
}

TEST_CASE("resample: insufficient cell raises with the shortfall named") {
    EmbeddingSet pool = pool_with_cells(50, 4, 50, 50);
    AllocationSpec spec = basic_spec(100);
    spec.hold_py = true;
    spec.hold_py_given_a = false;
    try {
        resample(pool, spec, 0.0, 1);
        FAIL("expected InsufficientSamples");
    } catch (const InsufficientSamples& e) {
        CHECK(std::string(e.what()).find("short by") != std::string::npos);
    }
}

TEST_CASE("resample: deterministic per seed") {
    EmbeddingSet pool = pool_with_cells(80, 80, 80, 80);
    AllocationSpec spec = basic_spec(60);
    CHECK(resample(pool, spec, 0.3, 5) == resample(pool, spec, 0.3, 5));
    CHECK(resample(pool, spec, 0.3, 5) != resample(pool, spec, 0.3, 6));
}

TEST_CASE("train_probe: separable blobs reach 0.99 training accuracy") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 0.3);
    Matrix z(200, 2);
    std::vector<int> y(200);
    for (int i = 0; i < 200; ++i) {
        y[i] = i % 2;
        z(i, 0) = gauss(rng) + (y[i] ? 2.0 : -2.0);
        z(i, 1) = gauss(rng);
    }
    Probe probe = train_probe(z, y, {}, 1);
    CHECK(accuracy_score(probe.scores(z), y) >= 0.99);
    CHECK(!probe.degenerate);
}

TEST_CASE("train_probe: label-independent features give chance accuracy") {
    std::normal_distribution<double> gauss;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        Matrix ztr(300, 3), zte(300, 3);
        std::vector<int> ytr(300), yte(300);
        for (int i = 0; i < 300; ++i) {
            ytr[i] = static_cast<int>(rng() % 2);
            yte[i] = static_cast<int>(rng() % 2);
            for (int j = 0; j < 3; ++j) {
                ztr(i, j) = gauss(rng);
                zte(i, j) = gauss(rng);
            }
        }
        Probe probe = train_probe(ztr, ytr, {}, seed);
        const double acc = accuracy_score(probe.scores(zte), yte);
        CHECK(acc >= 0.40);
        CHECK(acc <= 0.60);
    }
}

TEST_CASE("train_probe: single-class set degenerates to the prior predictor") {
    Matrix z = Matrix::Random(20, 2);
    std::vector<int> y(20, 1);
    Probe probe = train_probe(z, y, {}, 1);
    CHECK(probe.degenerate);
    Vector s = probe.scores(z);
    for (int i = 0; i < 20; ++i) CHECK(s(i) > 0.5);
}

TEST_CASE("train_probe: zero l2 matches a hand-rolled gradient-descent oracle") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    const int n = 50, d = 2;
    Matrix z(n, d);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = i % 2;
        for (int j = 0; j < d; ++j) z(i, j) = gauss(rng) + 0.5 * y[i];
    }
    ProbeConfig cfg;
    cfg.l2 = 0.0;
    cfg.epochs = 40;
    Probe probe = train_probe(z, y, cfg, 1);

    // oracle: standardize, zero init, full-batch GD on mean cross-entropy
    Vector mean = z.colwise().mean();
    Vector sd(d);
    for (int j = 0; j < d; ++j) {
        double var = (z.col(j).array() - mean(j)).square().sum() / n;
        sd(j) = std::sqrt(std::max(var, 1e-12));
    }
    Matrix x = (z.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
    Vector w = Vector::Zero(d);
    double b = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Vector gw = Vector::Zero(d);
        double gb = 0.0;
        for (int i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-(x.row(i).dot(w) + b)));
            const double err = p - y[i];
            gw += err * x.row(i).transpose();
            gb += err;
        }
        w -= cfg.learning_rate * gw / n;
        b -= cfg.learning_rate * gb / n;
    }
    CHECK((probe.weights - w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(probe.bias == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("metric primitives: hand values") {
    Vector s(4);
    s << 0.9, 0.1, 0.8, 0.4;
    std::vector<int> y = {1, 0, 0, 1};
    // log loss: -(log .9 + log .9 + log .2 + log .4)/4
    const double expected_ll =
        -(std::log(0.9) + std::log(0.9) + std::log(0.2) + std::log(0.4)) / 4.0;
    CHECK(log_loss(s, y) == doctest::Approx(expected_ll));
    CHECK(accuracy_score(s, y) == doctest::Approx(0.5));
    // TPR = 1/2, TNR = 1/2
    CHECK(balanced_accuracy_score(s, y) == doctest::Approx(0.5));
    // positives {0.9, 0.4}, negatives {0.1, 0.8}: pairs won 3 of 4
    CHECK(auc_score(s, y) == doctest::Approx(0.75));
}

TEST_CASE("auc_score: tie handling via midranks") {
    Vector s(4);
    s << 0.5, 0.5, 0.5, 0.5;
    std::vector<int> y = {1, 0, 1, 0};
    CHECK(auc_score(s, y) == doctest::Approx(0.5));
}

TEST_CASE("balanced accuracy on a one-class slice is the recall of that class") {
    Vector s(3);
    s << 0.9, 0.6, 0.2;
    std::vector<int> y = {1, 1, 1};
    CHECK(balanced_accuracy_score(s, y) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("run_sweep: grid of 3, seeds of 2, records ordered and complete") {
    EmbeddingSet pool = pool_with_cells(200, 200, 200, 200, 2);
    EmbeddingSet eval = pool_with_cells(100, 100, 100, 100, 3);
    for (auto& id : eval.ids) id = "e" + id;
    AllocationSpec spec = basic_spec(100);
    spec.grid = {0.0, 0.5, 1.0};
    spec.seeds = {1, 2};
    SweepResult sweep = run_sweep(pool, spec, eval);
    REQUIRE(sweep.runs.size() == 6);
    CHECK(sweep.runs[0].alpha == 0.0);
    CHECK(sweep.runs[0].seed == 1);
    CHECK(sweep.runs[5].alpha == 1.0);
    CHECK(sweep.runs[5].seed == 2);
    for (const auto& run : sweep.runs) {
        CHECK(run.overall.n == eval.n());
        CHECK(run.per_group.at("group").at(0).n + run.per_group.at("group").at(1).n == eval.n());
    }
    CHECK(sweep.dataset_hash == dataset_hash(pool));
}

TEST_CASE("run_sweep: jobs > 1 reproduces the serial result") {
    EmbeddingSet pool = pool_with_cells(200, 200, 200, 200, 4);
    EmbeddingSet eval = pool_with_cells(80, 80, 80, 80, 5);
    for (auto& id : eval.ids) id = "e" + id;
    AllocationSpec spec = basic_spec(100);
    spec.seeds = {1, 2};
    SweepResult serial = run_sweep(pool, spec, eval, 1);
    SweepResult parallel = run_sweep(pool, spec, eval, 4);
    REQUIRE(serial.runs.size() == parallel.runs.size());
    for (size_t i = 0; i < serial.runs.size(); ++i) {
        CHECK(serial.runs[i].overall.loss ==
              doctest::Approx(parallel.runs[i].overall.loss).epsilon(1e-15));
        CHECK(serial.runs[i].cell_counts == parallel.runs[i].cell_counts);
    }
}

TEST_CASE("run_sweep: overlapping eval ids rejected") {
    EmbeddingSet pool = pool_with_cells(100, 100, 100, 100, 2);
    CHECK_THROWS_AS(run_sweep(pool, basic_spec(50), pool), ConfigError);
}

TEST_CASE("epsilon = 0 eval: per-group AUC flat across allocations") {
    // both groups identically distributed: allocation cannot matter beyond noise
    EmbeddingSet pool = pool_with_cells(600, 600, 600, 600, 6);
    EmbeddingSet eval = pool_with_cells(400, 400, 400, 400, 7);
    for (auto& id : eval.ids) id = "e" + id;
    AllocationSpec spec = basic_spec(400);
    spec.grid = {0.0, 1.0};
    spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    SweepResult sweep = run_sweep(pool, spec, eval, 4);
    for (int g : {0, 1}) {
        double mean_gap = 0.0;
        for (std::uint64_t s = 1; s <= 10; ++s) {
            double auc0 = 0.0, auc1 = 0.0;
            for (const auto& run : sweep.runs)
                if (run.seed == s) {
                    if (run.alpha == 0.0) auc0 = run.per_group.at("group").at(g).auc;
                    if (run.alpha == 1.0) auc1 = run.per_group.at("group").at(g).auc;
                }
            mean_gap += std::abs(auc1 - auc0);
        }
        CHECK(mean_gap / 10.0 < 0.02);
    }
}

TEST_CASE("encoder: surrogate tracks the group-mean separation") {
    // identically distributed groups: surrogate is batch-sampling noise only;
    // strongly shifted groups: surrogate is large. Direction must hold.
    EmbeddingSet same = pool_with_cells(128, 128, 128, 128, 8);
    EmbeddingSet split = same;
    for (int i = 0; i < split.n(); ++i)
        split.z(i, 1) += split.attributes.at("group")[i] ? 4.0 : -4.0;
    EncoderConfig cfg;
    cfg.lambda = 0.01;
    cfg.epochs = 3;
    EncoderParams p_same = pretrain_encoder(same, "group", cfg, 1);
    EncoderParams p_split = pretrain_encoder(split, "group", cfg, 1);
    REQUIRE(!p_same.surrogate_trace.empty());
    CHECK(p_split.surrogate_trace.front() > 3.0 * p_same.surrogate_trace.front());
    CHECK(p_same.skipped_surrogate_batches == 0);
}

TEST_CASE("encoder: lambda = 0 leaves the task-loss path unchanged") {
    EmbeddingSet set = pool_with_cells(64, 64, 64, 64, 9);
    EncoderConfig base;
    base.epochs = 5;
    EncoderConfig reg = base;
    reg.lambda = 0.0;
    EncoderParams a = pretrain_encoder(set, "group", base, 2);
    EncoderParams b = pretrain_encoder(set, "group", reg, 2);
    REQUIRE(a.loss_trace.size() == b.loss_trace.size());
    for (size_t i = 0; i < a.loss_trace.size(); ++i)
        CHECK(a.loss_trace[i] == doctest::Approx(b.loss_trace[i]).epsilon(1e-12));
    CHECK((a.w1 - b.w1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encode: hidden width becomes the new dimension") {
    EmbeddingSet set = pool_with_cells(32, 32, 32, 32, 10);
    EncoderConfig cfg;
    cfg.hidden = 7;
    cfg.epochs = 2;
    EncoderParams params = pretrain_encoder(set, "group", cfg, 3);
    EmbeddingSet enc = encode(params, set);
    CHECK(enc.dim() == 7);
    CHECK(enc.n() == set.n());
    CHECK(enc.y == set.y);
    CHECK(enc.attributes == set.attributes);
    CHECK(enc.encoder_tag.find("lambda") != std::string::npos);
}
