#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "latsep/errors.hpp"
#include "latsep/types.hpp"

using namespace latsep;

namespace {

EmbeddingSet make_set(int n, int d, std::uint64_t seed = 0) {
    EmbeddingSet set;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    set.z.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) set.z(i, j) = gauss(rng);
    set.y.resize(n);
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) {
        set.y[i] = i % 2;
        a[i] = (i / 2) % 2;
        set.ids.push_back(std::to_string(i));
    }
    set.attributes["group"] = a;
    return set;
}

}  // namespace

TEST_CASE("summarize: symmetric 4-row construction") {
    EmbeddingSet set = make_set(4, 2);
    set.y = {0, 1, 0, 1};
    set.attributes["group"] = {0, 0, 1, 1};
    SubgroupSummary s = summarize(set, "group");
    CHECK(s.n == 4);
    CHECK(s.groups == std::vector<int>{0, 1});
    CHECK(s.gamma.at(0) == doctest::Approx(0.5));
    CHECK(s.gamma.at(1) == doctest::Approx(0.5));
    CHECK(s.class_given_group.at(0) == doctest::Approx(0.5));
    CHECK(s.class_given_group.at(1) == doctest::Approx(0.5));
    CHECK(s.counts.at({0, 0}) == 1);
    CHECK(s.counts.at({1, 1}) == 1);
}

TEST_CASE("summarize: 10-row prevalence by direct counting") {
    EmbeddingSet set = make_set(10, 2);
    set.attributes["group"] = {1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
    SubgroupSummary s = summarize(set, "group");
    CHECK(s.gamma.at(0) == doctest::Approx(0.3));
    CHECK(s.gamma.at(1) == doctest::Approx(0.7));
}

TEST_CASE("summarize: unknown attribute / empty subgroup") {
    EmbeddingSet set = make_set(8, 2);
    CHECK_THROWS_AS(summarize(set, "nope"), UnknownAttribute);
}

TEST_CASE("validate: well-formed set has no violations") {
    CHECK(validate(make_set(3, 4)).empty());
}

TEST_CASE("validate: non-finite entry named by coordinates") {
    EmbeddingSet set = make_set(4, 6);
    set.z(2, 5) = std::nan("");
    auto v = validate(set);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("(2,5)") != std::string::npos);
}

TEST_CASE("validate: constant attribute column is a violation") {
    EmbeddingSet set = make_set(4, 2);
    set.attributes["group"] = {0, 0, 0, 0};
    auto v = validate(set);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("one group") != std::string::npos);
}

TEST_CASE("validate: bad labels and length mismatches reported") {
    EmbeddingSet set = make_set(4, 2);
    set.y[1] = 2;
    CHECK(!validate(set).empty());
    set = make_set(4, 2);
    set.y.pop_back();
    CHECK(!validate(set).empty());
    set = make_set(4, 2);
    set.attributes["group"].push_back(0);
    CHECK(!validate(set).empty());
}

TEST_CASE("take_rows: subset carries labels and attributes") {
    EmbeddingSet set = make_set(10, 3);
    EmbeddingSet sub = take_rows(set, {1, 4, 7});
    CHECK(sub.n() == 3);
    CHECK(sub.dim() == 3);
    CHECK(sub.y[0] == set.y[1]);
    CHECK(sub.y[2] == set.y[7]);
    CHECK(sub.attributes.at("group")[1] == set.attributes.at("group")[4]);
    CHECK(sub.z.row(1).isApprox(set.z.row(4)));
    CHECK(sub.ids[2] == set.ids[7]);
}

TEST_CASE("dataset_hash: stable, content-sensitive") {
    EmbeddingSet a = make_set(20, 4, 1);
    EmbeddingSet b = make_set(20, 4, 1);
    CHECK(dataset_hash(a) == dataset_hash(b));
    b.z(0, 0) += 1e-9;
    CHECK(dataset_hash(a) != dataset_hash(b));
    b = make_set(20, 4, 1);
    b.y[0] ^= 1;
    CHECK(dataset_hash(a) != dataset_hash(b));
}

TEST_CASE("summarize is invariant to row permutation") {
    EmbeddingSet set = make_set(50, 3, 2);
    std::vector<int> perm(50);
    for (int i = 0; i < 50; ++i) perm[i] = i;
    std::mt19937_64 rng(9);
    std::shuffle(perm.begin(), perm.end(), rng);
    EmbeddingSet shuffled = take_rows(set, perm);
    SubgroupSummary s1 = summarize(set, "group");
    SubgroupSummary s2 = summarize(shuffled, "group");
    CHECK(s1.gamma == s2.gamma);
    CHECK(s1.counts == s2.counts);
}

TEST_CASE("attribute_groups: distinct ascending codes") {
    EmbeddingSet set = make_set(6, 2);
    set.attributes["multi"] = {3, 1, 2, 1, 3, 2};
    CHECK(attribute_groups(set, "multi") == std::vector<int>{1, 2, 3});
}

TEST_CASE("metric names round-trip") {
    for (MetricKind k : {MetricKind::loss, MetricKind::balanced_accuracy, MetricKind::auc,
                         MetricKind::accuracy})
        CHECK(metric_from_name(metric_name(k)) == k);
    CHECK_THROWS_AS(metric_from_name("bogus"), ConfigError);
}
