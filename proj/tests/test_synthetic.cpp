#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latsep/errors.hpp"
#include "latsep/separation.hpp"
#include "latsep/synthetic.hpp"
#include "latsep/types.hpp"

using namespace latsep;

TEST_CASE("generate: s = 0, phi = 0 matches the random baseline") {
    SynthConfig c;
    c.n = 4000;
    c.seed = 3;
    EmbeddingSet set = generate(c);
    const double tv_attr = tv_distance(set, "group").epsilon_tv;
    // seed-std of the random-attribute TV across a few seeds
    std::vector<double> tv_random;
    for (std::uint64_t s : {3ULL, 4ULL, 5ULL, 6ULL}) {
        SynthConfig cc = c;
        cc.seed = s;
        tv_random.push_back(tv_distance(generate(cc), "random").epsilon_tv);
    }
    double mean = 0.0, var = 0.0;
    for (double v : tv_random) mean += v;
    mean /= tv_random.size();
    for (double v : tv_random) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (tv_random.size() - 1));
    CHECK(std::abs(tv_attr - mean) <= 2.0 * sd + 0.02);
}

TEST_CASE("generate: entanglement raises TV well above the random baseline") {
    SynthConfig c;
    c.n = 4000;
    c.seed = 5;
    c.entanglement_angle = M_PI / 3.0;
    c.noise_std = 0.3;
    c.d = 3;  // all coordinates carry signal; TV is a mean over dimensions
    EmbeddingSet set = generate(c);
    const double tv_attr = tv_distance(set, "group").epsilon_tv;
    const double tv_random = tv_distance(set, "random").epsilon_tv;
    CHECK(tv_attr - tv_random >= 0.1);
}

TEST_CASE("generate: balanced config yields balanced summary") {
    SynthConfig c;
    c.n = 8000;
    c.seed = 11;
    EmbeddingSet set = generate(c);
    SubgroupSummary s = summarize(set, "group");
    CHECK(s.gamma.at(0) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(s.gamma.at(1) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(s.class_given_group.at(0) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(s.class_given_group.at(1) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("generate: deterministic per seed, valid output") {
    SynthConfig c;
    c.n = 500;
    c.seed = 21;
    c.attribute_offset = 0.5;
    EmbeddingSet a = generate(c);
    EmbeddingSet b = generate(c);
    CHECK(dataset_hash(a) == dataset_hash(b));
    CHECK(validate(a).empty());
    c.seed = 22;
    CHECK(dataset_hash(a) != dataset_hash(generate(c)));
}

TEST_CASE("generate: config validation") {
    SynthConfig c;
    c.d = 2;
    c.entanglement_angle = 0.5;
    CHECK_THROWS_AS(generate(c), ConfigError);
    c = {};
    c.noise_std = 0.0;
    CHECK_THROWS_AS(generate(c), ConfigError);
    c = {};
    c.class_balance = 1.0;
    CHECK_THROWS_AS(generate(c), ConfigError);
}

TEST_CASE("battery: single entry mirrors generate plus random column") {
    SynthConfig base;
    base.n = 2000;
    base.seed = 7;
    EmbeddingSet set = battery(base, {{"only", 0.8, 0.6}});
    CHECK(set.attributes.size() == 2);
    CHECK(set.has_attribute("only"));
    CHECK(set.has_attribute("random"));
    CHECK(validate(set).empty());
    CHECK(tv_distance(set, "only").epsilon_tv > tv_distance(set, "random").epsilon_tv);
}

TEST_CASE("battery: monotone offsets give increasing TVs") {
    const std::vector<double> offsets = {0.0, 0.5, 1.0, 2.0};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        SynthConfig base;
        base.n = 4000;
        base.seed = seed;
        std::vector<BatteryEntry> entries;
        for (size_t i = 0; i < offsets.size(); ++i)
            entries.push_back({"s" + std::to_string(i), offsets[i], 0.0});
        EmbeddingSet set = battery(base, entries);
        double prev = -1.0;
        for (size_t i = 0; i < offsets.size(); ++i) {
            const double tv = tv_distance(set, "s" + std::to_string(i)).epsilon_tv;
            if (i > 0) CHECK(tv > prev);
            prev = tv;
        }
    }
}

TEST_CASE("battery: duplicate names rejected") {
    SynthConfig base;
    base.n = 100;
    CHECK_THROWS_AS(battery(base, {{"x", 0.1, 0.0}, {"x", 0.2, 0.0}}), ConfigError);
    CHECK_THROWS_AS(battery(base, {}), ConfigError);
}

TEST_CASE("presets: names, columns, determinism") {
    for (const auto& name : preset_names()) {
        EmbeddingSet set = make_preset(name, 1000, 1);
        CHECK(validate(set).empty());
        CHECK(set.has_attribute("random"));
    }
    EmbeddingSet mnist = make_preset("mnist-like", 1000, 1);
    CHECK(mnist.has_attribute("colour"));
    CHECK(mnist.has_attribute("digit"));
    EmbeddingSet graded = make_preset("graded-battery", 1000, 1, 8);
    CHECK(graded.attributes.size() == 9);  // 8 graded + random
    CHECK(dataset_hash(make_preset("entangled", 500, 4)) ==
          dataset_hash(make_preset("entangled", 500, 4)));
    CHECK_THROWS_AS(make_preset("nope", 100, 1), ConfigError);
    CHECK_THROWS_AS(make_preset("graded-battery", 100, 1, 2), ConfigError);
}

TEST_CASE("presets: invariant attribute is near the random baseline") {
    EmbeddingSet set = make_preset("invariant", 6000, 9);
    const double tv_attr = tv_distance(set, "group").epsilon_tv;
    const double tv_random = tv_distance(set, "random").epsilon_tv;
    CHECK(std::abs(tv_attr - tv_random) < 0.05);
}

TEST_CASE("presets: entangled attribute separates strongly") {
    EmbeddingSet set = make_preset("entangled", 6000, 9);
    CHECK(tv_distance(set, "group").epsilon_tv >
          tv_distance(set, "random").epsilon_tv + 0.05);
}
