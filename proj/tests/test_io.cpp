#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "latsep/errors.hpp"
#include "latsep/harness.hpp"
#include "latsep/io.hpp"
#include "latsep/types.hpp"

using namespace latsep;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
    fs::path p = fs::temp_directory_path() / "latsep_io_test";
    fs::create_directories(p);
    return p;
}

EmbeddingSet random_set(int n, int d, std::uint64_t seed) {
    EmbeddingSet set;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    set.z.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) set.z(i, j) = gauss(rng);
    set.y.resize(n);
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        set.y[i] = static_cast<int>(rng() % 2);
        a[i] = static_cast<int>(rng() % 2);
        b[i] = static_cast<int>(rng() % 3);
        set.ids.push_back("r" + std::to_string(i));
    }
    // make sure each column has >= 2 groups
    a[0] = 0; a[1] = 1; b[0] = 0; b[1] = 1;
    set.y[0] = 0; set.y[1] = 1;
    set.attributes["sex"] = a;
    set.attributes["view"] = b;
    return set;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("load_csv: 3-row file with one attribute") {
    fs::path p = tmpdir() / "small.csv";
    std::ofstream(p) << "id,y,a_sex,z_0,z_1\n"
                        "p1,0,0,0.5,-1.25\n"
                        "p2,1,1,2.0,3.5\n"
                        "p3,0,1,-0.125,0.75\n";
    EmbeddingSet set = load_csv(p.string());
    CHECK(set.n() == 3);
    CHECK(set.dim() == 2);
    CHECK(set.attributes.size() == 1);
    CHECK(set.attributes.at("sex")[2] == 1);
    CHECK(set.z(1, 1) == doctest::Approx(3.5));
    CHECK(set.ids[0] == "p1");
}

TEST_CASE("load_csv: y = 2 on row 7 names row and column") {
    fs::path p = tmpdir() / "bady.csv";
    std::ofstream out(p);
    out << "id,y,a_sex,z_0\n";
    for (int i = 1; i <= 8; ++i)
        out << "p" << i << "," << (i == 7 ? 2 : i % 2) << "," << i % 2 << ",0." << i << "\n";
    out.close();
    try {
        load_csv(p.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("row 7") != std::string::npos);
        CHECK(msg.find("'y'") != std::string::npos);
    }
}

TEST_CASE("load_csv: schema violations") {
    fs::path p = tmpdir() / "schema.csv";
    std::ofstream(p) << "id,z_0\np1,0.5\n";
    CHECK_THROWS_AS(load_csv(p.string()), SchemaError);
    std::ofstream(p) << "id,y,z_1\np1,0,0.5\n";
    CHECK_THROWS_AS(load_csv(p.string()), SchemaError);
}

TEST_CASE("csv round-trip: identity within 1e-9") {
    EmbeddingSet set = random_set(40, 5, 11);
    fs::path p = tmpdir() / "round.csv";
    save_csv(set, p.string());
    EmbeddingSet back = load_csv(p.string());
    REQUIRE(back.n() == set.n());
    REQUIRE(back.dim() == set.dim());
    CHECK((back.z - set.z).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(back.y == set.y);
    CHECK(back.attributes == set.attributes);
    CHECK(back.ids == set.ids);
}

TEST_CASE("binary: payload size is exactly n*d*4 + n + n*#attributes") {
    EmbeddingSet set = random_set(2, 3, 5);
    fs::path stem = tmpdir() / "tiny";
    save_binary(set, stem.string());
    CHECK(fs::file_size(stem.string() + ".bin") == 24 + 2 + 2 * 2);
}

TEST_CASE("binary round-trip: bitwise-identical matrix") {
    EmbeddingSet set = random_set(30, 4, 6);
    // binary stores float32; freeze the payload first so the round trip is exact
    for (int i = 0; i < set.n(); ++i)
        for (int j = 0; j < set.dim(); ++j)
            set.z(i, j) = static_cast<float>(set.z(i, j));
    fs::path stem = tmpdir() / "bits";
    save_binary(set, stem.string());
    EmbeddingSet back = load_binary(stem.string());
    CHECK(back.z == set.z);
    CHECK(back.y == set.y);
    CHECK(back.attributes == set.attributes);
    save_binary(back, (tmpdir() / "bits2").string());
    CHECK(slurp(stem.string() + ".bin") == slurp((tmpdir() / "bits2").string() + ".bin"));
}

TEST_CASE("binary: truncated payload -> SizeMismatch, bad version -> VersionError") {
    EmbeddingSet set = random_set(10, 3, 7);
    fs::path stem = tmpdir() / "trunc";
    save_binary(set, stem.string());
    fs::resize_file(stem.string() + ".bin", 10);
    CHECK_THROWS_AS(load_binary(stem.string()), SizeMismatch);

    save_binary(set, stem.string());
    nlohmann::json header = read_json_file(stem.string() + ".json");
    header["format_version"] = 99;
    write_json_file(header, stem.string() + ".json");
    CHECK_THROWS_AS(load_binary(stem.string()), VersionError);
}

TEST_CASE("separation report: tv value survives to JSON") {
    SeparationReport r;
    r.attribute = "view";
    r.epsilon_tv = 0.17;
    r.per_class_tv = {{0, 0.15}, {1, 0.19}};
    r.wd = 0.2;
    r.fd = 1.5;
    r.k = 3;
    nlohmann::json j = to_json(r);
    CHECK(j["tv"].get<double>() == doctest::Approx(0.17));
    SeparationReport back = separation_from_json(j);
    CHECK(back.attribute == "view");
    CHECK(back.epsilon_tv == doctest::Approx(0.17));
    CHECK(back.per_class_tv.at(1) == doctest::Approx(0.19));
}

TEST_CASE("reports saved twice are byte-identical") {
    SeparationReport r;
    r.attribute = "sex";
    r.epsilon_tv = 1.0 / 3.0;
    r.wd = 0.125;
    fs::path a = tmpdir() / "rep_a.json";
    fs::path b = tmpdir() / "rep_b.json";
    save_report(r, a.string(), ReportFormat::json);
    save_report(r, b.string(), ReportFormat::json);
    CHECK(slurp(a) == slurp(b));
    save_report(r, a.string(), ReportFormat::csv);
    save_report(r, b.string(), ReportFormat::csv);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("empty sweep -> CSV with header row only") {
    SweepResult sweep;
    sweep.attribute = "sex";
    fs::path p = tmpdir() / "empty_sweep.csv";
    save_report(sweep, p.string(), ReportFormat::csv);
    std::string content = slurp(p);
    CHECK(content == "attribute,group,allocation,seed,metric,value,n\n");
}

TEST_CASE("sweep JSON round-trip preserves runs and spec") {
    SweepResult sweep;
    sweep.attribute = "sex";
    sweep.spec.attribute = "sex";
    sweep.spec.budget = 100;
    sweep.spec.grid = {0.0, 0.5, 1.0};
    sweep.spec.seeds = {3, 4};
    sweep.dataset_hash = 12345;
    sweep.eval_hash = 678;
    RunRecord run;
    run.alpha = 0.5;
    run.seed = 3;
    run.cell_counts = {{"y0_a0", 30}, {"y1_a1", 20}};
    run.realized_py = 0.2;
    run.overall = {0.4, 0.8, 0.85, 0.81, 200};
    run.per_group["sex"][0] = {0.5, 0.7, 0.75, 0.71, 90};
    run.per_group["sex"][1] = {0.3, 0.9, 0.95, 0.91, 110};
    sweep.runs.push_back(run);
    SweepResult back = sweep_from_json(to_json(sweep));
    CHECK(back.spec.grid == sweep.spec.grid);
    CHECK(back.runs.size() == 1);
    CHECK(back.runs[0].cell_counts == run.cell_counts);
    CHECK(back.runs[0].per_group.at("sex").at(1).auc == doctest::Approx(0.95));
    CHECK(back.dataset_hash == 12345);
}

TEST_CASE("run_id: stable and seed-sensitive") {
    nlohmann::json config = {{"command", "separation"}, {"bins", 50}};
    CHECK(run_id(config, 1) == run_id(config, 1));
    CHECK(run_id(config, 1) != run_id(config, 2));
    nlohmann::json other = config;
    other["bins"] = 51;
    CHECK(run_id(config, 1) != run_id(other, 1));
    CHECK(run_id(config, 1).size() == 16);
}

TEST_CASE("format_sig9: nine significant digits") {
    CHECK(format_sig9(0.123456789123) == "0.123456789");
    CHECK(format_sig9(1.0) == "1");
    CHECK(format_sig9(-2.5e-7) == "-2.5e-07");
}
