#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "latsep/errors.hpp"
#include "latsep/pca.hpp"
#include "latsep/types.hpp"

using namespace latsep;

namespace {

EmbeddingSet wrap(const Matrix& z) {
    EmbeddingSet set;
    set.z = z;
    set.y.assign(z.rows(), 0);
    std::vector<int> a(z.rows(), 0);
    for (int i = 0; i < z.rows(); ++i) {
        set.y[i] = i % 2;
        a[i] = (i / 2) % 2;
        set.ids.push_back(std::to_string(i));
    }
    set.attributes["group"] = a;
    return set;
}

Matrix random_matrix(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix z(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = gauss(rng);
    return z;
}

}  // namespace

TEST_CASE("rank-1 data: k = 1, component along e0, full variance") {
    Matrix z = Matrix::Zero(40, 4);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 40; ++i) z(i, 0) = gauss(rng);
    z.col(1).setConstant(2.0);  // constant coordinates carry no variance
    PcaModel m = fit_pca(wrap(z), 0.7);
    CHECK(m.k == 1);
    CHECK(std::abs(m.components(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(m.components(0, 1)) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(m.explained_variance(0) == doctest::Approx(m.total_variance));
}

TEST_CASE("isotropic 2-D sample at fraction 0.7 needs both components") {
    Matrix z = random_matrix(2000, 2, 5);
    EmbeddingSet set = wrap(z);
    PcaModel m = fit_pca(set, 0.7);
    // oracle: direct eigendecomposition of the sample covariance
    Matrix centered = z.rowwise() - z.colwise().mean();
    Matrix cov = centered.transpose() * centered / (z.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    const double top = es.eigenvalues().maxCoeff();
    const double total = es.eigenvalues().sum();
    REQUIRE(top / total < 0.7);  // isotropic: each axis near 0.5
    CHECK(m.k == 2);
    CHECK(m.explained_variance(0) == doctest::Approx(top).epsilon(1e-9));
    CHECK(m.total_variance == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("identical rows: DegenerateData") {
    Matrix z = Matrix::Constant(10, 3, 1.5);
    CHECK_THROWS_AS(fit_pca(wrap(z), 0.7), DegenerateData);
}

TEST_CASE("k = D back-projection reconstructs within 1e-6") {
    Matrix z = random_matrix(60, 5, 9);
    EmbeddingSet set = wrap(z);
    PcaModel m = fit_pca(set, 1.0);
    REQUIRE(m.k == 5);
    EmbeddingSet proj = project(m, set);
    Matrix back = proj.z * m.components;
    back.rowwise() += m.mean.transpose();
    CHECK((back - z).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("mean row projects to the zero vector") {
    Matrix z = random_matrix(30, 4, 2);
    EmbeddingSet set = wrap(z);
    PcaModel m = fit_pca(set, 1.0);
    Vector projected_mean = m.components * (m.mean - m.mean);
    // projecting the dataset mean itself
    EmbeddingSet one = wrap(Matrix(m.mean.transpose()));
    one.y = {0};
    one.attributes["group"] = {0};
    one.ids = {"0"};
    EmbeddingSet p = project(m, one);
    CHECK(p.z.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(projected_mean.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projected column variance equals explained_variance") {
    Matrix z = random_matrix(500, 6, 13);
    EmbeddingSet set = wrap(z);
    PcaModel m = fit_pca(set, 1.0);
    EmbeddingSet proj = project(m, set);
    for (int j = 0; j < m.k; ++j) {
        Vector col = proj.z.col(j);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / (col.size() - 1);
        CHECK(var == doctest::Approx(m.explained_variance(j)).epsilon(1e-6));
    }
}

TEST_CASE("components are orthonormal and variances non-increasing") {
    Matrix z = random_matrix(200, 7, 21);
    PcaModel m = fit_pca(wrap(z), 1.0);
    Matrix gram = m.components * m.components.transpose();
    CHECK((gram - Matrix::Identity(m.k, m.k)).cwiseAbs().maxCoeff() < 1e-9);
    for (int j = 1; j < m.k; ++j)
        CHECK(m.explained_variance(j) <= m.explained_variance(j - 1) + 1e-12);
}

TEST_CASE("k is monotone in the variance fraction") {
    Matrix z = random_matrix(300, 8, 17);
    // stretch axes so the spectrum is graded
    for (int j = 0; j < 8; ++j) z.col(j) *= (j + 1);
    EmbeddingSet set = wrap(z);
    int prev = 0;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0}) {
        const int k = fit_pca(set, f).k;
        CHECK(k >= prev);
        prev = k;
    }
    CHECK(prev == 8);
}

TEST_CASE("labels and attributes carried through projection") {
    Matrix z = random_matrix(20, 3, 8);
    EmbeddingSet set = wrap(z);
    PcaModel m = fit_pca(set, 0.7);
    EmbeddingSet proj = project(m, set);
    CHECK(proj.y == set.y);
    CHECK(proj.attributes == set.attributes);
    CHECK(proj.dim() == m.k);
}
