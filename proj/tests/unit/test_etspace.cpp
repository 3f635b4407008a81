#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "eigentraj/dataset.hpp"
#include "eigentraj/errors.hpp"
#include "eigentraj/etspace.hpp"
#include "synthetic.hpp"

using namespace eigentraj;
using namespace eigentraj::etspace;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = g(rng);
  return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

dataset::TrajectoryMatrix stack(Matrix m) { return {std::move(m), Segment::observation, Layout::interleaved}; }

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double frobenius_residual(const ETBasis& basis, const Matrix& a) {
  double sq = 0.0;
  for (std::size_t n = 0; n < a.cols(); ++n) {
    const auto col = a.column(n);
    const auto rec = reconstruct(basis, project(basis, col));
    for (std::size_t i = 0; i < col.size(); ++i) sq += (col[i] - rec[i]) * (col[i] - rec[i]);
  }
  return std::sqrt(sq);
}

std::vector<Tracklet> straight_corpus(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Tracklet> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Path p = testing::straight_path({5 * u(rng), 5 * u(rng)}, {0.3 * u(rng), 0.3 * u(rng)}, 20);
    Tracklet t;
    t.obs.assign(p.begin(), p.begin() + 8);
    t.fut.assign(p.begin() + 8, p.end());
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("eigendecomposition of the identity") {
  const auto e = symmetric_eigendecomposition(Matrix::identity(3));
  CHECK(e.values == std::vector<double>{1.0, 1.0, 1.0});
  const Eigen::MatrixXd v = to_eigen(e.vectors);
  CHECK(max_abs(v.transpose() * v - Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
}

TEST_CASE("eigendecomposition of a diagonal matrix sorts descending") {
  Matrix d(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto e = symmetric_eigendecomposition(d);
  CHECK(e.values == std::vector<double>{3.0, 2.0, 1.0});
  CHECK(std::abs(e.vectors(0, 0)) == 1.0);
  CHECK(std::abs(e.vectors(2, 1)) == 1.0);
  CHECK(std::abs(e.vectors(1, 2)) == 1.0);
}

TEST_CASE("random symmetric 16x16 reconstructs from its eigenpairs") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix b = random_matrix(rng, 16, 16);
    Matrix g(16, 16);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) g(i, j) = b(i, j) + b(j, i);
    const auto e = symmetric_eigendecomposition(g);
    const Eigen::MatrixXd v = to_eigen(e.vectors);
    Eigen::VectorXd lambda(16);
    for (int i = 0; i < 16; ++i) lambda(i) = e.values[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd ge = to_eigen(g);
    CHECK(max_abs(v * lambda.asDiagonal() * v.transpose() - ge) < 1e-8 * ge.norm());
    CHECK(max_abs(v.transpose() * v - Eigen::MatrixXd::Identity(16, 16)) < 1e-9);
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    for (int i = 0; i < 16; ++i) CHECK((ge * v.col(i) - lambda(i) * v.col(i)).norm() < 1e-8 * ge.norm());
  }
}

TEST_CASE("eigendecomposition rejects asymmetric and non-square input") {
  Matrix a = Matrix::identity(3);
  a(0, 2) = 0.5;
  try {
    symmetric_eigendecomposition(a);
    FAIL("expected an argument error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::argument);
  }
  CHECK_THROWS_AS(symmetric_eigendecomposition(Matrix(2, 3)), Error);
  a(0, 2) = a(2, 0) + 1e-12;  // inside the symmetry tolerance
  CHECK_NOTHROW(symmetric_eigendecomposition(a));
}

TEST_CASE("rank-1 corpus yields its column as u1") {
  std::mt19937_64 rng(2);
  std::vector<double> a(16);
  std::normal_distribution<double> g;
  double norm = 0.0;
  for (double& v : a) {
    v = g(rng);
    norm += v * v;
  }
  for (double& v : a) v /= std::sqrt(norm);
  const std::size_t n = 9;
  Matrix m(16, n);
  for (std::size_t j = 0; j < n; ++j) m.set_column(j, a);
  const ETBasis basis = fit_descriptor(stack(m), 1);
  CHECK(basis.singular_values()[0] == doctest::Approx(std::sqrt(double(n))).epsilon(1e-12));
  double dot = 0.0;
  for (std::size_t i = 0; i < 16; ++i) dot += basis.vector(0)[i] * a[i];
  CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-12));
  // sign convention: largest-magnitude entry is positive
  const auto u = basis.vector(0);
  const auto it = std::max_element(u.begin(), u.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  CHECK(*it > 0.0);
  for (std::size_t i = 1; i < basis.singular_values().size(); ++i) CHECK(basis.singular_values()[i] == 0.0);
}

TEST_CASE("full rank reconstruction is exact") {
  std::mt19937_64 rng(3);
  const Matrix m = random_matrix(rng, 16, 40);
  const ETBasis basis = fit_descriptor(stack(m), 16);
  CHECK(frobenius_residual(basis, m) < 1e-8);
}

TEST_CASE("Eckart-Young on a 16x50 matrix at k=6") {
  std::mt19937_64 rng(4);
  const Matrix m = random_matrix(rng, 16, 50);
  const ETBasis basis = fit_descriptor(stack(m), 6);
  double tail = 0.0;
  for (std::size_t i = 6; i < basis.singular_values().size(); ++i)
    tail += basis.singular_values()[i] * basis.singular_values()[i];
  CHECK(std::abs(frobenius_residual(basis, m) - std::sqrt(tail)) < 1e-8);
  CHECK(basis.singular_values().size() == 16);
}

TEST_CASE("fitted bases agree with a dense SVD oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> rows_d(1, 8), cols_d(1, 32);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t l = 2 * rows_d(rng);
    const std::size_t n = cols_d(rng);
    const Matrix m = random_matrix(rng, l, n);
    const std::size_t k = 1 + static_cast<std::size_t>(trial) % std::min(l, n);
    const ETBasis basis = fit_descriptor(stack(m), k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      CHECK(basis.singular_values()[static_cast<std::size_t>(i)] == doctest::Approx(s(i)).epsilon(1e-9).scale(s(0)));
    const double next = static_cast<Eigen::Index>(k) < s.size() ? s(static_cast<Eigen::Index>(k)) : 0.0;
    if (s(static_cast<Eigen::Index>(k) - 1) > next + 1e-8) {
      const Eigen::MatrixXd uo = svd.matrixU().leftCols(static_cast<Eigen::Index>(k));
      const Eigen::MatrixXd u = to_eigen(basis.u());
      CHECK(max_abs(u * u.transpose() - uo * uo.transpose()) < 1e-7);
    }
  }
}

TEST_CASE("bases are orthonormal") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const ETBasis basis = fit_descriptor(stack(random_matrix(rng, 24, 30)), 1 + trial % 24);
    const Eigen::MatrixXd u = to_eigen(basis.u());
    CHECK(max_abs(u.transpose() * u - Eigen::MatrixXd::Identity(u.cols(), u.cols())) < 1e-9);
  }
}

TEST_CASE("fit_descriptor argument checks") {
  std::mt19937_64 rng(7);
  const Matrix m = random_matrix(rng, 16, 5);
  CHECK_THROWS_AS(fit_descriptor(stack(m), 0), Error);
  try {
    fit_descriptor(stack(m), 6);  // k > min(L, N)
    FAIL("expected an argument error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::argument);
  }
  Matrix bad = m;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(fit_descriptor(stack(bad), 2), Error);
}

TEST_CASE("project and reconstruct") {
  std::mt19937_64 rng(8);
  const ETBasis basis = fit_descriptor(stack(random_matrix(rng, 16, 40)), 6);
  const std::vector<double> u1(basis.vector(0).begin(), basis.vector(0).end());
  const auto c = project(basis, u1).values;
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < 6; ++i) CHECK(std::abs(c[i]) < 1e-12);

  // component orthogonal to the basis
  const ETBasis full = fit_descriptor(stack(random_matrix(rng, 16, 40)), 16);
  const ETBasis head = full.truncated(6);
  const std::vector<double> u9(full.vector(9).begin(), full.vector(9).end());
  for (double v : project(head, u9).values) CHECK(std::abs(v) < 1e-12);

  const std::vector<double> zero(6, 0.0);
  for (double v : reconstruct(basis, zero)) CHECK(v == 0.0);

  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(16);
    for (double& v : s) v = g(rng);
    const auto cs = project(basis, s).values;
    double cn = 0.0, sn = 0.0;
    for (double v : cs) cn += v * v;
    for (double v : s) sn += v * v;
    CHECK(cn <= sn + 1e-12);
    // segment inside the span: equality
    const auto in_span = reconstruct(basis, cs);
    double in_n = 0.0;
    for (double v : in_span) in_n += v * v;
    CHECK(in_n == doctest::Approx(cn).epsilon(1e-12));
    const auto back = reconstruct(basis, project(basis, in_span));
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(back[i] - in_span[i]) < 1e-9);
  }
  CHECK_THROWS_AS(project(basis, std::vector<double>(14)), Error);
  CHECK_THROWS_AS(reconstruct(basis, std::vector<double>(5)), Error);
  Coefficients wrong{std::vector<double>(6), Segment::prediction};
  CHECK_THROWS_AS(reconstruct(basis, wrong), Error);
}

TEST_CASE("rank-k reconstruction is the least-squares solution in the span") {
  std::mt19937_64 rng(9);
  const ETBasis basis = fit_descriptor(stack(random_matrix(rng, 16, 40)), 5);
  const Eigen::MatrixXd u = to_eigen(basis.u());
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd s(16);
    for (int i = 0; i < 16; ++i) s(i) = g(rng);
    const Eigen::VectorXd coeff = u.colPivHouseholderQr().solve(s);
    const Eigen::VectorXd oracle = u * coeff;
    const std::vector<double> sv(s.data(), s.data() + 16);
    const auto rec = reconstruct(basis, project(basis, sv));
    for (int i = 0; i < 16; ++i) CHECK(std::abs(rec[static_cast<std::size_t>(i)] - oracle(i)) < 1e-9);
  }
}

TEST_CASE("isometry between coefficient and Euclidean distances") {
  std::mt19937_64 rng(10);
  const ETBasis basis = fit_descriptor(stack(random_matrix(rng, 24, 50)), 6);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(6), b(6);
    for (double& v : a) v = g(rng);
    for (double& v : b) v = g(rng);
    const auto ra = reconstruct(basis, a), rb = reconstruct(basis, b);
    double de = 0.0, dc = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) de += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    for (std::size_t i = 0; i < 6; ++i) dc += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(std::abs(std::sqrt(de) - std::sqrt(dc)) < 1e-9);
  }
}

TEST_CASE("centered fit stores and applies the mean") {
  std::mt19937_64 rng(11);
  Matrix m = random_matrix(rng, 8, 30);
  for (std::size_t j = 0; j < 30; ++j) m(0, j) += 10.0;
  const ETBasis plain = fit_descriptor(stack(m), 2);
  const ETBasis centered = fit_descriptor(stack(m), 2, FitOptions{true});
  CHECK_FALSE(plain.centered());
  REQUIRE(centered.centered());
  CHECK(centered.mean()[0] == doctest::Approx(10.0).epsilon(0.1));
  // the mean itself projects to zero and reconstructs exactly
  for (double v : project(centered, centered.mean()).values) CHECK(std::abs(v) < 1e-12);
  const auto back = reconstruct(centered, std::vector<double>(2, 0.0));
  CHECK(back == centered.mean());
}

TEST_CASE("frame names") {
  CHECK(to_string(Frame::last_observed) == "last-observed");
  CHECK(parse_frame("absolute") == Frame::absolute);
  CHECK_THROWS_AS(parse_frame("world"), Error);
}

TEST_CASE("straight constant-speed lines need two dimensions") {
  std::mt19937_64 rng(12);
  const auto corpus = straight_corpus(rng, 60);
  const DescriptorPair pair = fit_pair(corpus, {2, Frame::last_observed, Layout::interleaved, false}, "lines");
  const auto err = approximation_error(pair, corpus);
  CHECK(err.obs_mm < 1e-6);
  CHECK(err.pred_mm < 1e-6);
  CHECK(pair.obs.segment() == Segment::observation);
  CHECK(pair.pred.segment() == Segment::prediction);
  CHECK(pair.provenance == "lines");
  // in absolute coordinates the same lines span four dimensions
  const DescriptorPair abs2 = fit_pair(corpus, {2, Frame::absolute, Layout::interleaved, false}, "");
  CHECK(approximation_error(abs2, corpus).pred_mm > 1.0);
  const DescriptorPair abs4 = fit_pair(corpus, {4, Frame::absolute, Layout::interleaved, false}, "");
  CHECK(approximation_error(abs4, corpus).pred_mm < 1e-6);
}

TEST_CASE("approximation error vanishes at full rank and falls with k") {
  testing::TempDir dir("approx");
  testing::write_corpus(dir.path());
  const auto corpus = dataset::load_scene(dir.path(), "univ", {}, {}).tracklets;
  const DescriptorPair full = fit_pair(corpus, {24, Frame::absolute, Layout::interleaved, false}, "", true);
  CHECK(full.obs.rank() == 16);
  CHECK(full.pred.rank() == 24);
  const auto zero = approximation_error(full, corpus);
  CHECK(zero.obs_mm < 1e-6);
  CHECK(zero.pred_mm < 1e-6);

  const DescriptorPair lo = fit_pair(corpus, {16, Frame::last_observed, Layout::interleaved, false}, "");
  double prev_obs = 1e300, prev_pred = 1e300;
  for (std::size_t k = 1; k <= 16; ++k) {
    const auto e = approximation_error(truncated(lo, k), corpus);
    CHECK(e.obs_mm <= prev_obs + 1e-9);
    CHECK(e.pred_mm <= prev_pred + 1e-9);
    prev_obs = e.obs_mm;
    prev_pred = e.pred_mm;
  }
  CHECK_THROWS_AS(lo.obs.truncated(17), Error);
}

TEST_CASE("planar layout yields the same errors as interleaved") {
  std::mt19937_64 rng(13);
  std::vector<Tracklet> corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back(testing::random_tracklet(rng));
  const auto a = approximation_error(fit_pair(corpus, {4, Frame::last_observed, Layout::interleaved, false}, ""), corpus);
  const auto b = approximation_error(fit_pair(corpus, {4, Frame::last_observed, Layout::planar, false}, ""), corpus);
  CHECK(a.obs_mm == doctest::Approx(b.obs_mm).epsilon(1e-9));
  CHECK(a.pred_mm == doctest::Approx(b.pred_mm).epsilon(1e-9));
}
