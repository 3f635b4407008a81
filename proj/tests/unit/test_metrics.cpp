#include <cmath>
#include <random>

#include "doctest.h"
#include "eigentraj/errors.hpp"
#include "eigentraj/metrics.hpp"
#include "eigentraj/path_ops.hpp"
#include "synthetic.hpp"

using namespace eigentraj;
using namespace eigentraj::metrics;

namespace {

Path offset(const Path& p, Point2 d) {
  Path out = p;
  for (Point2& q : out) q = q + d;
  return out;
}

double brute_ade(const PredictionSet& pred, const Path& gt) {
  double best = 1e300;
  for (const Path& s : pred.samples) {
    double sum = 0.0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
      const double dx = s[t].x - gt[t].x;
      const double dy = s[t].y - gt[t].y;
      sum += std::sqrt(dx * dx + dy * dy);
    }
    best = std::min(best, sum / static_cast<double>(gt.size()));
  }
  return best;
}

double brute_fde(const PredictionSet& pred, const Path& gt) {
  double best = 1e300;
  for (const Path& s : pred.samples) best = std::min(best, std::hypot(s.back().x - gt.back().x, s.back().y - gt.back().y));
  return best;
}

double two_pass_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double c = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0 || vb == 0) return 0;
  return c / std::sqrt(va) / std::sqrt(vb);
}

PredictionSet random_set(std::mt19937_64& rng, std::size_t s, std::size_t frames) {
  PredictionSet p;
  for (std::size_t i = 0; i < s; ++i) p.samples.push_back(testing::random_walk(rng, frames));
  return p;
}

}  // namespace

TEST_CASE("ade and fde examples") {
  const Path gt = testing::straight_path({0, 0}, {0.5, 0.2}, 12);
  CHECK(ade({{gt}}, gt) == 0.0);
  CHECK(ade({{offset(gt, {0.3, 0.4})}}, gt) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fde({{offset(gt, {5, 5}), gt}}, gt) == 0.0);

  Path a = gt, b = offset(gt, {2, 0});
  a.back() = gt.back() + Point2{0.0, 1.0};
  b.back() = gt.back() + Point2{-1.0, 0.0};
  CHECK(fde({{a, b}}, gt) == 1.0);

  CHECK_THROWS_AS(ade({{Path(11)}}, gt), Error);
  try {
    fde({{Path(11)}}, gt);
    FAIL("expected a shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
  CHECK_THROWS_AS(ade(PredictionSet{}, gt), Error);
}

TEST_CASE("ade and fde equal brute force on random sets") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = 1 + rng() % 20;
    const Path gt = testing::random_walk(rng, 12);
    const PredictionSet p = random_set(rng, s, 12);
    CHECK(ade(p, gt) == brute_ade(p, gt));
    CHECK(fde(p, gt) == brute_fde(p, gt));
    CHECK(ade(p, gt) >= 0.0);
    CHECK(mean_point_distance(p.samples[best_sample(p, gt)], gt) == ade(p, gt));
  }
}

TEST_CASE("ade and fde are invariant to rigid motion") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Path gt = testing::random_walk(rng, 12);
    const PredictionSet p = random_set(rng, 5, 12);
    const Similarity m{3.14159 * u(rng), 1.0, {20 * u(rng), 20 * u(rng)}};
    PredictionSet q;
    for (const Path& s : p.samples) q.samples.push_back(m.apply(s));
    CHECK(std::abs(ade(q, m.apply(gt)) - ade(p, gt)) < 1e-9);
    CHECK(std::abs(fde(q, m.apply(gt)) - fde(p, gt)) < 1e-9);
  }
}

TEST_CASE("tcc examples") {
  std::mt19937_64 rng(3);
  const Path gt = testing::random_walk(rng, 12);
  CHECK(tcc({{gt}}, gt) == doctest::Approx(1.0).epsilon(1e-14));

  Point2 mean{};
  for (Point2 p : gt) mean = mean + (1.0 / 12.0) * p;
  Path mirrored;
  for (Point2 p : gt) mirrored.push_back(2.0 * mean - p);
  CHECK(tcc_path(mirrored, gt) == doctest::Approx(-1.0).epsilon(1e-14));

  // x constant: that axis contributes 0
  const Path vertical = testing::straight_path({1, 0}, {0, 1}, 12);
  CHECK(tcc_path(vertical, vertical) == doctest::Approx(0.5));
  CHECK(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}) == 0.0);
}

TEST_CASE("tcc matches a direct Pearson computation") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Path a = testing::random_walk(rng, 12);
    const Path b = testing::random_walk(rng, 12);
    std::vector<double> ax, ay, bx, by;
    for (std::size_t t = 0; t < 12; ++t) {
      ax.push_back(a[t].x);
      ay.push_back(a[t].y);
      bx.push_back(b[t].x);
      by.push_back(b[t].y);
    }
    const double expected = 0.5 * (two_pass_pearson(ax, bx) + two_pass_pearson(ay, by));
    CHECK(std::abs(tcc_path(a, b) - expected) < 1e-12);
    CHECK(std::abs(tcc_path(a, b)) <= 1.0);
  }
}

TEST_CASE("col examples") {
  const Path a = testing::straight_path({0, 0}, {0.4, 0}, 12);
  const Path b = offset(a, {0, 1});
  const std::vector<Path> gts{a, b};
  const std::vector<PredictionSet> parallel{{{a}}, {{b}}};
  CHECK(*col(parallel, gts, {}) == 0.0);
  const std::vector<PredictionSet> same{{{a}}, {{a}}};
  CHECK(*col(same, std::vector<Path>{a, a}, {}) == 100.0);
  const std::vector<PredictionSet> alone{{{a}}};
  CHECK(!col(alone, std::vector<Path>{a}, {}).has_value());
  CHECK_THROWS_AS(col(parallel, std::vector<Path>{a}, {}), Error);
}

TEST_CASE("col matches an exhaustive pairwise check") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t peds = 2 + rng() % 9;
    const std::size_t s = 1 + rng() % 20;
    std::vector<PredictionSet> preds;
    std::vector<Path> gts;
    for (std::size_t i = 0; i < peds; ++i) {
      // crossing walkers through a shared region
      const Point2 start{3 * u(rng), 3 * u(rng)};
      gts.push_back(testing::straight_path(start, {-0.5 * start.x, -0.5 * start.y}, 12));
      PredictionSet p;
      for (std::size_t k = 0; k < s; ++k)
        p.samples.push_back(testing::straight_path(start, {-0.5 * start.x + 0.1 * u(rng), -0.5 * start.y + 0.1 * u(rng)}, 12));
      preds.push_back(p);
    }
    for (double threshold : {0.05, 0.1, 0.3}) {
      std::size_t hits = 0, cases = 0, hits_all = 0, cases_all = 0;
      for (std::size_t i = 0; i < peds; ++i)
        for (std::size_t j = i + 1; j < peds; ++j) {
          const Path& pi = preds[i].samples[best_sample(preds[i], gts[i])];
          const Path& pj = preds[j].samples[best_sample(preds[j], gts[j])];
          bool hit = false;
          for (std::size_t t = 0; t < 12; ++t) hit = hit || std::hypot(pi[t].x - pj[t].x, pi[t].y - pj[t].y) < threshold;
          ++cases;
          hits += hit;
          for (const Path& x : preds[i].samples)
            for (const Path& y : preds[j].samples) {
              bool h = false;
              for (std::size_t t = 0; t < 12; ++t) h = h || std::hypot(x[t].x - y[t].x, x[t].y - y[t].y) < threshold;
              ++cases_all;
              hits_all += h;
            }
        }
      const ColCount c = col_count(preds, gts, {threshold, false});
      CHECK(c.colliding == hits);
      CHECK(c.cases == cases);
      const ColCount all = col_count(preds, gts, {threshold, true});
      CHECK(all.colliding == hits_all);
      CHECK(all.cases == cases_all);
    }
    // symmetric in pedestrian order, monotone in threshold
    std::vector<PredictionSet> rp(preds.rbegin(), preds.rend());
    std::vector<Path> rg(gts.rbegin(), gts.rend());
    CHECK(col_count(rp, rg, {}).colliding == col_count(preds, gts, {}).colliding);
    CHECK(*col(preds, gts, {0.05, false}) <= *col(preds, gts, {0.5, false}));
  }
}

TEST_CASE("loss examples and identities") {
  Matrix cand(2, 2);
  cand(0, 0) = 1;
  cand(1, 1) = 1;
  CHECK(loss_coeff(cand, std::vector<double>{0, 0}) == 1.0);
  CHECK(loss_coeff(cand, std::vector<double>{1, 0}) == 0.0);
  CHECK_THROWS_AS(loss_coeff(cand, std::vector<double>{0, 0, 0}), Error);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix c(20, 6);
    for (double& v : c.data()) v = g(rng);
    std::vector<double> gt(6);
    for (double& v : gt) v = g(rng);
    double best = 1e300;
    for (std::size_t i = 0; i < 20; ++i) {
      double s = 0;
      for (std::size_t d = 0; d < 6; ++d) s += (c(i, d) - gt[d]) * (c(i, d) - gt[d]);
      best = std::min(best, std::sqrt(s));
    }
    CHECK(loss_coeff(c, gt) == best);

    const Path truth = testing::random_walk(rng, 12);
    const std::vector<PredictionSet> one{random_set(rng, 20, 12)};
    const std::vector<Path> gts{truth};
    CHECK(loss_dist(one, gts) == ade(one[0], truth));
    CHECK(loss_end(one, gts) == fde(one[0], truth));
  }
  const Path truth = testing::random_walk(rng, 12);
  const std::vector<PredictionSet> exact{{{truth}}};
  CHECK(loss_dist(exact, std::vector<Path>{truth}) == 0.0);
  CHECK(loss_end(exact, std::vector<Path>{truth}) == 0.0);

  const LossReport r = combine_losses(1.0, 2.0, 3.0, 0.5, 2.0);
  CHECK(r.total == 1.0 + 0.5 * 2.0 + 2.0 * 3.0);
  CHECK(combine_losses(1, 2, 3).total == 6.0);
}

TEST_CASE("nonlinearity classification") {
  CHECK_FALSE(classify_nonlinear(testing::straight_path({2, 1}, {0.3, -0.2}, 12)));
  Path turn;
  for (int t = 0; t <= 6; ++t) turn.push_back({t / 6.0, 0.0});
  for (int t = 1; t <= 5; ++t) turn.push_back({1.0, t / 5.0});
  REQUIRE(turn.size() == 12);
  CHECK(classify_nonlinear(turn));

  // the line-fit error is linear in a scaling of the path, so a bent path can be
  // scaled to sit exactly on the threshold
  const double e = linear_fit_error(turn);
  for (double eps : {1e-6, -1e-6}) {
    Path scaled;
    for (Point2 p : turn) scaled.push_back((0.02 * (1 + eps) / e) * p);
    CHECK(classify_nonlinear(scaled) == (eps > 0));
  }
}

TEST_CASE("evaluate groups collisions by window") {
  const Path a = testing::straight_path({0, 0}, {0.4, 0}, 12);
  auto item = [&](std::string scene, std::string rec, std::int64_t start, std::int64_t pid, Path p) {
    EvaluationItem it;
    it.tracklet.scene = scene;
    it.tracklet.recording = rec;
    it.tracklet.start_frame = start;
    it.tracklet.pedestrian_id = pid;
    it.tracklet.fut = p;
    it.pred.samples = {p};
    return it;
  };
  // identical paths but never in the same window except the first pair
  const std::vector<EvaluationItem> items{item("eth", "r", 0, 1, a), item("eth", "r", 0, 2, a),
                                          item("eth", "r", 10, 3, a), item("eth", "q", 10, 4, a),
                                          item("hotel", "r", 0, 5, a)};
  const MetricsReport r = evaluate(items, {});
  CHECK(r.overall.tracklets == 5);
  CHECK(r.overall.ade == 0.0);
  CHECK(r.overall.fde == 0.0);
  CHECK(r.overall.tcc == doctest::Approx(0.5));  // y is constant
  CHECK(r.overall.col_counts.cases == 1);
  CHECK(*r.overall.col == 100.0);
  REQUIRE(r.per_scene.size() == 2);
  CHECK(r.per_scene[0].first == "eth");
  CHECK(r.per_scene[0].second.tracklets == 4);
  CHECK(r.per_scene[1].first == "hotel");
  CHECK(!r.per_scene[1].second.col.has_value());
}
