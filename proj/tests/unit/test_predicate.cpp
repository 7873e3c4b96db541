#include <doctest.h>

#include "mtlloop/predicate.hpp"
#include "mtlloop/rng.hpp"
#include "projection_oracle.hpp"
#include "random_instances.hpp"

using namespace mtlloop;

TEST_CASE("halfspace signed distance under the identity metric") {
  auto h = AtomicPredicate::halfspace("h", Eigen::Vector2d(1, 0), 1.0);
  Metric id = Metric::identity(2);
  CHECK(signed_distance(Eigen::Vector2d(3, 5), h, id) == doctest::Approx(2.0));
  CHECK(signed_distance(Eigen::Vector2d(-1, 0), h, id) == doctest::Approx(-2.0));
  CHECK(signed_distance(Eigen::Vector2d(1, 9), h, id) == doctest::Approx(0.0));
}

TEST_CASE("halfspace distance uses the dual norm of the weighted metric") {
  auto h = AtomicPredicate::halfspace("h", Eigen::Vector2d(1, 0), 0.0);
  Eigen::Matrix2d m;
  m << 4, 0, 0, 1;
  Metric metric(m);
  // Moving one unit along x costs 2 in this metric.
  CHECK(signed_distance(Eigen::Vector2d(1, 0), h, metric) == doctest::Approx(2.0));
  CHECK(signed_distance(Eigen::Vector2d(-1, 0), h, metric) == doctest::Approx(-2.0));
}

TEST_CASE("box depth and exterior distance, diagonal metric") {
  auto b = AtomicPredicate::box("b", Eigen::Vector2d(0, 0), Eigen::Vector2d(4, 2));
  Metric id = Metric::identity(2);
  CHECK(signed_distance(Eigen::Vector2d(1, 1), b, id) == doctest::Approx(1.0));
  CHECK(signed_distance(Eigen::Vector2d(2, 1.5), b, id) == doctest::Approx(0.5));
  CHECK(signed_distance(Eigen::Vector2d(5, 1), b, id) == doctest::Approx(-1.0));
  // Outside a corner: Euclidean distance, not the nearest-face distance.
  CHECK(signed_distance(Eigen::Vector2d(5, 3), b, id) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(signed_distance(Eigen::Vector2d(0, 0), b, id) == doctest::Approx(0.0));
}

TEST_CASE("half-bounded boxes ignore infinite faces") {
  double inf = std::numeric_limits<double>::infinity();
  auto b = AtomicPredicate::box("b", Eigen::Vector2d(1, -inf), Eigen::Vector2d(inf, inf));
  Metric id = Metric::identity(2);
  CHECK(signed_distance(Eigen::Vector2d(4, 100), b, id) == doctest::Approx(3.0));
  CHECK(signed_distance(Eigen::Vector2d(0, 0), b, id) == doctest::Approx(-1.0));
}

TEST_CASE("box distances require a diagonal metric") {
  auto b = AtomicPredicate::box("b", Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
  Eigen::Matrix2d m;
  m << 2, 0.5, 0.5, 2;
  CHECK_THROWS(signed_distance(Eigen::Vector2d(2, 2), b, Metric(m)));
}

TEST_CASE("membership is exact on the closed boundary") {
  auto h = AtomicPredicate::halfspace("h", Eigen::Vector2d(1, 1), 2.0);
  CHECK(h.contains(Eigen::Vector2d(1, 1)));
  CHECK(!h.contains(Eigen::Vector2d(1, 0.9999)));
  auto b = AtomicPredicate::box("b", Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
  CHECK(b.contains(Eigen::Vector2d(1, 1)));
  CHECK(!b.contains(Eigen::Vector2d(1.0000001, 1)));
}

TEST_CASE("predicate map rejects duplicates, dimension mismatches and unknown names") {
  PredicateMap pmap(2);
  pmap.add(AtomicPredicate::halfspace("a", Eigen::Vector2d(1, 0), 0.0));
  CHECK_THROWS(pmap.add(AtomicPredicate::halfspace("a", Eigen::Vector2d(0, 1), 0.0)));
  CHECK_THROWS(pmap.add(AtomicPredicate::halfspace("d", Eigen::Vector3d(1, 0, 0), 0.0)));
  CHECK_THROWS(pmap.get("missing"));
  CHECK(pmap.get("a").name == "a");
}

TEST_CASE("closed forms agree with the projection oracle on random triples") {
  Rng rng(91);
  for (int i = 0; i < 300; ++i) {
    int dim = 1 + static_cast<int>(rng.next_u64() % 3);
    auto ctx = testgen::random_context(rng, dim, 1);
    const AtomicPredicate& pred = ctx.pmap.entries().begin()->second;
    Eigen::VectorXd point(dim);
    for (int d = 0; d < dim; ++d) point(d) = rng.uniform(-4.0, 4.0);
    double closed = signed_distance(point, pred, ctx.metric);
    double numeric = testgen::numeric_signed_distance(point, pred, ctx.metric);
    if (std::isinf(closed)) {
      CHECK(closed == numeric);
    } else {
      CHECK(std::abs(closed - numeric) < 1e-6);
    }
  }
}
