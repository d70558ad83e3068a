#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ahls/geometry.hpp"
#include "ahls/rng.hpp"
#include "ahls/specialfns.hpp"

using namespace ahls;
using geo::SphereGrid;
using geo::StarBody;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

// random smooth positive radial profile on the given grid
StarBody random_smooth_body(const std::shared_ptr<const SphereGrid>& grid, Rng& rng) {
  int n = grid->dim;
  std::vector<Vec> dirs;
  std::vector<double> coef;
  for (int k = 0; k < 4; ++k) {
    dirs.push_back(rng.sphere_dir(n));
    coef.push_back(rng.uniform(-0.5, 0.5));
  }
  double base = rng.uniform(0.2, 2.0);
  std::vector<double> radii;
  radii.reserve(grid->size());
  for (const auto& node : grid->nodes) {
    double e = 0;
    for (std::size_t k = 0; k < dirs.size(); ++k) e += coef[k] * node.dot(dirs[k]);
    radii.push_back(base * std::exp(e));
  }
  return StarBody::sampled(grid, std::move(radii));
}
}  // namespace

TEST_CASE("sphere grid invariants") {
  for (int n = 1; n <= 3; ++n) {
    SphereGrid g = SphereGrid::make(n, n == 3 ? 24 : 64);
    double wsum = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(std::fabs(g.nodes[j].norm() - 1.0) < 1e-14);
      CHECK(g.weights[j] > 0);
      wsum += g.weights[j];
    }
    CHECK(rel_close(wsum, sf::sphere_area(n), 1e-10));
  }
}

TEST_CASE("n=2 trapezoid integrates trigonometric polynomials exactly") {
  SphereGrid g = SphereGrid::make(2, 64);
  for (int k = 1; k <= 16; ++k) {
    double sc = 0, ss = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      double th = std::atan2(g.nodes[j][1], g.nodes[j][0]);
      sc += g.weights[j] * std::cos(k * th);
      ss += g.weights[j] * std::sin(k * th);
    }
    CHECK(std::fabs(sc) < 1e-10);
    CHECK(std::fabs(ss) < 1e-10);
  }
  // and a constant+harmonic combination with a known integral
  double s = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    double th = std::atan2(g.nodes[j][1], g.nodes[j][0]);
    s += g.weights[j] * (2.0 + std::cos(3 * th));
  }
  CHECK(rel_close(s, 4.0 * kPi, 1e-12));
}

TEST_CASE("n=3 grid integrates low-degree polynomials") {
  SphereGrid g = SphereGrid::make(3, 24);
  double sxx = 0, sz4 = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    sxx += g.weights[j] * g.nodes[j][0] * g.nodes[j][0];
    sz4 += g.weights[j] * std::pow(g.nodes[j][2], 4);
  }
  CHECK(rel_close(sxx, 4.0 * kPi / 3.0, 1e-10));
  CHECK(rel_close(sz4, 4.0 * kPi / 5.0, 1e-10));
}

TEST_CASE("radial examples") {
  Vec xi{0.6, 0.8};
  CHECK(StarBody::ball(2, 2.0).radial(xi) == doctest::Approx(2.0));
  CHECK(StarBody::cross_polytope(2, 1.0).radial(xi) == doctest::Approx(1.0 / 1.4).epsilon(1e-14));
  StarBody stretched = StarBody::image(Mat::diag(Vec{2.0, 1.0}), StarBody::ball(2, 1.0));
  CHECK(stretched.radial(Vec{1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(stretched.radial(Vec{0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));

  Mat shape = Mat::from_rows({{4.0, 0.0}, {0.0, 1.0}});  // ellipse semi-axes 2 and 1
  StarBody ell = StarBody::ellipsoid(shape);
  CHECK(ell.radial(Vec{1.0, 0.0}) == doctest::Approx(2.0));
  CHECK(ell.radial(Vec{0.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("gauge examples") {
  CHECK(StarBody::ball(2, 1.0).gauge(Vec{0.3, 0.4}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(StarBody::cross_polytope(2, 1.0).gauge(Vec{0.3, 0.4}) ==
        doctest::Approx(0.7).epsilon(1e-14));
  CHECK(StarBody::ball(2, 1.0).gauge(Vec(2)) == 0.0);
  // standard simplex gauge: sum of coordinates on the cone, +inf off it
  StarBody simplex = StarBody::standard_simplex(2);
  CHECK(simplex.gauge(Vec{0.25, 0.5}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::isinf(simplex.gauge(Vec{-0.1, 0.5})));
}

TEST_CASE("simplex radial by exact ray clipping") {
  StarBody simplex = StarBody::standard_simplex(2);
  Vec diag{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  // boundary x+y=1 hit at t = 1/(cos+sin)
  CHECK(simplex.radial(diag) == doctest::Approx(1.0 / (diag[0] + diag[1])).epsilon(1e-12));
  CHECK(simplex.radial(Vec{-1.0, 0.0}) == doctest::Approx(0.0));
  CHECK_THROWS(StarBody::simplex({Vec{1.0}, Vec{2.0}}));  // origin outside the closure
}

TEST_CASE("volume closed forms vs quadrature") {
  auto g1 = SphereGrid::make(1, 2);
  auto g2 = SphereGrid::make(2, 4096);

  CHECK(geo::volume(StarBody::ball(2, 1.0), g2) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(geo::volume(StarBody::ball(1, 3.0), g1) == doctest::Approx(6.0).epsilon(1e-14));

  // cross polytope |B_1^2| = 2 via quadrature vs closed form
  StarBody cp2 = StarBody::cross_polytope(2, 1.0);
  CHECK(rel_close(geo::volume(cp2, g2), cp2.exact_volume(), 1e-6));
  CHECK(cp2.exact_volume() == doctest::Approx(2.0).epsilon(1e-14));

  // simplex in the plane, kinks not aligned with the grid; the trapezoid
  // rule converges O(h^2) through the kinks so the angular count is higher
  StarBody sim = StarBody::simplex({Vec{-0.2, -0.1}, Vec{1.3, 0.2}, Vec{0.1, 1.1}});
  auto g2sim = SphereGrid::make(2, 16384);
  CHECK(rel_close(geo::volume(sim, g2sim), sim.exact_volume(), 1e-6));

  // ellipsoid in 3-D: quadrature matches the closed form
  auto g3 = SphereGrid::make(3, 128);
  Mat shape = Mat::from_rows({{2.0, 0.3, 0.0}, {0.3, 1.0, 0.1}, {0.0, 0.1, 0.7}});
  StarBody ell = StarBody::ellipsoid(shape);
  double wn = sf::unit_ball_volume(3);
  CHECK(rel_close(ell.exact_volume(), wn * std::sqrt(shape.det()), 1e-14));
  double quad = 0;
  for (std::size_t j = 0; j < g3.size(); ++j)
    quad += g3.weights[j] * std::pow(ell.radial(g3.nodes[j]), 3);
  CHECK(rel_close(quad / 3.0, ell.exact_volume(), 1e-10));

  // octahedron in 3-D (equator kink sits on the panel split); O(h^2) through
  // the azimuthal kinks
  StarBody cp3 = StarBody::cross_polytope(3, 1.0);
  auto g3big = SphereGrid::make(3, 2048);
  CHECK(rel_close(geo::volume(cp3, g3big), cp3.exact_volume(), 1e-6));

  // 3-D simplex at a coarser grid, same O(h^2) rate
  StarBody sim3 = StarBody::simplex(
      {Vec{-0.1, -0.1, -0.05}, Vec{1.2, 0.1, 0.2}, Vec{0.0, 1.1, 0.15}, Vec{0.2, 0.1, 0.9}});
  CHECK(rel_close(geo::volume(sim3, SphereGrid::make(3, 512)), sim3.exact_volume(), 1e-4));
}

TEST_CASE("volume-preserving linear images") {
  auto g2 = SphereGrid::make(2, 512);
  StarBody img = StarBody::image(Mat::diag(Vec{2.0, 0.5}), StarBody::ball(2, 1.0));
  CHECK(rel_close(geo::volume(img, g2), kPi, 1e-10));

  // composition of maps equals the image under the product
  Mat m1 = Mat::from_rows({{1.0, 0.3}, {0.0, 1.0}});
  Mat m2 = Mat::from_rows({{0.8, 0.0}, {0.2, 1.25}});
  StarBody k = StarBody::cross_polytope(2, 1.0);
  StarBody two_step = StarBody::image(m1, StarBody::image(m2, k));
  StarBody one_step = StarBody::image(m1 * m2, k);
  auto grid = SphereGrid::make(2, 64);
  for (const auto& node : grid.nodes)
    CHECK(rel_close(two_step.radial(node), one_step.radial(node), 1e-12));

  CHECK_THROWS(StarBody::image(Mat::from_rows({{1.0, 1.0}, {1.0, 1.0}}), k));
}

TEST_CASE("radial-gauge reciprocity on linear images") {
  auto grid = SphereGrid::make(2, 64);
  StarBody body = StarBody::image(Mat::from_rows({{1.5, 0.4}, {-0.2, 0.9}}),
                                  StarBody::cross_polytope(2, 1.3));
  for (const auto& node : grid.nodes) {
    double rho = body.radial(node);
    for (double t : {0.35, 1.0, 2.7}) {
      CHECK(rel_close(body.gauge(node * (rho * t)) / t, 1.0, 1e-10));
    }
  }
}

TEST_CASE("dual mixed volume identities") {
  auto g2 = SphereGrid::make(2, 256);
  StarBody k1 = StarBody::ball(2, 1.0);
  StarBody k2 = StarBody::ball(2, 2.0);
  // constant integrand: (1/2)(2 pi) 1^{n-a} 2^a with a=1
  CHECK(geo::dual_mixed_volume(k1, k2, 1.0, g2) == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  // V_alpha(K,K) = |K| for random bodies and several alphas
  auto gp = std::make_shared<SphereGrid>(SphereGrid::make(2, 128));
  Rng rng(20240901);
  for (int rep = 0; rep < 5; ++rep) {
    StarBody K = random_smooth_body(gp, rng);
    double vol = geo::volume(K, *gp);
    for (double a : {0.5, 1.0, 1.7, 3.5})
      CHECK(rel_close(geo::dual_mixed_volume(K, K, a, *gp), vol, 1e-10));
  }
}

TEST_CASE("dual mixed volume Hoelder inequality randomized") {
  Rng rng(777);
  for (int n = 1; n <= 3; ++n) {
    auto gp = std::make_shared<SphereGrid>(SphereGrid::make(n, n == 3 ? 16 : 96));
    for (int rep = 0; rep < 20; ++rep) {
      StarBody K = random_smooth_body(gp, rng);
      StarBody L = random_smooth_body(gp, rng);
      for (double a : {0.5 * n, 2.0 * n}) {
        ChainReport r = geo::check_dual_mixed_inequality(K, L, a, *gp);
        CHECK(r.pass);
      }
    }
  }
}

TEST_CASE("dual mixed inequality equality for dilates") {
  auto gp = std::make_shared<SphereGrid>(SphereGrid::make(2, 96));
  Rng rng(12);
  StarBody K = random_smooth_body(gp, rng);
  const auto& sampled = std::get<StarBody::Sampled>(K.kind());
  std::vector<double> scaled = sampled.radii;
  for (double& r : scaled) r *= 3.0;
  StarBody L = StarBody::sampled(gp, scaled);
  ChainReport r = geo::check_dual_mixed_inequality(K, L, 0.5, *gp);
  CHECK(r.pass);
  CHECK(r.metadata["dilates"].get<bool>());
  CHECK(std::fabs(r.margins[0]) <= 1e-10 * std::fabs(r.values[0]) + 1e-12);

  ChainReport rb = geo::check_dual_mixed_inequality(StarBody::ball(2, 1.0), StarBody::ball(2, 3.0),
                                                    0.5, *gp);
  CHECK(rb.pass);
  CHECK(std::fabs(rb.margins[0]) <= 1e-10);
  ChainReport rc = geo::check_dual_mixed_inequality(StarBody::ball(2, 1.0),
                                                    StarBody::cross_polytope(2, 1.0), 1.0, *gp);
  CHECK(rc.pass);
  CHECK(rc.margins[0] > 0.01);  // genuinely strict
  CHECK(!rc.metadata["dilates"].get<bool>());
}

TEST_CASE("schwarz symmetral") {
  auto g2 = SphereGrid::make(2, 2048);
  StarBody ball = StarBody::ball(2, 1.7);
  StarBody sym = geo::schwarz_symmetral(ball, g2);
  CHECK(std::get<StarBody::Ball>(sym.kind()).radius == doctest::Approx(1.7).epsilon(1e-12));

  StarBody cp = StarBody::cross_polytope(2, 1.0);
  StarBody sym_cp = geo::schwarz_symmetral(cp, g2);
  CHECK(std::get<StarBody::Ball>(sym_cp.kind()).radius ==
        doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-6));

  // volume-preserving image has the same symmetral radius
  Mat shear = Mat::from_rows({{1.0, 0.7}, {0.0, 1.0}});
  Mat shape = Mat::from_rows({{1.3, 0.2}, {0.2, 0.9}});
  StarBody ell = StarBody::ellipsoid(shape);
  StarBody img = StarBody::image(shear, ell);
  double r1 = std::get<StarBody::Ball>(geo::schwarz_symmetral(ell, g2).kind()).radius;
  double r2 = std::get<StarBody::Ball>(geo::schwarz_symmetral(img, g2).kind()).radius;
  CHECK(rel_close(r1, r2, 1e-8));
}

TEST_CASE("sampled body interpolation and serialization") {
  auto gp = std::make_shared<SphereGrid>(SphereGrid::make(2, 64));
  Rng rng(5);
  StarBody body = random_smooth_body(gp, rng);
  // interpolation reproduces node values exactly
  const auto& sampled = std::get<StarBody::Sampled>(body.kind());
  for (std::size_t j = 0; j < gp->size(); ++j)
    CHECK(rel_close(body.radial(gp->nodes[j]), sampled.radii[j], 1e-12));

  nlohmann::json j = body.to_json();
  CHECK(j["dim"] == 2);
  CHECK(j["nodes"].size() == gp->size());
  CHECK(j["weights"].size() == gp->size());
  CHECK(j["values"].size() == gp->size());

  // n=3 sampled body round-trips node radii through bilinear interpolation
  auto gp3 = std::make_shared<SphereGrid>(SphereGrid::make(3, 12));
  StarBody b3 = random_smooth_body(gp3, rng);
  const auto& s3 = std::get<StarBody::Sampled>(b3.kind());
  for (std::size_t j3 = 0; j3 < gp3->size(); j3 += 7)
    CHECK(rel_close(b3.radial(gp3->nodes[j3]), s3.radii[j3], 1e-10));
}

TEST_CASE("sampled body validation") {
  auto gp = std::make_shared<SphereGrid>(SphereGrid::make(2, 16));
  std::vector<double> bad(gp->size(), 1.0);
  bad[3] = 0.0;  // not strictly positive
  CHECK_THROWS(StarBody::sampled(gp, bad));
  std::vector<double> wrong(gp->size() - 1, 1.0);
  CHECK_THROWS(StarBody::sampled(gp, wrong));
}

TEST_CASE("ray clipping intervals") {
  StarBody box = StarBody::centered_box(Vec{1.0, 2.0});
  double t0, t1;
  REQUIRE(box.ray_interval(Vec{0.0, 0.0}, Vec{1.0, 0.0}, t0, t1));
  CHECK(t0 == doctest::Approx(-1.0));
  CHECK(t1 == doctest::Approx(1.0));

  StarBody ball = StarBody::ball(2, 1.0);
  REQUIRE(ball.ray_interval(Vec{0.5, 0.0}, Vec{1.0, 0.0}, t0, t1));
  CHECK(t0 == doctest::Approx(-1.5));
  CHECK(t1 == doctest::Approx(0.5));
  REQUIRE(ball.ray_interval(Vec{2.0, 2.0}, Vec{1.0, 0.0}, t0, t1));
  CHECK(t0 > t1);  // misses

  // image of a body clips through the inverse map with the same parameter
  StarBody img = StarBody::image(Mat::diag(Vec{2.0, 1.0}), ball);
  REQUIRE(img.ray_interval(Vec{0.0, 0.0}, Vec{1.0, 0.0}, t0, t1));
  CHECK(t1 == doctest::Approx(2.0));
}

TEST_CASE("dimension mismatches throw") {
  auto g2 = SphereGrid::make(2, 16);
  CHECK_THROWS(geo::volume(StarBody::ball(3, 1.0), g2));
  CHECK_THROWS(geo::dual_mixed_volume(StarBody::ball(2, 1.0), StarBody::ball(3, 1.0), 1.0, g2));
}
