#include "ahls/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ahls/quadrature.hpp"
#include "ahls/specialfns.hpp"

namespace ahls::geo {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInf = std::numeric_limits<double>::infinity();

// clip [t0,t1] by a*t <= c (the ray substituted into a halfspace)
inline void clip_halfspace(double a, double c, double& t0, double& t1) {
  if (std::fabs(a) < 1e-300) {
    if (c < 0) { t0 = 1; t1 = 0; }  // ray entirely outside
    return;
  }
  double t = c / a;
  if (a > 0) t1 = std::min(t1, t);
  else t0 = std::max(t0, t);
}
}  // namespace

SphereGrid SphereGrid::make(int dim, int resolution) {
  SphereGrid g;
  g.dim = dim;
  if (dim == 1) {
    Vec plus(1), minus(1);
    plus[0] = 1.0;
    minus[0] = -1.0;
    g.nodes = {plus, minus};
    g.weights = {1.0, 1.0};
    g.exact_degree = 1;
    return g;
  }
  if (dim == 2) {
    int m = std::max(8, resolution);
    g.nodes.reserve(m);
    g.weights.assign(m, 2.0 * kPi / m);
    g.thetas.reserve(m);
    for (int j = 0; j < m; ++j) {
      double th = 2.0 * kPi * j / m;
      g.thetas.push_back(th);
      Vec v(2);
      v[0] = std::cos(th);
      v[1] = std::sin(th);
      g.nodes.push_back(v);
    }
    g.exact_degree = m - 1;
    return g;
  }
  if (dim == 3) {
    int p = std::max(4, resolution);
    int half = (p + 1) / 2;
    // Gauss-Legendre in u on [-1,0] and [0,1]; the split keeps equatorial
    // kinks (e.g. cross-polytope radial functions) at a panel boundary.
    const auto& x = gl_nodes(half);
    const auto& w = gl_weights(half);
    std::vector<double> us, uw;
    for (int i = 0; i < half; ++i) {
      us.push_back(-0.5 + 0.5 * x[i]);
      uw.push_back(0.5 * w[i]);
    }
    for (int i = 0; i < half; ++i) {
      us.push_back(0.5 + 0.5 * x[i]);
      uw.push_back(0.5 * w[i]);
    }
    int m = 2 * p;
    m = ((m + 3) / 4) * 4;  // multiple of 4 so axis kinks sit on nodes
    g.us = us;
    g.phis.reserve(m);
    for (int j = 0; j < m; ++j) g.phis.push_back(2.0 * kPi * j / m);
    for (std::size_t i = 0; i < us.size(); ++i) {
      double u = us[i];
      double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int j = 0; j < m; ++j) {
        Vec v(3);
        v[0] = s * std::cos(g.phis[j]);
        v[1] = s * std::sin(g.phis[j]);
        v[2] = u;
        g.nodes.push_back(v);
        g.weights.push_back(uw[i] * 2.0 * kPi / m);
      }
    }
    g.exact_degree = std::min(2 * half - 1, m - 1);
    return g;
  }
  throw std::invalid_argument("SphereGrid: dim must be 1..3");
}

nlohmann::json SphereGrid::to_json() const {
  nlohmann::json nodes_j = nlohmann::json::array();
  for (const auto& v : nodes) {
    nlohmann::json n = nlohmann::json::array();
    for (int i = 0; i < dim; ++i) n.push_back(v[i]);
    nodes_j.push_back(n);
  }
  return nlohmann::json{{"dim", dim}, {"nodes", nodes_j}, {"weights", weights}};
}

StarBody StarBody::ball(int dim, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("StarBody::ball: radius must be positive");
  return StarBody(dim, Ball{radius});
}

StarBody StarBody::ellipsoid(const Mat& shape) {
  if (!shape.symmetric(1e-9)) throw std::invalid_argument("StarBody::ellipsoid: shape not symmetric");
  Mat inv = shape.inverse();
  if (shape.det() <= 0) throw std::invalid_argument("StarBody::ellipsoid: shape not positive definite");
  return StarBody(shape.n, Ellipsoid{shape, inv});
}

StarBody StarBody::centered_box(const Vec& halfwidth) {
  for (int i = 0; i < halfwidth.n; ++i)
    if (!(halfwidth[i] > 0)) throw std::invalid_argument("StarBody::centered_box: halfwidths must be positive");
  return StarBody(halfwidth.n, CenteredBox{halfwidth});
}

StarBody StarBody::cross_polytope(int dim, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("StarBody::cross_polytope: scale must be positive");
  return StarBody(dim, CrossPolytope{scale});
}

StarBody StarBody::simplex(const std::vector<Vec>& vertices) {
  if (vertices.empty()) throw std::invalid_argument("StarBody::simplex: no vertices");
  int n = vertices[0].n;
  if (static_cast<int>(vertices.size()) != n + 1)
    throw std::invalid_argument("StarBody::simplex: need dim+1 vertices");
  Simplex s;
  s.vertices = vertices;
  // facet opposite vertex i spans the remaining n vertices
  for (int i = 0; i <= n; ++i) {
    std::vector<Vec> face;
    for (int j = 0; j <= n; ++j)
      if (j != i) face.push_back(vertices[j]);
    Vec a(n);
    if (n == 1) {
      a[0] = 1.0;
    } else if (n == 2) {
      Vec d = face[1] - face[0];
      a[0] = d[1];
      a[1] = -d[0];
    } else {
      Vec d1 = face[1] - face[0], d2 = face[2] - face[0];
      a[0] = d1[1] * d2[2] - d1[2] * d2[1];
      a[1] = d1[2] * d2[0] - d1[0] * d2[2];
      a[2] = d1[0] * d2[1] - d1[1] * d2[0];
    }
    double b = a.dot(face[0]);
    if (a.dot(vertices[i]) > b) {  // orient outward
      a = -a;
      b = -b;
    }
    double scale = a.norm();
    if (scale < 1e-300) throw std::invalid_argument("StarBody::simplex: degenerate facet");
    a = a * (1.0 / scale);
    b /= scale;
    if (b < -1e-9) throw std::invalid_argument("StarBody::simplex: origin not in the closure");
    s.facet_normals.push_back(a);
    s.facet_offsets.push_back(std::max(b, 0.0));
  }
  return StarBody(n, std::move(s));
}

StarBody StarBody::standard_simplex(int dim) {
  std::vector<Vec> v;
  v.push_back(Vec(dim));
  for (int i = 0; i < dim; ++i) {
    Vec e(dim);
    e[i] = 1.0;
    v.push_back(e);
  }
  return simplex(v);
}

StarBody StarBody::sampled(std::shared_ptr<const SphereGrid> grid, std::vector<double> radii) {
  if (!grid) throw std::invalid_argument("StarBody::sampled: null grid");
  if (radii.size() != grid->size())
    throw std::invalid_argument("StarBody::sampled: radii length must match grid node count");
  for (double r : radii)
    if (!(r > 0) || !std::isfinite(r))
      throw std::invalid_argument("StarBody::sampled: radial values must be positive and finite");
  int d = grid->dim;
  return StarBody(d, Sampled{std::move(grid), std::move(radii)});
}

StarBody StarBody::image(const Mat& map, const StarBody& inner) {
  Mat inv = map.inverse();  // throws when singular
  return StarBody(inner.dim(), LinearImage{map, inv, std::make_shared<StarBody>(inner)});
}

StarBody linear_image(const Mat& map, const StarBody& body) { return StarBody::image(map, body); }

bool StarBody::supports_ray_clipping() const {
  if (std::holds_alternative<Sampled>(kind_)) return false;
  if (const auto* li = std::get_if<LinearImage>(&kind_)) return li->inner->supports_ray_clipping();
  return true;
}

bool StarBody::ray_interval(const Vec& p, const Vec& d, double& t0, double& t1) const {
  t0 = -kInf;
  t1 = kInf;
  if (const auto* b = std::get_if<Ball>(&kind_)) {
    // |p + t d|^2 = r^2
    double A = d.norm2(), B = 2.0 * p.dot(d), C = p.norm2() - b->radius * b->radius;
    double disc = B * B - 4 * A * C;
    if (disc < 0) { t0 = 1; t1 = 0; return true; }
    double s = std::sqrt(disc);
    t0 = (-B - s) / (2 * A);
    t1 = (-B + s) / (2 * A);
    return true;
  }
  if (const auto* e = std::get_if<Ellipsoid>(&kind_)) {
    Vec Ap = e->inv_shape.apply(p), Ad = e->inv_shape.apply(d);
    double A = d.dot(Ad), B = 2.0 * p.dot(Ad), C = p.dot(Ap) - 1.0;
    double disc = B * B - 4 * A * C;
    if (disc < 0) { t0 = 1; t1 = 0; return true; }
    double s = std::sqrt(disc);
    t0 = (-B - s) / (2 * A);
    t1 = (-B + s) / (2 * A);
    return true;
  }
  if (const auto* bx = std::get_if<CenteredBox>(&kind_)) {
    for (int i = 0; i < dim_; ++i) {
      clip_halfspace(d[i], bx->halfwidth[i] - p[i], t0, t1);
      clip_halfspace(-d[i], bx->halfwidth[i] + p[i], t0, t1);
      if (t0 > t1) return true;
    }
    return true;
  }
  if (const auto* cp = std::get_if<CrossPolytope>(&kind_)) {
    int combos = 1 << dim_;
    for (int mask = 0; mask < combos; ++mask) {
      double a = 0, off = cp->scale;
      for (int i = 0; i < dim_; ++i) {
        double sgn = (mask >> i) & 1 ? 1.0 : -1.0;
        a += sgn * d[i];
        off -= sgn * p[i];
      }
      clip_halfspace(a, off, t0, t1);
      if (t0 > t1) return true;
    }
    return true;
  }
  if (const auto* s = std::get_if<Simplex>(&kind_)) {
    for (std::size_t i = 0; i < s->facet_normals.size(); ++i) {
      clip_halfspace(s->facet_normals[i].dot(d), s->facet_offsets[i] - s->facet_normals[i].dot(p),
                     t0, t1);
      if (t0 > t1) return true;
    }
    return true;
  }
  if (const auto* li = std::get_if<LinearImage>(&kind_)) {
    // M^{-1}(p + t d) = M^{-1}p + t M^{-1}d keeps the parameterization
    return li->inner->ray_interval(li->inv_map.apply(p), li->inv_map.apply(d), t0, t1);
  }
  return false;
}

double StarBody::radial(const Vec& xi) const {
  if (const auto* b = std::get_if<Ball>(&kind_)) return b->radius;
  if (const auto* e = std::get_if<Ellipsoid>(&kind_)) {
    double q = xi.dot(e->inv_shape.apply(xi));
    return 1.0 / std::sqrt(q);
  }
  if (const auto* bx = std::get_if<CenteredBox>(&kind_)) {
    double m = kInf;
    for (int i = 0; i < dim_; ++i)
      if (std::fabs(xi[i]) > 1e-300) m = std::min(m, bx->halfwidth[i] / std::fabs(xi[i]));
    return m;
  }
  if (const auto* cp = std::get_if<CrossPolytope>(&kind_)) {
    double s = xi.norm1();
    return s > 0 ? cp->scale / s : kInf;
  }
  if (std::holds_alternative<Simplex>(kind_)) {
    double t0, t1;
    ray_interval(Vec(dim_), xi, t0, t1);
    return t0 > t1 ? 0.0 : std::max(t1, 0.0);
  }
  if (const auto* li = std::get_if<LinearImage>(&kind_)) {
    Vec w = li->inv_map.apply(xi);
    double m = w.norm();
    return li->inner->radial(w * (1.0 / m)) / m;
  }
  const auto& sp = std::get<Sampled>(kind_);
  const SphereGrid& g = *sp.grid;
  if (dim_ == 1) return xi[0] >= 0 ? sp.radii[0] : sp.radii[1];
  if (dim_ == 2) {
    double th = std::atan2(xi[1], xi[0]);
    if (th < 0) th += 2.0 * kPi;
    std::size_t m = g.thetas.size();
    double pos = th / (2.0 * kPi) * m;
    std::size_t j0 = static_cast<std::size_t>(pos) % m;
    std::size_t j1 = (j0 + 1) % m;
    double frac = pos - std::floor(pos);
    return (1.0 - frac) * sp.radii[j0] + frac * sp.radii[j1];
  }
  // n = 3: bilinear in (u, phi)
  double u = std::clamp(xi[2], -1.0, 1.0);
  double phi = std::atan2(xi[1], xi[0]);
  if (phi < 0) phi += 2.0 * kPi;
  const auto& us = g.us;
  const auto& phis = g.phis;
  std::size_t nu = us.size(), np = phis.size();
  std::size_t i1 = std::lower_bound(us.begin(), us.end(), u) - us.begin();
  std::size_t i0;
  double fu;
  if (i1 == 0) { i0 = 0; i1 = 0; fu = 0.0; }
  else if (i1 >= nu) { i0 = nu - 1; i1 = nu - 1; fu = 0.0; }
  else { i0 = i1 - 1; fu = (u - us[i0]) / (us[i1] - us[i0]); }
  double pos = phi / (2.0 * kPi) * np;
  std::size_t j0 = static_cast<std::size_t>(pos) % np;
  std::size_t j1 = (j0 + 1) % np;
  double fp = pos - std::floor(pos);
  auto at = [&](std::size_t i, std::size_t j) { return sp.radii[i * np + j]; };
  double lo = (1 - fp) * at(i0, j0) + fp * at(i0, j1);
  double hi = (1 - fp) * at(i1, j0) + fp * at(i1, j1);
  return (1 - fu) * lo + fu * hi;
}

double StarBody::gauge(const Vec& x) const {
  double m = x.norm();
  if (m == 0.0) return 0.0;
  double r = radial(x * (1.0 / m));
  if (!(r > 0)) return kInf;
  return m / r;
}

double StarBody::bounding_radius() const {
  if (const auto* b = std::get_if<Ball>(&kind_)) return b->radius;
  if (const auto* e = std::get_if<Ellipsoid>(&kind_)) {
    // rho(xi)^2 = 1 / (xi' A^{-1} xi) <= sigma_max(A); Frobenius bounds it
    return std::sqrt(e->shape.sigma_max_ub());
  }
  if (const auto* bx = std::get_if<CenteredBox>(&kind_)) return bx->halfwidth.norm();
  if (const auto* cp = std::get_if<CrossPolytope>(&kind_)) return cp->scale;
  if (const auto* s = std::get_if<Simplex>(&kind_)) {
    double r = 0;
    for (const auto& v : s->vertices) r = std::max(r, v.norm());
    return r;
  }
  if (const auto* li = std::get_if<LinearImage>(&kind_))
    return li->map.sigma_max_ub() * li->inner->bounding_radius();
  const auto& sp = std::get<Sampled>(kind_);
  double r = 0;
  for (double v : sp.radii) r = std::max(r, v);
  return r;
}

bool StarBody::has_exact_volume() const {
  if (std::holds_alternative<Sampled>(kind_)) return false;
  if (const auto* li = std::get_if<LinearImage>(&kind_)) return li->inner->has_exact_volume();
  return true;
}

double StarBody::exact_volume() const {
  if (const auto* b = std::get_if<Ball>(&kind_))
    return sf::unit_ball_volume(dim_) * std::pow(b->radius, dim_);
  if (const auto* e = std::get_if<Ellipsoid>(&kind_))
    return sf::unit_ball_volume(dim_) * std::sqrt(e->shape.det());
  if (const auto* bx = std::get_if<CenteredBox>(&kind_)) {
    double v = 1;
    for (int i = 0; i < dim_; ++i) v *= 2.0 * bx->halfwidth[i];
    return v;
  }
  if (const auto* cp = std::get_if<CrossPolytope>(&kind_)) {
    double fact = 1;
    for (int i = 2; i <= dim_; ++i) fact *= i;
    return std::pow(2.0 * cp->scale, dim_) / fact;
  }
  if (const auto* s = std::get_if<Simplex>(&kind_)) {
    Mat m(dim_);
    for (int j = 1; j <= dim_; ++j)
      for (int i = 0; i < dim_; ++i) m.at(i, j - 1) = s->vertices[j][i] - s->vertices[0][i];
    double fact = 1;
    for (int i = 2; i <= dim_; ++i) fact *= i;
    return std::fabs(m.det()) / fact;
  }
  if (const auto* li = std::get_if<LinearImage>(&kind_))
    return std::fabs(li->map.det()) * li->inner->exact_volume();
  throw std::logic_error("StarBody::exact_volume: sampled body has no closed form");
}

nlohmann::json StarBody::to_json() const {
  const auto* sp = std::get_if<Sampled>(&kind_);
  if (!sp) throw std::logic_error("StarBody::to_json: only Sampled bodies serialize");
  nlohmann::json j = sp->grid->to_json();
  j["values"] = sp->radii;
  return j;
}

double volume(const StarBody& body, const SphereGrid& grid) {
  if (grid.dim != body.dim())
    throw std::invalid_argument("volume: grid/body dimension mismatch");
  if (std::holds_alternative<StarBody::Ball>(body.kind()) ||
      std::holds_alternative<StarBody::Ellipsoid>(body.kind()))
    return body.exact_volume();
  double s = 0;
  int n = body.dim();
  for (std::size_t j = 0; j < grid.size(); ++j)
    s += grid.weights[j] * std::pow(body.radial(grid.nodes[j]), n);
  return s / n;
}

double dual_mixed_volume(const StarBody& K, const StarBody& L, double alpha,
                         const SphereGrid& grid) {
  if (K.dim() != L.dim() || K.dim() != grid.dim)
    throw std::invalid_argument("dual_mixed_volume: dimension mismatch");
  int n = K.dim();
  double s = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double rk = K.radial(grid.nodes[j]);
    double rl = L.radial(grid.nodes[j]);
    if (!(rk > 0) || !(rl > 0))
      throw std::domain_error("dual_mixed_volume: radial function vanishes at a node");
    s += grid.weights[j] * std::exp((n - alpha) * std::log(rk) + alpha * std::log(rl));
  }
  return s / n;
}

StarBody schwarz_symmetral(const StarBody& body, const SphereGrid& grid) {
  double v = volume(body, grid);
  int n = body.dim();
  return StarBody::ball(n, std::pow(v / sf::unit_ball_volume(n), 1.0 / n));
}

ChainReport check_dual_mixed_inequality(const StarBody& K, const StarBody& L, double alpha,
                                        const SphereGrid& grid, double tol) {
  if (!(alpha > 0) || alpha == static_cast<double>(K.dim()))
    throw std::domain_error("check_dual_mixed_inequality: need alpha > 0, alpha != n");
  int n = K.dim();
  // grid sums for both sides keep the discrete Hoelder inequality exact
  double vmix = dual_mixed_volume(K, L, alpha, grid);
  double volk = 0, voll = 0;
  double ratio_min = kInf, ratio_max = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double rk = K.radial(grid.nodes[j]);
    double rl = L.radial(grid.nodes[j]);
    volk += grid.weights[j] * std::pow(rk, n);
    voll += grid.weights[j] * std::pow(rl, n);
    double ratio = rk / rl;
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  volk /= n;
  voll /= n;
  double geo = std::exp(((n - alpha) / n) * std::log(volk) + (alpha / n) * std::log(voll));

  ChainReport rep;
  rep.name = "dual-mixed";
  rep.add_term("dual_mixed_volume", vmix, 0.0);
  rep.add_term("volume_geometric_mean", geo, 0.0);
  rep.add_relation(0, 1, alpha < n ? ChainReport::Dir::Le : ChainReport::Dir::Ge);
  rep.evaluate(tol, 1e-8);
  bool dilates = ratio_max - ratio_min <= 1e-6 * std::max(std::fabs(ratio_max), 1e-300);
  rep.metadata = {{"alpha", alpha},
                  {"n", n},
                  {"regime", alpha < n ? "2a" : "2b"},
                  {"dilates", dilates}};
  return rep;
}

}  // namespace ahls::geo
