#include "ahls/functions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ahls/rng.hpp"
#include "ahls/specialfns.hpp"

namespace ahls::fn {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  Vec lo, hi;
  bool empty = false;
};

Box box_intersect(const Box& a, const Box& b) {
  Box r{a.lo, a.hi, a.empty || b.empty};
  for (int i = 0; i < a.lo.n && !r.empty; ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (r.hi[i] <= r.lo[i]) r.empty = true;
  }
  return r;
}

Box centered_box(const Vec& c, double radius) {
  Box b{c, c, false};
  for (int i = 0; i < c.n; ++i) {
    b.lo[i] = c[i] - radius;
    b.hi[i] = c[i] + radius;
  }
  return b;
}

// 1-D quadrature nodes on [lo,hi] with panels graded away from the given
// centers (panel boundaries at c +- scale*2^k). Handles peaked and
// heavy-tailed integrands without wasting nodes far from the action.
struct Grid1d {
  std::vector<double> x, w;
};

Grid1d build_axis(double lo, double hi, const std::vector<double>& centers, double scale,
                  int gl_order) {
  std::vector<double> cuts{lo, hi};
  for (double c : centers) {
    if (c > lo && c < hi) cuts.push_back(c);
    for (double s = scale; s < (hi - lo); s *= 2.0) {
      double a = c - s, b = c + s;
      if (a > lo && a < hi) cuts.push_back(a);
      if (b > lo && b < hi) cuts.push_back(b);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a < 1e-13 * (hi - lo); }),
             cuts.end());
  Grid1d g;
  const auto& xg = gl_nodes(gl_order);
  const auto& wg = gl_weights(gl_order);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]), half = 0.5 * (cuts[i + 1] - cuts[i]);
    if (half <= 0) continue;
    for (int k = 0; k < gl_order; ++k) {
      g.x.push_back(mid + half * xg[k]);
      g.w.push_back(wg[k] * half);
    }
  }
  return g;
}

double tensor_integrate(const Box& box, const std::vector<std::vector<double>>& centers,
                        double scale, int gl_order,
                        const std::function<double(const Vec&)>& f) {
  if (box.empty) return 0.0;
  int n = box.lo.n;
  std::vector<Grid1d> axes(n);
  for (int i = 0; i < n; ++i) axes[i] = build_axis(box.lo[i], box.hi[i], centers[i], scale, gl_order);
  Vec x(n);
  double total = 0;
  std::size_t n0 = axes[0].x.size();
  std::size_t n1 = n >= 2 ? axes[1].x.size() : 1;
  std::size_t n2 = n >= 3 ? axes[2].x.size() : 1;
  for (std::size_t i = 0; i < n0; ++i) {
    x[0] = axes[0].x[i];
    double w0 = axes[0].w[i];
    for (std::size_t j = 0; j < n1; ++j) {
      double w1 = w0;
      if (n >= 2) {
        x[1] = axes[1].x[j];
        w1 *= axes[1].w[j];
      }
      for (std::size_t k = 0; k < n2; ++k) {
        double w2 = w1;
        if (n >= 3) {
          x[2] = axes[2].x[k];
          w2 *= axes[2].w[k];
        }
        total += w2 * f(x);
      }
    }
  }
  return total;
}

double overlap_len(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

double ball_overlap_volume(int n, double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  double rmin = std::min(r1, r2);
  if (d <= std::fabs(r1 - r2)) {
    return sf::unit_ball_volume(n) * std::pow(rmin, n);
  }
  if (n == 1) return r1 + r2 - d;
  if (n == 2) {
    double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
    double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
    double tri = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) *
                                                   (d + r1 + r2)));
    return r1 * r1 * a1 + r2 * r2 * a2 - tri;
  }
  double s = r1 + r2 - d;
  return kPi * s * s * (d * d + 2 * d * (r1 + r2) - 3 * (r1 - r2) * (r1 - r2)) / (12 * d);
}

}  // namespace

double Envelope::value(double u) const {
  switch (kind) {
    case Kind::Zero: return u >= r0 ? 0.0 : kInf;
    case Kind::Exp: return amp * std::exp(-rate * u);
    case Kind::Gauss: return amp * std::exp(-rate * u * u);
    case Kind::Power: return u > 0 ? amp * std::pow(u, -rate) : kInf;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// factories

TestFunction TestFunction::hls_extremal(double a, double b, const Mat& phi, const Vec& x0,
                                        double alpha) {
  if (a < 0) throw std::invalid_argument("hls_extremal: a must be >= 0");
  if (b == 0) throw std::invalid_argument("hls_extremal: b must be nonzero");
  if (!(alpha > 0)) throw std::invalid_argument("hls_extremal: alpha must be positive");
  phi.inverse();  // must be invertible
  return TestFunction(x0.n, HlsExtremal{a, std::fabs(b), phi, x0, alpha});
}

TestFunction TestFunction::simplex_exponential(double a, geo::StarBody gauge_body, const Vec& x0) {
  if (a < 0) throw std::invalid_argument("simplex_exponential: a must be >= 0");
  int d = gauge_body.dim();
  return TestFunction(d, SimplexExponential{a, std::move(gauge_body), x0});
}

TestFunction TestFunction::standard_simplex_exponential(int dim) {
  return simplex_exponential(1.0, geo::StarBody::standard_simplex(dim), Vec(dim));
}

TestFunction TestFunction::s_concave_peak(double s, geo::StarBody gauge_body) {
  Vec c(gauge_body.dim());
  return s_concave_peak(s, std::move(gauge_body), c);
}

TestFunction TestFunction::s_concave_peak(double s, geo::StarBody gauge_body, const Vec& x0) {
  if (!(s > 0)) throw std::invalid_argument("s_concave_peak: s must be positive");
  int d = gauge_body.dim();
  if (x0.n != d) throw std::invalid_argument("s_concave_peak: center dimension mismatch");
  return TestFunction(d, SConcavePeak{s, std::move(gauge_body), x0});
}

TestFunction TestFunction::gaussian(double a, const Mat& cov, const Vec& center) {
  if (a < 0) throw std::invalid_argument("gaussian: a must be >= 0");
  if (!cov.symmetric(1e-9) || cov.det() <= 0)
    throw std::invalid_argument("gaussian: covariance must be symmetric positive definite");
  return TestFunction(center.n, Gaussian{a, cov, cov.inverse(), std::sqrt(cov.det()), center});
}

TestFunction TestFunction::gaussian_isotropic(int dim, double a, double sigma) {
  Mat cov = Mat::identity(dim) * (sigma * sigma);
  return gaussian(a, cov, Vec(dim));
}

TestFunction TestFunction::indicator(geo::StarBody body, const Vec& center) {
  int d = body.dim();
  if (center.n != d) throw std::invalid_argument("indicator: center dimension mismatch");
  return TestFunction(d, Indicator{std::move(body), center});
}

TestFunction TestFunction::indicator_box(const Vec& lo, const Vec& hi) {
  Vec half(lo.n), mid(lo.n);
  for (int i = 0; i < lo.n; ++i) {
    if (!(hi[i] > lo[i])) throw std::invalid_argument("indicator_box: empty box");
    half[i] = 0.5 * (hi[i] - lo[i]);
    mid[i] = 0.5 * (hi[i] + lo[i]);
  }
  return indicator(geo::StarBody::centered_box(half), mid);
}

TestFunction TestFunction::grid_sampled(const Vec& lo, const Vec& hi, std::array<int, 3> shape,
                                        std::vector<double> values) {
  int n = lo.n;
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (shape[i] < 2) throw std::invalid_argument("grid_sampled: need >= 2 samples per axis");
    count *= shape[i];
  }
  if (values.size() != count) throw std::invalid_argument("grid_sampled: value count mismatch");
  for (double v : values)
    if (v < 0) throw std::invalid_argument("grid_sampled: values must be nonnegative");
  return TestFunction(n, GridSampled{lo, hi, shape, std::move(values)});
}

// ---------------------------------------------------------------------------
// evaluation

double TestFunction::operator()(const Vec& x) const {
  if (x.n != dim_) throw std::invalid_argument("TestFunction: point dimension mismatch");
  if (const auto* e = std::get_if<HlsExtremal>(&fam_)) {
    Vec z = e->phi.apply(x - e->x0);
    double q = e->b * e->b + z.norm2();
    return e->a * std::pow(q, -0.5 * (dim_ + e->alpha));
  }
  if (const auto* s = std::get_if<SimplexExponential>(&fam_)) {
    double g = s->gauge_body.gauge(x - s->x0);
    return std::isfinite(g) ? s->a * std::exp(-g) : 0.0;
  }
  if (const auto* p = std::get_if<SConcavePeak>(&fam_)) {
    double g = p->gauge_body.gauge(x - p->x0);
    if (!(g < 1.0)) return 0.0;
    return std::pow(1.0 - g, 1.0 / p->s);
  }
  if (const auto* g = std::get_if<Gaussian>(&fam_)) {
    Vec z = x - g->center;
    return g->a * std::exp(-0.5 * z.dot(g->inv_cov.apply(z)));
  }
  if (const auto* ind = std::get_if<Indicator>(&fam_)) {
    return ind->body.gauge(x - ind->center) <= 1.0 + 1e-12 ? 1.0 : 0.0;
  }
  const auto& gs = std::get<GridSampled>(fam_);
  // multilinear; zero outside the lattice box
  double frac[3];
  std::size_t idx0[3], idx1[3];
  for (int i = 0; i < dim_; ++i) {
    if (x[i] < gs.lo[i] || x[i] > gs.hi[i]) return 0.0;
    double t = (x[i] - gs.lo[i]) / (gs.hi[i] - gs.lo[i]) * (gs.shape[i] - 1);
    std::size_t i0 = std::min<std::size_t>(static_cast<std::size_t>(t), gs.shape[i] - 2);
    idx0[i] = i0;
    idx1[i] = i0 + 1;
    frac[i] = t - i0;
  }
  std::size_t stride[3] = {1, 1, 1};
  for (int i = dim_ - 2; i >= 0; --i) stride[i] = stride[i + 1] * gs.shape[i + 1];
  double acc = 0;
  int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double w = 1;
    std::size_t off = 0;
    for (int i = 0; i < dim_; ++i) {
      bool hi = (c >> i) & 1;
      w *= hi ? frac[i] : 1.0 - frac[i];
      off += (hi ? idx1[i] : idx0[i]) * stride[i];
    }
    acc += w * gs.values[off];
  }
  return acc;
}

double TestFunction::sup_value() const {
  if (const auto* e = std::get_if<HlsExtremal>(&fam_))
    return e->a * std::pow(e->b * e->b, -0.5 * (dim_ + e->alpha));
  if (const auto* s = std::get_if<SimplexExponential>(&fam_)) return s->a;
  if (std::holds_alternative<SConcavePeak>(fam_)) return 1.0;
  if (const auto* g = std::get_if<Gaussian>(&fam_)) return g->a;
  if (std::holds_alternative<Indicator>(fam_)) return 1.0;
  const auto& gs = std::get<GridSampled>(fam_);
  return *std::max_element(gs.values.begin(), gs.values.end());
}

bool TestFunction::compact_support() const {
  return std::holds_alternative<Indicator>(fam_) || std::holds_alternative<SConcavePeak>(fam_) ||
         std::holds_alternative<GridSampled>(fam_);
}

Vec TestFunction::support_center() const {
  if (const auto* e = std::get_if<HlsExtremal>(&fam_)) return e->x0;
  if (const auto* s = std::get_if<SimplexExponential>(&fam_)) return s->x0;
  if (const auto* p = std::get_if<SConcavePeak>(&fam_)) return p->x0;
  if (const auto* g = std::get_if<Gaussian>(&fam_)) return g->center;
  if (const auto* ind = std::get_if<Indicator>(&fam_)) return ind->center;
  const auto& gs = std::get<GridSampled>(fam_);
  return (gs.lo + gs.hi) * 0.5;
}

double TestFunction::support_radius() const {
  if (const auto* p = std::get_if<SConcavePeak>(&fam_)) return p->gauge_body.bounding_radius();
  if (const auto* ind = std::get_if<Indicator>(&fam_)) return ind->body.bounding_radius();
  if (const auto* gs = std::get_if<GridSampled>(&fam_)) return 0.5 * (gs->hi - gs->lo).norm();
  throw std::logic_error("support_radius: function is not compactly supported");
}

Envelope TestFunction::envelope() const {
  Envelope env;
  if (compact_support()) {
    env.kind = Envelope::Kind::Zero;
    env.r0 = support_radius();
    env.amp = sup_value();
    return env;
  }
  if (const auto* e = std::get_if<HlsExtremal>(&fam_)) {
    double smin = e->phi.sigma_min_lb();
    env.kind = Envelope::Kind::Power;
    env.rate = dim_ + e->alpha;
    env.amp = e->a * std::pow(smin, -(dim_ + e->alpha));
    env.r0 = e->b / smin;
    return env;
  }
  if (const auto* s = std::get_if<SimplexExponential>(&fam_)) {
    // ||y||_D >= |y| / rho_max(D)
    double rho_max = s->gauge_body.bounding_radius();
    env.kind = Envelope::Kind::Exp;
    env.rate = 1.0 / rho_max;
    env.amp = s->a;
    env.r0 = 0.0;
    return env;
  }
  const auto& g = std::get<Gaussian>(fam_);
  // z' Sigma^{-1} z >= |z|^2 / sigma_max(Sigma)
  double smax = g.cov.sigma_max_ub();
  env.kind = Envelope::Kind::Gauss;
  env.rate = 0.5 / smax;
  env.amp = g.a;
  env.r0 = 0.0;
  return env;
}

IntegralEst TestFunction::tail_radius(double p, double rel_tol) const {
  IntegralEst out;
  if (compact_support()) {
    out.value = support_radius();
    return out;
  }
  Envelope env = envelope();
  int n = dim_;
  double nsphere = sf::sphere_area(n);
  double norm_p = has_closed_lp() ? std::pow(lp_closed(p), p) : 0.0;
  if (!(norm_p > 0)) {
    // fall back to the peak mass over a unit cell as the comparison scale
    norm_p = std::pow(sup_value(), p);
  }
  double target = rel_tol * norm_p;
  if (env.kind == Envelope::Kind::Power) {
    double expo = p * env.rate - n;
    if (expo <= 0) {
      out.diverged = true;
      return out;
    }
    double c = nsphere * std::pow(env.amp, p) / expo;
    out.value = std::max(env.r0 * 2.0, std::pow(c / target, 1.0 / expo));
    return out;
  }
  auto tail = [&](double R) {
    if (env.kind == Envelope::Kind::Exp) {
      double lam = p * env.rate;
      double g = std::exp(sf::log_gamma(static_cast<double>(n))) *
                 sf::upper_gamma_q(static_cast<double>(n), lam * R);
      return nsphere * std::pow(env.amp, p) * std::pow(lam, -static_cast<double>(n)) * g;
    }
    double gam = p * env.rate;
    double g = std::exp(sf::log_gamma(0.5 * n)) * sf::upper_gamma_q(0.5 * n, gam * R * R);
    return nsphere * std::pow(env.amp, p) * 0.5 * std::pow(gam, -0.5 * n) * g;
  };
  double R = std::max(1.0, env.r0);
  for (int it = 0; it < 200 && tail(R) > target; ++it) R *= 1.26;
  out.value = R;
  return out;
}

bool TestFunction::has_closed_lp() const {
  if (const auto* s = std::get_if<SimplexExponential>(&fam_))
    return s->gauge_body.has_exact_volume();
  if (const auto* p = std::get_if<SConcavePeak>(&fam_)) return p->gauge_body.has_exact_volume();
  if (const auto* ind = std::get_if<Indicator>(&fam_)) return ind->body.has_exact_volume();
  if (std::holds_alternative<GridSampled>(fam_)) return false;
  return true;  // HlsExtremal (when integrable), Gaussian
}

double TestFunction::lp_closed(double p) const {
  if (!(p > 0)) throw std::invalid_argument("lp_closed: p must be positive");
  int n = dim_;
  if (const auto* e = std::get_if<HlsExtremal>(&fam_)) {
    double q = 0.5 * (n + e->alpha) * p;
    if (q <= 0.5 * n) throw std::domain_error("lp_closed: extremal function not in L^p");
    // integral of (b^2+|z|^2)^{-q} dz = b^{n-2q} pi^{n/2} Gamma(q-n/2)/Gamma(q)
    double li = (n - 2 * q) * std::log(e->b) + 0.5 * n * std::log(kPi) +
                sf::log_gamma(q - 0.5 * n) - sf::log_gamma(q);
    double integral = std::exp(li) / std::fabs(e->phi.det());
    return e->a * std::pow(integral, 1.0 / p);
  }
  if (const auto* s = std::get_if<SimplexExponential>(&fam_)) {
    // integral of e^{-p ||x||_D} = n! |D| / p^n
    double fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    double integral = std::pow(s->a, p) * fact * s->gauge_body.exact_volume() / std::pow(p, n);
    return std::pow(integral, 1.0 / p);
  }
  if (const auto* pk = std::get_if<SConcavePeak>(&fam_)) {
    // layer cake: |D| n B(n, p/s + 1)
    double integral =
        pk->gauge_body.exact_volume() * n * sf::beta_fn(static_cast<double>(n), p / pk->s + 1.0);
    return std::pow(integral, 1.0 / p);
  }
  if (const auto* g = std::get_if<Gaussian>(&fam_)) {
    double integral = std::pow(g->a, p) * std::pow(2.0 * kPi, 0.5 * n) * g->sqrt_det_cov *
                      std::pow(p, -0.5 * n);
    return std::pow(integral, 1.0 / p);
  }
  if (const auto* ind = std::get_if<Indicator>(&fam_)) {
    return std::pow(ind->body.exact_volume(), 1.0 / p);
  }
  throw std::logic_error("lp_closed: no closed form for this family");
}

bool TestFunction::is_indicator() const { return std::holds_alternative<Indicator>(fam_); }

nlohmann::json TestFunction::describe() const {
  nlohmann::json j;
  j["dim"] = dim_;
  if (std::holds_alternative<HlsExtremal>(fam_)) j["family"] = "hls-extremal";
  else if (std::holds_alternative<SimplexExponential>(fam_)) j["family"] = "simplex-exponential";
  else if (std::holds_alternative<SConcavePeak>(fam_)) j["family"] = "s-concave-peak";
  else if (std::holds_alternative<Gaussian>(fam_)) j["family"] = "gaussian";
  else if (std::holds_alternative<Indicator>(fam_)) j["family"] = "indicator";
  else j["family"] = "grid-sampled";
  return j;
}

// ---------------------------------------------------------------------------
// norms and integrals

namespace {

// certified effective box (possibly clipped to a simplex-exponential cone)
Box effective_box(const TestFunction& f, double p, const QuadConfig& cfg, bool* truncated,
                  bool* diverged) {
  Vec c = f.support_center();
  double R;
  if (f.compact_support()) {
    R = f.support_radius();
  } else {
    IntegralEst t = f.tail_radius(p, cfg.rel_tol * 0.1);
    if (t.diverged) {
      if (diverged) *diverged = true;
      R = cfg.box_radius;
    } else {
      R = t.value;
    }
    if (R > cfg.box_radius) {
      if (truncated) *truncated = true;
      R = cfg.box_radius;
    }
  }
  Box b = centered_box(c, R);
  // clip to the cone of a simplex-exponential gauge (cheap probe per axis)
  if (const auto* s = std::get_if<TestFunction::SimplexExponential>(&f.family())) {
    for (int i = 0; i < f.dim(); ++i) {
      Vec probe_lo(f.dim()), probe_hi(f.dim());
      probe_lo[i] = -1e-9;
      probe_hi[i] = 1e-9;
      if (!std::isfinite(s->gauge_body.gauge(probe_lo))) b.lo[i] = std::max(b.lo[i], c[i]);
      if (!std::isfinite(s->gauge_body.gauge(probe_hi))) b.hi[i] = std::min(b.hi[i], c[i]);
    }
  }
  return b;
}

double family_scale(const TestFunction& f) {
  if (const auto* e = std::get_if<TestFunction::HlsExtremal>(&f.family()))
    return e->b / std::max(e->phi.sigma_min_lb(), 1e-12);
  if (const auto* g = std::get_if<TestFunction::Gaussian>(&f.family()))
    return std::sqrt(g->cov.sigma_max_ub());
  if (std::holds_alternative<TestFunction::SimplexExponential>(f.family()))
    return 1.0;
  if (f.compact_support()) return std::max(f.support_radius() * 0.25, 1e-6);
  return 1.0;
}

int gl_order_for(const QuadConfig& cfg) { return std::clamp(cfg.nodes_per_axis / 4, 6, 16); }

}  // namespace

IntegralEst lp_norm_quadrature(const TestFunction& f, double p, const QuadConfig& cfg) {
  IntegralEst out;
  Box box = effective_box(f, p, cfg, &out.truncated, &out.diverged);
  std::vector<std::vector<double>> centers(f.dim());
  Vec c = f.support_center();
  for (int i = 0; i < f.dim(); ++i) centers[i] = {c[i]};
  double scale = family_scale(f);
  double ip = tensor_integrate(box, centers, scale, gl_order_for(cfg),
                               [&](const Vec& x) { return std::pow(f(x), p); });
  out.value = std::pow(ip, 1.0 / p);
  out.err = cfg.rel_tol * out.value;
  return out;
}

IntegralEst lp_norm_ex(const TestFunction& f, double p, const QuadConfig& cfg) {
  if (!(p > 0)) throw std::invalid_argument("lp_norm: p must be positive");
  if (f.has_closed_lp()) {
    IntegralEst out;
    try {
      out.value = f.lp_closed(p);
      out.err = 1e-14 * out.value;
      return out;
    } catch (const std::domain_error&) {
      out.diverged = true;
      return out;
    }
  }
  return lp_norm_quadrature(f, p, cfg);
}

double lp_norm(const TestFunction& f, double p, const QuadConfig& cfg) {
  return lp_norm_ex(f, p, cfg).value;
}

// ---------------------------------------------------------------------------
// correlation

namespace {

// Certified interval outside which f(p + t d) vanishes; false when f has no
// such certificate (full-line integration).
bool ray_support_interval(const TestFunction& f, const Vec& p, const Vec& d, double& t0,
                          double& t1) {
  if (const auto* ind = std::get_if<TestFunction::Indicator>(&f.family()))
    return ind->body.ray_interval(p - ind->center, d, t0, t1);
  if (const auto* pk = std::get_if<TestFunction::SConcavePeak>(&f.family()))
    return pk->gauge_body.ray_interval(p - pk->x0, d, t0, t1);
  if (const auto* s = std::get_if<TestFunction::SimplexExponential>(&f.family())) {
    // clip by the recession cone of the gauge body (zero-offset facets)
    const auto* sx = std::get_if<geo::StarBody::Simplex>(&s->gauge_body.kind());
    if (!sx) return false;
    t0 = -kInf;
    t1 = kInf;
    Vec q = p - s->x0;
    for (std::size_t i = 0; i < sx->facet_normals.size(); ++i) {
      if (sx->facet_offsets[i] > 1e-12) continue;
      double a = sx->facet_normals[i].dot(d);
      double c = -sx->facet_normals[i].dot(q);
      if (std::fabs(a) < 1e-300) {
        if (c < 0) { t0 = 1; t1 = 0; return true; }
        continue;
      }
      double t = c / a;
      if (a > 0) t1 = std::min(t1, t);
      else t0 = std::max(t0, t);
      if (t0 > t1) return true;
    }
    return std::isfinite(t0) || std::isfinite(t1);
  }
  return false;
}

struct CompactProfile {
  const geo::StarBody* body = nullptr;
  Vec center;
  // multiplicative profile along the ray from the body center
  std::function<double(double r, double rho)> weight;
};

bool compact_profile(const TestFunction& f, CompactProfile& out) {
  if (const auto* ind = std::get_if<TestFunction::Indicator>(&f.family())) {
    if (!ind->body.supports_ray_clipping()) return false;
    out.body = &ind->body;
    out.center = ind->center;
    out.weight = [](double, double) { return 1.0; };
    return true;
  }
  if (const auto* pk = std::get_if<TestFunction::SConcavePeak>(&f.family())) {
    if (!pk->gauge_body.supports_ray_clipping()) return false;
    double inv_s = 1.0 / pk->s;
    out.body = &pk->gauge_body;
    out.center = pk->x0;
    out.weight = [inv_s](double r, double rho) {
      double g = rho > 0 ? r / rho : kInf;
      return g < 1.0 ? std::pow(1.0 - g, inv_s) : 0.0;
    };
    return true;
  }
  return false;
}

// integral over the support body of h of f(x + y) h(x) dx via a polar rule
// with exact radial clipping against the support of f
double correlation_polar(const TestFunction& f, const TestFunction& h, const Vec& y,
                         const QuadConfig& cfg) {
  CompactProfile prof;
  if (!compact_profile(h, prof)) throw std::logic_error("correlation_polar: unsupported h");
  int n = h.dim();
  int res = n == 2 ? std::max(96, 2 * cfg.nodes_per_axis) : std::max(12, cfg.nodes_per_axis / 3);
  static thread_local std::map<std::pair<int, int>, geo::SphereGrid> grid_cache;
  auto key = std::make_pair(n, res);
  auto it = grid_cache.find(key);
  if (it == grid_cache.end()) it = grid_cache.emplace(key, geo::SphereGrid::make(n, res)).first;
  const geo::SphereGrid& sg = it->second;

  int gl = gl_order_for(cfg);
  double total = 0;
  for (std::size_t j = 0; j < sg.size(); ++j) {
    const Vec& th = sg.nodes[j];
    double rho = prof.body->radial(th);
    if (!(rho > 0)) continue;
    double a = 0, b = rho;
    double c0, c1;
    // clip against supp f along r -> prof.center + r th + y
    if (ray_support_interval(f, prof.center + y, th, c0, c1)) {
      a = std::max(a, c0);
      b = std::min(b, c1);
      if (a >= b) continue;
    }
    auto integrand = [&](double r) {
      Vec x = prof.center + th * r;
      return f(x + y) * prof.weight(r, rho) * std::pow(r, n - 1);
    };
    // grade toward the support boundary; profile derivatives can blow there
    double seg = 0;
    if (b >= rho * (1.0 - 1e-12)) {
      auto panels = graded_panels_toward_b(a, b, 8, 2.5);
      seg = integrate_panels(integrand, panels, gl);
    } else {
      seg = integrate_panels(integrand, uniform_panels(a, b, 3), gl);
    }
    total += sg.weights[j] * seg;
  }
  return total;
}

// generic tensor fallback over the intersection of effective boxes
double correlation_tensor(const TestFunction& f, const TestFunction& h, const Vec& y,
                          const QuadConfig& cfg) {
  bool trunc = false, div = false;
  Box bh = effective_box(h, 1.0, cfg, &trunc, &div);
  Box bf = effective_box(f, 1.0, cfg, &trunc, &div);
  // x must lie in supp h and in supp f - y
  Box shifted{bf.lo - y, bf.hi - y, bf.empty};
  Box box = box_intersect(bh, shifted);
  if (box.empty) return 0.0;
  int n = f.dim();
  std::vector<std::vector<double>> centers(n);
  Vec ch = h.support_center();
  Vec cf = f.support_center() - y;
  for (int i = 0; i < n; ++i) centers[i] = {ch[i], cf[i]};
  double scale = std::min(family_scale(f), family_scale(h));
  return tensor_integrate(box, centers, scale, gl_order_for(cfg),
                          [&](const Vec& x) { return f(x + y) * h(x); });
}

}  // namespace

double correlation(const TestFunction& f, const TestFunction& h, const Vec& y,
                   const QuadConfig& cfg) {
  if (f.dim() != h.dim() || y.n != f.dim())
    throw std::invalid_argument("correlation: dimension mismatch");
  int n = f.dim();

  // Gaussian x Gaussian: closed form
  const auto* gf = std::get_if<TestFunction::Gaussian>(&f.family());
  const auto* gh = std::get_if<TestFunction::Gaussian>(&h.family());
  if (gf && gh) {
    Mat sum = gf->cov + gh->cov;
    Mat inv = sum.inverse();
    Vec m = y - (gf->center - gh->center);
    double q = m.dot(inv.apply(m));
    double pref = gf->a * gh->a * std::pow(2.0 * kPi, 0.5 * n) * gf->sqrt_det_cov *
                  gh->sqrt_det_cov / std::sqrt(sum.det());
    return pref * std::exp(-0.5 * q);
  }

  // indicator pairs with exact overlap formulas
  const auto* inf_ = std::get_if<TestFunction::Indicator>(&f.family());
  const auto* inh = std::get_if<TestFunction::Indicator>(&h.family());
  if (inf_ && inh) {
    const auto* boxf = std::get_if<geo::StarBody::CenteredBox>(&inf_->body.kind());
    const auto* boxh = std::get_if<geo::StarBody::CenteredBox>(&inh->body.kind());
    if (boxf && boxh) {
      double v = 1;
      for (int i = 0; i < n; ++i) {
        double cf = inf_->center[i] - y[i], ch = inh->center[i];
        v *= overlap_len(cf - boxf->halfwidth[i], cf + boxf->halfwidth[i],
                         ch - boxh->halfwidth[i], ch + boxh->halfwidth[i]);
        if (v == 0) return 0.0;
      }
      return v;
    }
    const auto* ballf = std::get_if<geo::StarBody::Ball>(&inf_->body.kind());
    const auto* ballh = std::get_if<geo::StarBody::Ball>(&inh->body.kind());
    if (ballf && ballh) {
      double d = (y - (inf_->center - inh->center)).norm();
      return ball_overlap_volume(n, ballf->radius, ballh->radius, d);
    }
  }

  // polar rule over a compact support
  CompactProfile prof;
  if (compact_profile(h, prof)) return correlation_polar(f, h, y, cfg);
  if (compact_profile(f, prof)) return correlation_polar(h, f, -y, cfg);  // G(f,h)(y) = G(h,f)(-y)

  return correlation_tensor(f, h, y, cfg);
}

double correlation_error_scale(const TestFunction& f, const TestFunction& h,
                               const QuadConfig& cfg) {
  const auto* gf = std::get_if<TestFunction::Gaussian>(&f.family());
  const auto* gh = std::get_if<TestFunction::Gaussian>(&h.family());
  bool boxes = false, balls = false;
  if (const auto* inf_ = std::get_if<TestFunction::Indicator>(&f.family())) {
    if (const auto* inh = std::get_if<TestFunction::Indicator>(&h.family())) {
      boxes = std::holds_alternative<geo::StarBody::CenteredBox>(inf_->body.kind()) &&
              std::holds_alternative<geo::StarBody::CenteredBox>(inh->body.kind());
      balls = std::holds_alternative<geo::StarBody::Ball>(inf_->body.kind()) &&
              std::holds_alternative<geo::StarBody::Ball>(inh->body.kind());
    }
  }
  QuadConfig c = cfg;
  double l1f = lp_norm(f, 1.0, c);
  double l1h = lp_norm(h, 1.0, c);
  double scale = std::min(f.sup_value() * l1h, h.sup_value() * l1f);
  if ((gf && gh) || boxes || balls) return 1e-13 * scale;
  return 5.0 * cfg.rel_tol * scale;
}

double inner_product(const TestFunction& f, const TestFunction& h, const QuadConfig& cfg) {
  return correlation(f, h, Vec(f.dim()), cfg);
}

double integral_power_product(const TestFunction& f, double ea, const TestFunction& h, double eb,
                              const QuadConfig& cfg) {
  if (f.dim() != h.dim()) throw std::invalid_argument("integral_power_product: dimension mismatch");
  int n = f.dim();
  bool trunc = false, div = false;
  Box bf = effective_box(f, std::max(ea, 1e-3), cfg, &trunc, &div);
  Box bh = effective_box(h, std::max(eb, 1e-3), cfg, &trunc, &div);
  Box box = ea > 0 && eb > 0 ? box_intersect(bf, bh) : (ea > 0 ? bf : bh);
  if (box.empty) return 0.0;
  std::vector<std::vector<double>> centers(n);
  Vec cf = f.support_center(), ch = h.support_center();
  for (int i = 0; i < n; ++i) centers[i] = {cf[i], ch[i]};
  double scale = std::min(family_scale(f), family_scale(h));
  return tensor_integrate(box, centers, scale, gl_order_for(cfg), [&](const Vec& x) {
    double fv = f(x), hv = h(x);
    double a = ea == 0.0 ? 1.0 : (fv > 0 ? std::pow(fv, ea) : 0.0);
    double b = eb == 0.0 ? 1.0 : (hv > 0 ? std::pow(hv, eb) : 0.0);
    return a * b;
  });
}

// ---------------------------------------------------------------------------
// superlevel sets and symmetrization

double superlevel_volume(const TestFunction& f, double t, const QuadConfig& cfg) {
  if (!(t > 0)) throw std::invalid_argument("superlevel_volume: t must be positive");
  int n = f.dim();
  if (t > f.sup_value()) return 0.0;
  if (const auto* e = std::get_if<TestFunction::HlsExtremal>(&f.family())) {
    double r2 = std::pow(e->a / t, 2.0 / (n + e->alpha)) - e->b * e->b;
    if (r2 <= 0) return 0.0;
    return sf::unit_ball_volume(n) * std::pow(r2, 0.5 * n) / std::fabs(e->phi.det());
  }
  if (const auto* s = std::get_if<TestFunction::SimplexExponential>(&f.family())) {
    if (t >= s->a) return 0.0;
    double L = std::log(s->a / t);
    return s->gauge_body.exact_volume() * std::pow(L, n);
  }
  if (const auto* pk = std::get_if<TestFunction::SConcavePeak>(&f.family())) {
    double g = 1.0 - std::pow(t, pk->s);
    if (g <= 0) return 0.0;
    return pk->gauge_body.exact_volume() * std::pow(g, n);
  }
  if (const auto* g = std::get_if<TestFunction::Gaussian>(&f.family())) {
    if (t >= g->a) return 0.0;
    double q = 2.0 * std::log(g->a / t);
    return sf::unit_ball_volume(n) * g->sqrt_det_cov * std::pow(q, 0.5 * n);
  }
  if (const auto* ind = std::get_if<TestFunction::Indicator>(&f.family())) {
    if (t > 1.0) return 0.0;
    return ind->body.has_exact_volume()
               ? ind->body.exact_volume()
               : superlevel_volume_mc(f, t, cfg).value;
  }
  return superlevel_volume_mc(f, t, cfg).value;
}

McEst superlevel_volume_mc(const TestFunction& f, double t, const QuadConfig& cfg) {
  Vec c = f.support_center();
  double R = f.compact_support() ? f.support_radius()
                                 : f.tail_radius(1.0, cfg.rel_tol).value;
  Box box = centered_box(c, R * (1.0 + 1e-9));
  double vol = 1;
  for (int i = 0; i < f.dim(); ++i) vol *= box.hi[i] - box.lo[i];
  Rng rng(cfg.seed, 0x53555045ull /* superlevel stream */);
  long hits = 0;
  for (long i = 0; i < cfg.mc_samples; ++i) {
    Vec x = rng.uniform_box(box.lo, box.hi);
    if (f(x) >= t) ++hits;
  }
  double p = static_cast<double>(hits) / cfg.mc_samples;
  McEst est;
  est.value = p * vol;
  est.std_error = vol * std::sqrt(std::max(p * (1 - p), 1e-300) / cfg.mc_samples);
  return est;
}

double RadialProfile::eval(double r) const {
  // radii ascend as levels descend; find the first level whose ball reaches r
  if (radii.empty()) return 0.0;
  auto it = std::lower_bound(radii.begin(), radii.end(), r);
  if (it == radii.end()) return 0.0;
  return levels[it - radii.begin()];
}

RadialProfile schwarz_symmetrize(const TestFunction& f, const QuadConfig& cfg, int num_levels) {
  RadialProfile prof;
  prof.dim = f.dim();
  double top = f.sup_value();
  if (!(top > 0)) return prof;
  double wn = sf::unit_ball_volume(f.dim());
  double floor_ratio = cfg.rel_tol;
  double prev_r = -1.0;
  for (int k = 0; k < num_levels; ++k) {
    double t = top * std::pow(floor_ratio, static_cast<double>(k) / (num_levels - 1));
    double v = superlevel_volume(f, t, cfg);
    double r = std::pow(v / wn, 1.0 / f.dim());
    if (r < prev_r - 1e-12 * std::max(1.0, prev_r))
      throw std::logic_error("schwarz_symmetrize: superlevel volumes increased with level");
    prev_r = std::max(prev_r, r);
    prof.levels.push_back(t);
    prof.radii.push_back(std::max(r, prev_r));
  }
  return prof;
}

TestFunction symmetral_closed(const TestFunction& f) {
  int n = f.dim();
  if (const auto* e = std::get_if<TestFunction::HlsExtremal>(&f.family())) {
    double c = std::pow(std::fabs(e->phi.det()), 1.0 / n);
    return TestFunction::hls_extremal(e->a, e->b, Mat::identity(n) * c, Vec(n), e->alpha);
  }
  auto ball_of_same_volume = [&](const geo::StarBody& body) {
    double v = body.exact_volume();
    return geo::StarBody::ball(n, std::pow(v / sf::unit_ball_volume(n), 1.0 / n));
  };
  if (const auto* s = std::get_if<TestFunction::SimplexExponential>(&f.family()))
    return TestFunction::simplex_exponential(s->a, ball_of_same_volume(s->gauge_body), Vec(n));
  if (const auto* pk = std::get_if<TestFunction::SConcavePeak>(&f.family()))
    return TestFunction::s_concave_peak(pk->s, ball_of_same_volume(pk->gauge_body), Vec(n));
  if (const auto* g = std::get_if<TestFunction::Gaussian>(&f.family())) {
    double d = std::pow(g->cov.det(), 1.0 / n);
    return TestFunction::gaussian(g->a, Mat::identity(n) * d, Vec(n));
  }
  if (const auto* ind = std::get_if<TestFunction::Indicator>(&f.family()))
    return TestFunction::indicator(ball_of_same_volume(ind->body), Vec(n));
  throw std::logic_error("symmetral_closed: grid-sampled data has no closed symmetral");
}

// ---------------------------------------------------------------------------
// concavity probing

ConcavityReport concavity_check(const TestFunction& f, ConcavityClass cls, double s, long trials,
                                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("concavity_check: trials must be >= 1");
  ConcavityReport rep;
  rep.trials = trials;
  Vec c = f.support_center();
  double R = f.compact_support() ? f.support_radius()
                                 : f.tail_radius(1.0, 1e-3).value;
  Box box = centered_box(c, R);
  Rng rng(seed, 0x434f4e43ull /* concavity stream */);
  const double slack = 1e-9;
  for (long i = 0; i < trials; ++i) {
    // draw support points (the families are concave on their supports only)
    Vec x(f.dim()), y(f.dim());
    double fx = 0, fy = 0;
    int tries = 0;
    do {
      x = rng.uniform_box(box.lo, box.hi);
      fx = f(x);
    } while (fx <= 0 && ++tries < 64);
    tries = 0;
    do {
      y = rng.uniform_box(box.lo, box.hi);
      fy = f(y);
    } while (fy <= 0 && ++tries < 64);
    if (fx <= 0 || fy <= 0) continue;
    double lam = rng.uniform();
    Vec mid = x * (1.0 - lam) + y * lam;
    double fm = f(mid);
    double viol = 0;
    if (cls == ConcavityClass::Log) {
      double rhs = (1.0 - lam) * std::log(fx) + lam * std::log(fy);
      double lhs = fm > 0 ? std::log(fm) : -kInf;
      viol = rhs - lhs;  // positive = violation
    } else {
      double rhs = (1.0 - lam) * std::pow(fx, s) + lam * std::pow(fy, s);
      double lhs = std::pow(fm, s);
      viol = (rhs - lhs) / std::max(rhs, 1e-300);
    }
    if (viol > slack) {
      ++rep.violations;
      if (viol > rep.worst) {
        rep.worst = viol;
        rep.worst_x = x;
        rep.worst_y = y;
        rep.worst_lambda = lam;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// affine reparameterization

TestFunction transform(const TestFunction& f, const Mat& map, const Vec& shift) {
  Mat inv = map.inverse();
  int n = f.dim();
  if (const auto* e = std::get_if<TestFunction::HlsExtremal>(&f.family()))
    return TestFunction::hls_extremal(e->a, e->b, e->phi * inv, map.apply(e->x0) + shift,
                                      e->alpha);
  if (const auto* s = std::get_if<TestFunction::SimplexExponential>(&f.family()))
    return TestFunction::simplex_exponential(s->a, geo::StarBody::image(map, s->gauge_body),
                                             map.apply(s->x0) + shift);
  if (const auto* pk = std::get_if<TestFunction::SConcavePeak>(&f.family()))
    return TestFunction::s_concave_peak(pk->s, geo::StarBody::image(map, pk->gauge_body),
                                        map.apply(pk->x0) + shift);
  if (const auto* g = std::get_if<TestFunction::Gaussian>(&f.family()))
    return TestFunction::gaussian(g->a, map * g->cov * map.transpose(),
                                  map.apply(g->center) + shift);
  if (const auto* ind = std::get_if<TestFunction::Indicator>(&f.family()))
    return TestFunction::indicator(geo::StarBody::image(map, ind->body),
                                   map.apply(ind->center) + shift);
  // resample grid data on the image lattice
  const auto& gs = std::get<TestFunction::GridSampled>(f.family());
  Vec lo(n), hi(n);
  bool first = true;
  int corners = 1 << n;
  for (int cmask = 0; cmask < corners; ++cmask) {
    Vec corner(n);
    for (int i = 0; i < n; ++i) corner[i] = (cmask >> i) & 1 ? gs.hi[i] : gs.lo[i];
    Vec img = map.apply(corner) + shift;
    for (int i = 0; i < n; ++i) {
      if (first || img[i] < lo[i]) lo[i] = img[i];
      if (first || img[i] > hi[i]) hi[i] = img[i];
    }
    first = false;
  }
  std::array<int, 3> shape = gs.shape;
  std::vector<double> vals;
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= shape[i];
  vals.reserve(count);
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = rem % shape[i];
      rem /= shape[i];
    }
    Vec x(n);
    for (int i = 0; i < n; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (shape[i] - 1);
    vals.push_back(f(inv.apply(x - shift)));
  }
  return TestFunction::grid_sampled(lo, hi, shape, std::move(vals));
}

// ---------------------------------------------------------------------------
// grid IO

void save_grid_csv(const TestFunction& f, const std::string& csv_path,
                   const std::string& json_path) {
  const auto* gs = std::get_if<TestFunction::GridSampled>(&f.family());
  if (!gs) throw std::invalid_argument("save_grid_csv: function is not grid-sampled");
  int n = f.dim();
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("save_grid_csv: cannot open " + csv_path);
  csv.precision(17);
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= gs->shape[i];
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % gs->shape[i]);
      rem /= gs->shape[i];
    }
    for (int i = 0; i < n; ++i) {
      double x = gs->lo[i] + (gs->hi[i] - gs->lo[i]) * idx[i] / (gs->shape[i] - 1);
      csv << x << ",";
    }
    csv << gs->values[flat] << "\n";
  }
  nlohmann::json j;
  j["dim"] = n;
  j["shape"] = std::vector<int>(gs->shape.begin(), gs->shape.begin() + n);
  j["lo"] = std::vector<double>(gs->lo.c.begin(), gs->lo.c.begin() + n);
  j["hi"] = std::vector<double>(gs->hi.c.begin(), gs->hi.c.begin() + n);
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("save_grid_csv: cannot open " + json_path);
  js << j.dump(2) << "\n";
}

TestFunction load_grid_csv(const std::string& csv_path, const std::string& json_path) {
  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("load_grid_csv: cannot open " + json_path);
  nlohmann::json j;
  js >> j;
  int n = j.at("dim").get<int>();
  std::array<int, 3> shape{1, 1, 1};
  auto sh = j.at("shape").get<std::vector<int>>();
  for (int i = 0; i < n; ++i) shape[i] = sh[i];
  Vec lo(n), hi(n);
  auto lo_v = j.at("lo").get<std::vector<double>>();
  auto hi_v = j.at("hi").get<std::vector<double>>();
  for (int i = 0; i < n; ++i) {
    lo[i] = lo_v[i];
    hi[i] = hi_v[i];
  }
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("load_grid_csv: cannot open " + csv_path);
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= shape[i];
  std::vector<double> values;
  values.reserve(count);
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    auto pos = line.find_last_of(',');
    values.push_back(std::stod(line.substr(pos + 1)));
  }
  return TestFunction::grid_sampled(lo, hi, shape, std::move(values));
}

}  // namespace ahls::fn
