#include "ahls/hls.hpp"

#include <cmath>

#include "ahls/rng.hpp"

namespace ahls::hls {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

double sphere_surface(int n) { return sf::sphere_area(n); }

ValueEst polar_route(const fn::TestFunction& f, const fn::TestFunction& h, const geo::StarBody& K,
                     double alpha, const geo::SphereGrid& grid, const QuadConfig& cfg) {
  sa::AlphaBodyResult s = sa::s_alpha_body(f, h, alpha, grid, cfg);
  int n = grid.dim;
  double value = n * geo::dual_mixed_volume(K, s.body, alpha, grid);
  // error: perturb radii by the node error estimates
  double err = 0;
  const auto& sampled = std::get<geo::StarBody::Sampled>(s.body.kind());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double rk = K.radial(grid.nodes[j]);
    double rl = sampled.radii[j];
    err += grid.weights[j] * std::pow(rk, n - alpha) * alpha * std::pow(rl, alpha - 1.0) *
           s.node_errors[j];
  }
  return {value, err};
}

// y ~ uniform over h's certified box, xi ~ uniform sphere, t from the exact
// density alpha t^{alpha-1} / T^alpha on (0, T]
ValueEst direct_mc(const fn::TestFunction& f, const fn::TestFunction& h, const geo::StarBody& K,
                   double alpha, const QuadConfig& cfg) {
  int n = f.dim();
  Vec ch = h.support_center();
  double Rh = h.compact_support() ? h.support_radius() : h.tail_radius(1.0, cfg.rel_tol).value;
  double T;
  if (f.compact_support() && h.compact_support()) {
    T = f.support_radius() + Rh + (f.support_center() - ch).norm() + 1e-9;
  } else {
    double Rf = f.compact_support() ? f.support_radius() : f.tail_radius(1.0, cfg.rel_tol).value;
    T = 2.0 * (Rf + Rh + (f.support_center() - ch).norm());
  }
  double box_vol = 1;
  Vec lo = ch, hi = ch;
  for (int i = 0; i < n; ++i) {
    lo[i] -= Rh;
    hi[i] += Rh;
    box_vol *= 2.0 * Rh;
  }
  double pref = box_vol * sphere_surface(n) * std::pow(T, alpha) / alpha;
  Rng rng(cfg.seed, 0x4d435331ull /* direct-mc stream */);
  double sum = 0, sum2 = 0;
  long N = cfg.mc_samples;
  for (long i = 0; i < N; ++i) {
    Vec y = rng.uniform_box(lo, hi);
    double hy = h(y);
    double sample = 0;
    if (hy > 0) {
      Vec xi = rng.sphere_dir(n);
      double t = T * std::pow(rng.uniform(), 1.0 / alpha);
      double fv = f(y + xi * t);
      if (fv > 0) {
        double rk = K.radial(xi);
        sample = fv * hy * std::pow(rk, n - alpha) * pref;
      }
    }
    sum += sample;
    sum2 += sample * sample;
  }
  double mean = sum / N;
  double var = std::max(0.0, sum2 / N - mean * mean);
  double se = std::sqrt(var / N);
  // truncation bias of the y-box and the t-cutoff enters the error bar
  double bias = 4.0 * cfg.rel_tol * std::fabs(mean);
  return {mean, se + bias};
}

void attach_config(ChainReport& rep, const QuadConfig& cfg) {
  rep.metadata["config"] = {{"box_radius", cfg.box_radius},
                            {"nodes_per_axis", cfg.nodes_per_axis},
                            {"t_max", cfg.t_max},
                            {"t_panels", cfg.t_panels},
                            {"mc_samples", cfg.mc_samples},
                            {"seed", cfg.seed},
                            {"rel_tol", cfg.rel_tol},
                            {"abs_tol", cfg.abs_tol},
                            {"near_equality_gap", cfg.near_equality_gap}};
}

}  // namespace

ValueEst hls_functional(const fn::TestFunction& f, const fn::TestFunction& h,
                        const geo::StarBody& K, double alpha, const geo::SphereGrid& grid,
                        const QuadConfig& cfg, Method method) {
  if (!(alpha > 0) || alpha == static_cast<double>(f.dim()))
    throw std::invalid_argument("hls_functional: need alpha > 0, alpha != n");
  if (f.dim() != h.dim() || f.dim() != K.dim())
    throw std::invalid_argument("hls_functional: dimension mismatch");
  return method == Method::Polar ? polar_route(f, h, K, alpha, grid, cfg)
                                 : direct_mc(f, h, K, alpha, cfg);
}

ChainReport verify_theorem_1_1(const fn::TestFunction& f, const fn::TestFunction& h,
                               const sf::HlsParams& params, const geo::SphereGrid& grid,
                               const QuadConfig& cfg) {
  if (!params.regime_theorem_1_1())
    throw std::domain_error("verify_theorem_1_1: parameters outside the 0<alpha<n regime");
  int n = params.n;
  double a = params.alpha;
  bool sharp = std::fabs(params.p - 2.0 * n / (n + a)) < 1e-12 &&
               std::fabs(params.r - 2.0 * n / (n + a)) < 1e-12;
  double C = sharp ? sf::hls_sharp_constant(n, a) : sf::hls_constant_bound(params);

  fn::IntegralEst nf = fn::lp_norm_ex(f, params.p, cfg);
  fn::IntegralEst nh = fn::lp_norm_ex(h, params.r, cfg);
  double lhs = C * nf.value * nh.value;
  double lhs_err = C * (nf.err * nh.value + nh.err * nf.value);

  sa::AlphaBodyResult s = sa::s_alpha_body(f, h, a, grid, cfg);
  double vol = geo::volume(s.body, grid);
  double mid = n * std::pow(sf::unit_ball_volume(n), (n - a) / n) * std::pow(vol, a / n);
  double mid_err = mid * (a / n) * (s.volume_err / std::max(vol, 1e-300));

  geo::StarBody ball = geo::StarBody::ball(n, 1.0);
  ValueEst rhs = direct_mc(f, h, ball, a, cfg);

  ChainReport rep;
  rep.name = "thm11";
  rep.add_term("C_norm_product", lhs, lhs_err);
  rep.add_term("affine_term", mid, mid_err);
  rep.add_term("double_integral", rhs.value, rhs.err);
  rep.add_relation(0, 1, ChainReport::Dir::Ge);
  rep.add_relation(1, 2, ChainReport::Dir::Ge);
  rep.evaluate(cfg.abs_tol + cfg.rel_tol * lhs, cfg.near_equality_gap);
  rep.metadata = {{"n", n},
                  {"alpha", a},
                  {"p", params.p},
                  {"r", params.r},
                  {"constant", sharp ? "sharp" : "upper bound, not sharp"},
                  {"constant_value", C}};
  attach_config(rep, cfg);
  return rep;
}

ChainReport verify_theorem_1_2(const fn::TestFunction& f, const fn::TestFunction& h,
                               const sf::HlsParams& params, const geo::SphereGrid& grid,
                               const QuadConfig& cfg) {
  if (!params.regime_theorem_1_2())
    throw std::domain_error("verify_theorem_1_2: parameters outside the alpha>n regime");
  int n = params.n;
  double a = params.alpha;
  bool sharp = std::fabs(params.p - 2.0 * n / (n + a)) < 1e-12 &&
               std::fabs(params.r - 2.0 * n / (n + a)) < 1e-12;
  double C = sharp ? sf::hls_sharp_constant(n, a) : sf::hls_constant_bound(params);

  fn::IntegralEst nf = fn::lp_norm_ex(f, params.p, cfg);
  fn::IntegralEst nh = fn::lp_norm_ex(h, params.r, cfg);
  if (nf.diverged || nh.diverged)
    throw std::domain_error("verify_theorem_1_2: divergent quasi-norm");
  double lhs = C * nf.value * nh.value;
  double lhs_err = C * (nf.err * nh.value + nh.err * nf.value);

  sa::AlphaBodyResult s = sa::s_alpha_body(f, h, a, grid, cfg);
  double vol = geo::volume(s.body, grid);
  double mid = n * std::pow(sf::unit_ball_volume(n), (n - a) / n) * std::pow(vol, a / n);
  double mid_err = mid * (a / n) * (s.volume_err / std::max(vol, 1e-300));

  geo::StarBody ball = geo::StarBody::ball(n, 1.0);
  ValueEst rhs = direct_mc(f, h, ball, a, cfg);

  ChainReport rep;
  rep.name = "thm12";
  rep.add_term("C_norm_product", lhs, lhs_err);
  rep.add_term("affine_term", mid, mid_err);
  rep.add_term("double_integral", rhs.value, rhs.err);
  rep.add_relation(0, 1, ChainReport::Dir::Le);
  rep.add_relation(1, 2, ChainReport::Dir::Le);
  rep.evaluate(cfg.abs_tol + cfg.rel_tol * std::fabs(rhs.value), cfg.near_equality_gap);
  rep.metadata = {{"n", n},
                  {"alpha", a},
                  {"p", params.p},
                  {"r", params.r},
                  {"constant", sharp ? "sharp" : "upper bound, not sharp"},
                  {"constant_value", C}};
  attach_config(rep, cfg);
  return rep;
}

namespace {

ChainReport reverse_chain(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                          double constant, const std::string& name, const geo::SphereGrid& grid,
                          const QuadConfig& cfg) {
  int n = f.dim();
  double a = alpha;
  sa::AlphaBodyResult s = sa::s_alpha_body(f, h, a, grid, cfg);
  double vol = geo::volume(s.body, grid);
  double first = constant * std::pow(vol, a / n);
  double first_err = first * (a / n) * (s.volume_err / std::max(vol, 1e-300));

  double l1f = fn::lp_norm(f, 1.0, cfg);
  double l1h = fn::lp_norm(h, 1.0, cfg);
  double fh = fn::inner_product(f, h, cfg);
  double middle = std::pow(l1f * l1h, a / n) * std::pow(fh, 1.0 - a / n);
  double middle_err = 10.0 * cfg.rel_tol * middle;

  // || f^{(n+a)/2n} h^{(n-a)/2n} ||_q with q = 2n/(n+a) raised to q gives
  // integral of f h^{(n-a)/(n+a)}; same with roles swapped
  double q = 2.0 * n / (n + a);
  double e2 = (n - a) / (n + a);
  double i1 = fn::integral_power_product(f, 1.0, h, e2, cfg);
  double i2 = fn::integral_power_product(h, 1.0, f, e2, cfg);
  double last = std::pow(i1, 1.0 / q) * std::pow(i2, 1.0 / q);
  double last_err = 10.0 * cfg.rel_tol * last;

  ChainReport rep;
  rep.name = name;
  rep.add_term("scaled_volume_term", first, first_err);
  rep.add_term("mass_correlation_term", middle, middle_err);
  rep.add_term("mixed_norm_product", last, last_err);
  if (a < n) {
    rep.add_relation(0, 1, ChainReport::Dir::Ge);
    rep.add_relation(1, 2, ChainReport::Dir::Ge);
  } else {
    rep.add_relation(0, 1, ChainReport::Dir::Le);
    rep.add_relation(1, 2, ChainReport::Dir::Le);
  }
  rep.evaluate(cfg.abs_tol + cfg.rel_tol * std::fabs(middle), cfg.near_equality_gap);
  rep.metadata = {{"n", n}, {"alpha", a}, {"constant_value", constant}};
  attach_config(rep, cfg);
  return rep;
}

}  // namespace

ChainReport verify_theorem_1_3(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                               const geo::SphereGrid& grid, const QuadConfig& cfg) {
  if (!(alpha > 0) || alpha == static_cast<double>(f.dim()))
    throw std::invalid_argument("verify_theorem_1_3: need alpha > 0, alpha != n");
  double constant = sf::reverse_constant_logconcave(f.dim(), alpha);
  return reverse_chain(f, h, alpha, constant, "thm13", grid, cfg);
}

ChainReport verify_corollary_sconcave(const fn::TestFunction& f, const fn::TestFunction& h,
                                      double alpha, double s, const geo::SphereGrid& grid,
                                      const QuadConfig& cfg) {
  if (!(alpha > 0) || alpha == static_cast<double>(f.dim()))
    throw std::invalid_argument("verify_corollary_sconcave: need alpha > 0, alpha != n");
  double constant = sf::reverse_constant_sconcave(f.dim(), alpha, s);
  ChainReport rep = reverse_chain(f, h, alpha, constant, "corollary-s", grid, cfg);
  rep.metadata["s"] = s;
  return rep;
}

ChainReport riesz_rearrangement_check(const fn::TestFunction& A, const fn::TestFunction& B,
                                      const fn::TestFunction& C, const QuadConfig& cfg) {
  if (!A.is_indicator() || !B.is_indicator() || !C.is_indicator())
    throw std::invalid_argument("riesz_rearrangement_check: arguments must be indicators");
  int n = A.dim();

  auto mc_triple = [&](const fn::TestFunction& a, const fn::TestFunction& b,
                       const fn::TestFunction& c, std::uint64_t stream) -> ValueEst {
    Vec ca = a.support_center(), cc = c.support_center();
    double Ra = a.support_radius(), Rc = c.support_radius();
    Vec la = ca, ha = ca, lc = cc, hc = cc;
    double va = 1, vc = 1;
    for (int i = 0; i < n; ++i) {
      la[i] -= Ra;
      ha[i] += Ra;
      lc[i] -= Rc;
      hc[i] += Rc;
      va *= 2 * Ra;
      vc *= 2 * Rc;
    }
    Rng rng(cfg.seed, stream);
    long hits = 0;
    long N = cfg.mc_samples;
    for (long i = 0; i < N; ++i) {
      Vec y = rng.uniform_box(la, ha);
      Vec x = rng.uniform_box(lc, hc);
      if (a(y) > 0 && c(x) > 0 && b(x - y) > 0) ++hits;
    }
    double p = static_cast<double>(hits) / N;
    double value = p * va * vc;
    double se = va * vc * std::sqrt(std::max(p * (1 - p), 1e-300) / N);
    return {value, se};
  };

  auto symmetral = [&](const fn::TestFunction& g) { return fn::symmetral_closed(g); };

  ValueEst lhs = mc_triple(A, B, C, 0x52530000ull);
  ValueEst rhs = mc_triple(symmetral(A), symmetral(B), symmetral(C), 0x52530001ull);

  ChainReport rep;
  rep.name = "riesz";
  rep.add_term("triple_integral", lhs.value, 3.0 * lhs.err);
  rep.add_term("symmetrized_triple_integral", rhs.value, 3.0 * rhs.err);
  rep.add_relation(0, 1, ChainReport::Dir::Le);
  rep.evaluate(cfg.abs_tol, cfg.near_equality_gap);
  rep.metadata = {{"n", n}, {"mc_samples", cfg.mc_samples}};
  attach_config(rep, cfg);
  return rep;
}

ChainReport check_representation_identity(const fn::TestFunction& f, const fn::TestFunction& h,
                                          const geo::StarBody& K, double alpha,
                                          const geo::SphereGrid& grid, const QuadConfig& cfg) {
  ValueEst polar = hls_functional(f, h, K, alpha, grid, cfg, Method::Polar);
  ValueEst mc = hls_functional(f, h, K, alpha, grid, cfg, Method::DirectMc);
  ChainReport rep;
  rep.name = "identity-3a";
  rep.add_term("polar_route", polar.value, polar.err);
  rep.add_term("direct_mc", mc.value, 3.0 * mc.err);
  rep.add_relation(0, 1, ChainReport::Dir::Eq);
  rep.evaluate(cfg.abs_tol + cfg.rel_tol * std::fabs(polar.value), cfg.near_equality_gap);
  rep.metadata = {{"alpha", alpha}, {"n", f.dim()}};
  attach_config(rep, cfg);
  return rep;
}

}  // namespace ahls::hls
