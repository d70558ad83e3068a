#pragma once

#include <vector>

#include "ahls/functions.hpp"
#include "ahls/geometry.hpp"
#include "ahls/report.hpp"
#include "ahls/specialfns.hpp"

namespace ahls::sa {

// One radial value rho_{S_alpha(f,h)}(xi), its alpha-th power (the computed
// ray moment), a propagated error estimate on rho, and the convergence flags.
struct RhoResult {
  double moment = 0.0;  // integral of t^{alpha-1} G(f,h)(t xi) dt
  double rho = 0.0;     // moment^{1/alpha}
  double err = 0.0;     // absolute error estimate on rho
  bool diverged = false;
  bool truncated = false;
};

// Ray moment of the correlation. The t^{alpha-1} weight is removed exactly by
// the substitution t = u^{1/alpha} on the head interval; the remaining range
// uses geometric Gauss-Legendre panels; the cutoff is certified by the pair's
// decay envelopes (exact for compact supports).
RhoResult rho_s_alpha_ex(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                         const Vec& xi, const QuadConfig& cfg);
double rho_s_alpha(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                   const Vec& xi, const QuadConfig& cfg);  // throws on certified divergence

struct AlphaBodyResult {
  geo::StarBody body;  // Sampled kind over the construction grid
  double alpha = 0.0;
  std::vector<double> node_errors;  // absolute error estimates per radial value
  std::vector<bool> node_flags;     // divergence/truncation warnings per node
  QuadConfig cfg;
  double volume_err = 0.0;  // propagated error estimate for volume(body)

  nlohmann::json to_json() const;
};

AlphaBodyResult s_alpha_body(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                             const geo::SphereGrid& grid, const QuadConfig& cfg);

// R_alpha(f,h) = (alpha / integral of fh)^{1/alpha} S_alpha(f,h), alpha > 0
AlphaBodyResult radial_mean_body_fn(const fn::TestFunction& f, const fn::TestFunction& h,
                                    double alpha, const geo::SphereGrid& grid,
                                    const QuadConfig& cfg);

// Asymmetric fractional polar projection body for -1 < alpha < 0:
//   rho^alpha(xi) = integral over t of t^{alpha-1} integral of
//                   ((f(x+t xi) - h(x))_-)^2 dx dt
// with (a)_- = max(-a, 0); the negative part is squared (for indicator
// arguments squaring is idempotent and the formula reduces to the measure of
// {x in F : x + t xi not in E}).
RhoResult polar_projection_rho_neg(const fn::TestFunction& f, const fn::TestFunction& h,
                                   double alpha, const Vec& xi, const QuadConfig& cfg);
AlphaBodyResult polar_projection_body_neg(const fn::TestFunction& f, const fn::TestFunction& h,
                                          double alpha, const geo::SphereGrid& grid,
                                          const QuadConfig& cfg);

// R_alpha(f,h) = (|alpha| / integral of fh)^{1/alpha} Pi(f,h), -1 < alpha < 0
AlphaBodyResult radial_mean_body_fn_neg(const fn::TestFunction& f, const fn::TestFunction& h,
                                        double alpha, const geo::SphereGrid& grid,
                                        const QuadConfig& cfg);

// rho_{R_alpha(E,F)}(xi)^alpha = (1/|F|) integral over F of rho_{E-x}(xi)^alpha dx
// for convex bodies F inside E, alpha > -1, alpha != 0. Deterministic polar
// rule over F with exact ray exits from E; radial panels grade into the
// boundary where the integrand is singular for alpha < 0.
double radial_mean_body_convex(const geo::StarBody& E, const geo::StarBody& F, double alpha,
                               const Vec& xi, const QuadConfig& cfg);
AlphaBodyResult radial_mean_body_convex_body(const geo::StarBody& E, const geo::StarBody& F,
                                             double alpha, const geo::SphereGrid& grid,
                                             const QuadConfig& cfg);

// seeded sample check that F lies inside E; returns the violation fraction
double containment_violation(const geo::StarBody& E, const geo::StarBody& F,
                             const QuadConfig& cfg, long samples = 10000);

// |S_n(f,h)| versus ||f||_1 ||h||_1 / n; passes when the relative gap is
// below 3 * rel_tol
ChainReport check_sn_volume_identity(const fn::TestFunction& f, const fn::TestFunction& h,
                                     const geo::SphereGrid& grid, const QuadConfig& cfg);

struct ConvexityReport {
  long segment_trials = 0;
  long segment_violations = 0;
  double worst_gauge_excess = 0.0;   // max gauge(midpoint) - 1 over sampled chords
  long ray_logconcavity_violations = 0;
  double worst_ray_violation = 0.0;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Probes convexity of S_alpha(f,h): midpoints of random boundary chords must
// stay inside (gauge <= 1 + 1e-6, radial values recomputed exactly), and
// t -> G(f,h)(t xi) must be log-concave along every grid direction.
ConvexityReport check_convexity(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                                const geo::SphereGrid& grid, const QuadConfig& cfg,
                                long segment_trials = 64);

struct InclusionReport {
  std::vector<double> alphas;
  // normalized radial profiles rho_{R_alpha}(xi)/c(alpha) per alpha, per node
  std::vector<std::vector<double>> normalized;
  double worst_margin = 0.0;  // most negative monotonicity slack observed
  double max_ratio_spread = 0.0;  // relative variation across alpha (equality probe)
  bool pass = false;
  nlohmann::json to_json() const;
};

// Theorem-style inclusion monotonicity: for consecutive alpha < beta the
// normalized bodies must nest node-wise within tolerance.
InclusionReport check_inclusion_monotone(const fn::TestFunction& f, const fn::TestFunction& h,
                                         const std::vector<double>& alphas,
                                         sf::ConcavityClass cls, double s,
                                         const geo::SphereGrid& grid, const QuadConfig& cfg);

struct ClosedFormReport {
  double max_rel_error_exponential = 0.0;  // against 2^{-n} e^{-||y||_1}
  double max_rel_error_speak = 0.0;        // against a (1 - ||y||_1/2)^{n+2/s} on sum y_i = 0
  bool pass = false;
  nlohmann::json to_json() const;
};

// Correlation closed forms: the simplex-exponential pair everywhere, and the
// s-concave peak pair on the hyperplane sum(y) = 0 (s = 1 by default).
ClosedFormReport check_correlation_closed_forms(int n, const QuadConfig& cfg, double s = 1.0,
                                                double tol_exponential = 5e-3,
                                                double tol_speak = 2e-2);

}  // namespace ahls::sa
