#pragma once

#include <stdexcept>

namespace ahls::sf {

// Gamma function for x > 0, Lanczos approximation (g = 7, 9 coefficients).
// Relative error well below 1e-12 on the positive axis.
double gamma_fn(double x);

// log Gamma(x) for x > 0; used so that every constant below can be assembled
// in log space and exponentiated once.
double log_gamma(double x);

double beta_fn(double p, double q);
double log_beta(double p, double q);

// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a), a > 0,
// x >= 0. Series for x < a+1, continued fraction otherwise.
double upper_gamma_q(double a, double x);

// omega_n = pi^{n/2} / Gamma(n/2 + 1)
double unit_ball_volume(int n);
// |S^{n-1}| = n * omega_n
double sphere_area(int n);

struct HlsParams {
  int n = 1;
  double alpha = 0.5;
  double p = 4.0 / 3.0;
  double r = 4.0 / 3.0;

  // 1/p + 1/r - alpha/n = 1 within 1e-12
  bool scaling_relation_holds() const;
  // 1 < p,r < inf and 0 < alpha < n
  bool regime_theorem_1_1() const;
  // 0 < p,r < 1 and alpha > n
  bool regime_theorem_1_2() const;
  void validate() const;  // throws std::domain_error when in neither regime
};

// Right side of the explicit constant bound:
//   (n/alpha) omega_n^{1-alpha/n} (1/(pr))
//     [ ((1-alpha/n)/(1-1/p))^{1-alpha/n} + ((1-alpha/n)/(1-1/r))^{1-alpha/n} ]
double hls_constant_bound(const HlsParams& params);

// Sharp constant at p = r = 2n/(n+alpha):
//   pi^{(n-alpha)/2} Gamma(alpha/2)/Gamma((n+alpha)/2) (Gamma(n/2)/Gamma(n))^{-alpha/n}
double hls_sharp_constant(int n, double alpha);

// Gamma(n+1)^{alpha/n} / Gamma(alpha)
double reverse_constant_logconcave(int n, double alpha);

// (n B(n, n+1+2/s))^{alpha/n} / B(alpha, n+1+2/s)
double reverse_constant_sconcave(int n, double alpha, double s);

enum class ConcavityClass { Log, SConcave };

// Scaling constant of the radial-mean-body inclusion relations.
// Log case: Gamma(alpha+1)^{1/alpha}.
// s-concave case: (n+2/s) * ((n+2/s) B(alpha+1, n+2/s))^{1/alpha}; the
// alpha-independent prefactor normalizes the constant so that s -> 0
// recovers the log case (only ratios across alpha enter the inclusions).
double inclusion_constant(double alpha, ConcavityClass cls, int n, double s = 0.0);

}  // namespace ahls::sf
