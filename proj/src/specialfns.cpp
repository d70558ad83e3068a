#include "ahls/specialfns.hpp"

#include <cmath>
#include <limits>

namespace ahls::sf {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

// Lanczos g = 7, 9-term coefficient set.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double x) {
  // sum for argument x >= 0.5 (series variable z = x - 1)
  double z = x - 1.0;
  double s = kLanczos[0];
  for (int i = 1; i < 9; ++i) s += kLanczos[i] / (z + i);
  return s;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
  }
  double z = x - 1.0;
  double t = z + kLanczosG + 0.5;
  return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(x));
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
  if (x > 140.0) return std::exp(log_gamma(x));  // direct t^{z+0.5} would overflow
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  double z = x - 1.0;
  double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_series(x);
}

double log_beta(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::domain_error("beta: arguments must be positive");
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double beta_fn(double p, double q) { return std::exp(log_beta(p, q)); }

double upper_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("upper_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double fpmin = std::numeric_limits<double>::min() / eps;
  if (x < a + 1.0) {
    // P(a,x) by series, Q = 1 - P
    double ap = a, del = 1.0 / a, sum = del;
    for (int i = 0; i < 500; ++i) {
      ++ap;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    return 1.0 - p;
  }
  // Q(a,x) by Lentz continued fraction
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= eps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::domain_error("unit_ball_volume: n must be >= 1");
  return std::exp(0.5 * n * std::log(kPi) - log_gamma(0.5 * n + 1.0));
}

double sphere_area(int n) { return n * unit_ball_volume(n); }

bool HlsParams::scaling_relation_holds() const {
  return std::fabs(1.0 / p + 1.0 / r - alpha / n - 1.0) <= 1e-12;
}

bool HlsParams::regime_theorem_1_1() const {
  return n >= 1 && p > 1.0 && r > 1.0 && alpha > 0.0 && alpha < n && scaling_relation_holds();
}

bool HlsParams::regime_theorem_1_2() const {
  return n >= 1 && p > 0.0 && p < 1.0 && r > 0.0 && r < 1.0 && alpha > n && scaling_relation_holds();
}

void HlsParams::validate() const {
  if (n < 1 || n > 3) throw std::domain_error("HlsParams: n must be 1..3");
  if (!scaling_relation_holds())
    throw std::domain_error("HlsParams: 1/p + 1/r - alpha/n = 1 violated");
  if (!regime_theorem_1_1() && !regime_theorem_1_2())
    throw std::domain_error("HlsParams: parameters fit neither admissible regime");
}

double hls_constant_bound(const HlsParams& params) {
  if (!params.regime_theorem_1_1() && !params.regime_theorem_1_2())
    throw std::domain_error("hls_constant_bound: regime violation");
  const int n = params.n;
  const double a = params.alpha, p = params.p, r = params.r;
  const double e = 1.0 - a / n;
  double log_wn = 0.5 * n * std::log(kPi) - log_gamma(0.5 * n + 1.0);
  double term_p = std::exp(e * std::log(e / (1.0 - 1.0 / p)));
  double term_r = std::exp(e * std::log(e / (1.0 - 1.0 / r)));
  return (n / a) * std::exp(e * log_wn) * (term_p + term_r) / (p * r);
}

double hls_sharp_constant(int n, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("hls_sharp_constant: alpha must be positive");
  double lg = 0.5 * (n - alpha) * std::log(kPi) + log_gamma(0.5 * alpha) -
              log_gamma(0.5 * (n + alpha)) -
              (alpha / n) * (log_gamma(0.5 * n) - log_gamma(static_cast<double>(n)));
  return std::exp(lg);
}

double reverse_constant_logconcave(int n, double alpha) {
  if (!(alpha > 0.0))
    throw std::domain_error("reverse_constant_logconcave: alpha must be positive");
  return std::exp((alpha / n) * log_gamma(n + 1.0) - log_gamma(alpha));
}

double reverse_constant_sconcave(int n, double alpha, double s) {
  if (!(alpha > 0.0) || !(s > 0.0))
    throw std::domain_error("reverse_constant_sconcave: alpha and s must be positive");
  double q = n + 1.0 + 2.0 / s;
  double lg = (alpha / n) * (std::log(static_cast<double>(n)) + log_beta(static_cast<double>(n), q)) -
              log_beta(alpha, q);
  return std::exp(lg);
}

double inclusion_constant(double alpha, ConcavityClass cls, int n, double s) {
  if (!(alpha > 0.0)) throw std::domain_error("inclusion_constant: alpha must be positive");
  if (cls == ConcavityClass::Log) {
    return std::exp(log_gamma(alpha + 1.0) / alpha);
  }
  if (!(s > 0.0)) throw std::domain_error("inclusion_constant: s must be positive");
  double q = n + 2.0 / s;
  double lg = std::log(q) + (std::log(q) + log_beta(alpha + 1.0, q)) / alpha;
  return std::exp(lg);
}

}  // namespace ahls::sf
