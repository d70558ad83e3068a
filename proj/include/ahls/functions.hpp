#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ahls/geometry.hpp"
#include "ahls/linalg.hpp"
#include "ahls/quadrature.hpp"

namespace ahls::fn {

// Certified pointwise upper bound f(x) <= bound(|x - center|) for
// |x - center| >= r0. Used to size truncation boxes and ray cutoffs.
struct Envelope {
  enum class Kind { Zero, Exp, Gauss, Power } kind = Kind::Zero;
  double amp = 0.0;    // prefactor
  double rate = 0.0;   // Exp: e^{-rate u}; Gauss: e^{-rate u^2}; Power: u^{-rate}
  double r0 = 0.0;     // validity threshold (Zero: support radius)

  double value(double u) const;
};

struct IntegralEst {
  double value = 0.0;
  double err = 0.0;
  bool truncated = false;  // certified tail exceeded the configured box
  bool diverged = false;   // no finite certificate exists
};

// Nonnegative test functions on R^n from closed analytic families, plus a
// grid-sampled fallback. All families are closed under invertible affine
// reparameterization (transform()).
class TestFunction {
 public:
  // a (b^2 + |phi(x-x0)|^2)^{-(n+alpha)/2}
  struct HlsExtremal {
    double a, b;
    Mat phi;
    Vec x0;
    double alpha;
  };
  // a e^{-||x - x0||_D} for a star body D (gauge may be +inf off its cone)
  struct SimplexExponential {
    double a;
    geo::StarBody gauge_body;
    Vec x0;
  };
  // (1 - ||x - x0||_D)_+^{1/s}
  struct SConcavePeak {
    double s;
    geo::StarBody gauge_body;
    Vec x0;
  };
  struct Gaussian {
    double a;
    Mat cov;
    Mat inv_cov;
    double sqrt_det_cov;
    Vec center;
  };
  // indicator of body + center
  struct Indicator {
    geo::StarBody body;
    Vec center;
  };
  // multilinear interpolation of values on a regular lattice over [lo, hi];
  // zero outside
  struct GridSampled {
    Vec lo, hi;
    std::array<int, 3> shape{1, 1, 1};
    std::vector<double> values;
  };

  using Family =
      std::variant<HlsExtremal, SimplexExponential, SConcavePeak, Gaussian, Indicator, GridSampled>;

  static TestFunction hls_extremal(double a, double b, const Mat& phi, const Vec& x0, double alpha);
  static TestFunction simplex_exponential(double a, geo::StarBody gauge_body, const Vec& x0);
  // e^{-||x||_{Delta_n}} for the standard simplex
  static TestFunction standard_simplex_exponential(int dim);
  static TestFunction s_concave_peak(double s, geo::StarBody gauge_body);
  static TestFunction s_concave_peak(double s, geo::StarBody gauge_body, const Vec& x0);
  static TestFunction gaussian(double a, const Mat& cov, const Vec& center);
  static TestFunction gaussian_isotropic(int dim, double a, double sigma);
  static TestFunction indicator(geo::StarBody body, const Vec& center);
  static TestFunction indicator_box(const Vec& lo, const Vec& hi);
  static TestFunction grid_sampled(const Vec& lo, const Vec& hi, std::array<int, 3> shape,
                                   std::vector<double> values);

  int dim() const { return dim_; }
  const Family& family() const { return fam_; }

  double operator()(const Vec& x) const;

  double sup_value() const;              // max of f (attained value for every family)
  bool compact_support() const;
  Vec support_center() const;            // center used by envelopes/boxes
  double support_radius() const;         // compact families: exact bounding radius
  Envelope envelope() const;

  // Smallest R (up to the search's 1.26x granularity) with certified
  //   integral of f^p outside |x-center| <= R  <=  rel_tol * ||f||_p^p.
  // diverged=true when f^p is not integrable.
  IntegralEst tail_radius(double p, double rel_tol) const;

  bool has_closed_lp() const;
  double lp_closed(double p) const;      // exact ||f||_p

  bool is_indicator() const;

  nlohmann::json describe() const;

 private:
  TestFunction(int dim, Family fam) : dim_(dim), fam_(std::move(fam)) {}
  int dim_;
  Family fam_;
};

// (integral of f^p)^{1/p}; closed forms when the family has them, otherwise
// tensor Gauss-Legendre over the certified truncation box.
double lp_norm(const TestFunction& f, double p, const QuadConfig& cfg);
IntegralEst lp_norm_ex(const TestFunction& f, double p, const QuadConfig& cfg);
// forced quadrature path (cross-checks the closed forms in tests)
IntegralEst lp_norm_quadrature(const TestFunction& f, double p, const QuadConfig& cfg);

double inner_product(const TestFunction& f, const TestFunction& h, const QuadConfig& cfg);

// G(f,h)(y) = integral of f(x+y) h(x) dx. Exact overlap formulas for pairs
// of box or ball indicators and for Gaussian pairs; compact supports use a
// polar rule with exact ray clipping; remaining cases fall back to tensor
// quadrature (two-center graded panels with certified tails in 1-D).
double correlation(const TestFunction& f, const TestFunction& h, const Vec& y,
                   const QuadConfig& cfg);
// absolute error scale of correlation values for the pair (used by ray
// integrals to propagate inner-quadrature uncertainty)
double correlation_error_scale(const TestFunction& f, const TestFunction& h,
                               const QuadConfig& cfg);

// |{f >= t}|; closed forms for all analytic families, seeded Monte-Carlo for
// grid-sampled data. t >= sup f returns 0.
double superlevel_volume(const TestFunction& f, double t, const QuadConfig& cfg);
struct McEst {
  double value = 0.0;
  double std_error = 0.0;
};
// forced Monte-Carlo estimate with standard error (oracle cross-check)
McEst superlevel_volume_mc(const TestFunction& f, double t, const QuadConfig& cfg);

// Radial profile of the Schwarz symmetrization: levels (descending) with
// radii r_k = (|{f >= t_k}| / omega_n)^{1/n}; eval() is the induced
// staircase sup{t_k : r_k >= r}.
struct RadialProfile {
  int dim = 0;
  std::vector<double> levels;
  std::vector<double> radii;
  double eval(double r) const;
};
RadialProfile schwarz_symmetrize(const TestFunction& f, const QuadConfig& cfg,
                                 int num_levels = 256);

// Closed-form symmetral for the analytic families (radial-decreasing
// representative of the same superlevel volumes).
TestFunction symmetral_closed(const TestFunction& f);

enum class ConcavityClass { Log, SConcave };

struct ConcavityReport {
  long trials = 0;
  long violations = 0;
  double worst = 0.0;  // largest positive violation found
  Vec worst_x, worst_y;
  double worst_lambda = 0.0;
};
// samples random (x, y, lambda) in the effective support box and checks the
// s-concavity (or log-concavity) inequality up to 1e-9 slack
ConcavityReport concavity_check(const TestFunction& f, ConcavityClass cls, double s, long trials,
                                std::uint64_t seed);

// x -> f(map^{-1}(x - shift)); stays inside the closed families
TestFunction transform(const TestFunction& f, const Mat& map, const Vec& shift);

// integral of f^ea * h^eb over R^n (quadrature; supports the product norms
// appearing in the reverse chains)
double integral_power_product(const TestFunction& f, double ea, const TestFunction& h, double eb,
                              const QuadConfig& cfg);

// CSV + JSON lattice round trip for GridSampled data
void save_grid_csv(const TestFunction& f, const std::string& csv_path, const std::string& json_path);
TestFunction load_grid_csv(const std::string& csv_path, const std::string& json_path);

}  // namespace ahls::fn
