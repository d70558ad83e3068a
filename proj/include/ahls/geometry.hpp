#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ahls/linalg.hpp"
#include "ahls/report.hpp"

namespace ahls::geo {

// Quadrature nodes and weights on S^{n-1}, n in {1,2,3}.
//   n=1: the two atoms {+1,-1}, weight 1 each.
//   n=2: uniform angular trapezoid rule (spectral for smooth periodic data).
//   n=3: Gauss-Legendre in u = cos(theta), split at the equator, times a
//        uniform azimuthal rule. Node index = i_u * n_phi + j_phi.
struct SphereGrid {
  int dim = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  int exact_degree = 0;

  // layout bookkeeping for Sampled-body interpolation
  std::vector<double> thetas;  // n=2 node angles, ascending in [0, 2pi)
  std::vector<double> us;      // n=3 cos(theta) abscissae, ascending
  std::vector<double> phis;    // n=3 azimuths, ascending in [0, 2pi)

  // resolution: n=1 ignores it; n=2 uses `resolution` angles (>= 8);
  // n=3 uses `resolution` polar abscissae and 2*resolution azimuths.
  static SphereGrid make(int dim, int resolution);

  std::size_t size() const { return nodes.size(); }
  nlohmann::json to_json() const;
};

class StarBody;
using StarBodyPtr = std::shared_ptr<const StarBody>;

// A star-shaped set represented by its radial function. Analytic kinds carry
// exact radial/gauge evaluations; Sampled bodies interpolate values given on
// a SphereGrid (nearest atom for n=1, periodic-linear in angle for n=2,
// bilinear in (cos theta, phi) for n=3).
class StarBody {
 public:
  struct Ball {
    double radius;
  };
  struct Ellipsoid {            // {x : x' A^{-1} x <= 1}
    Mat shape;                  // A, symmetric positive definite
    Mat inv_shape;
  };
  struct CenteredBox {          // {|x_i| <= halfwidth_i}
    Vec halfwidth;
  };
  struct CrossPolytope {        // {||x||_1 <= scale}
    double scale;
  };
  struct Simplex {              // convex hull of dim+1 vertices, origin in closure
    std::vector<Vec> vertices;
    std::vector<Vec> facet_normals;    // a_i . x <= b_i
    std::vector<double> facet_offsets;
  };
  struct LinearImage {          // M K for invertible M
    Mat map;
    Mat inv_map;
    StarBodyPtr inner;
  };
  struct Sampled {
    std::shared_ptr<const SphereGrid> grid;
    std::vector<double> radii;  // strictly positive, one per node
  };

  using Kind = std::variant<Ball, Ellipsoid, CenteredBox, CrossPolytope, Simplex, LinearImage, Sampled>;

  static StarBody ball(int dim, double radius);
  static StarBody ellipsoid(const Mat& shape);
  static StarBody centered_box(const Vec& halfwidth);
  static StarBody cross_polytope(int dim, double scale);
  static StarBody simplex(const std::vector<Vec>& vertices);
  // conv{0, e_1, ..., e_n}
  static StarBody standard_simplex(int dim);
  static StarBody sampled(std::shared_ptr<const SphereGrid> grid, std::vector<double> radii);
  static StarBody image(const Mat& map, const StarBody& inner);

  int dim() const { return dim_; }
  const Kind& kind() const { return kind_; }

  // distance from the origin to the boundary along unit direction xi;
  // may be 0 for directions outside a simplex cone
  double radial(const Vec& xi) const;

  // gauge ||x||_K = |x| / radial(x/|x|); gauge(0) = 0; +inf off the cone
  double gauge(const Vec& x) const;

  bool contains(const Vec& x, double tol = 1e-12) const { return gauge(x) <= 1.0 + tol; }

  // Exact ray clipping {p + t d} ∩ K -> [t0, t1] for the convex analytic
  // kinds; returns false for Sampled bodies. Empty intersections report
  // t0 > t1.
  bool ray_interval(const Vec& p, const Vec& d, double& t0, double& t1) const;
  bool supports_ray_clipping() const;

  // radius of the smallest origin-centered ball certified to contain K
  double bounding_radius() const;

  bool has_exact_volume() const;
  double exact_volume() const;

  nlohmann::json to_json() const;  // Sampled kind only

 private:
  StarBody(int dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {}
  int dim_;
  Kind kind_;
};

// (1/n) sum_j w_j rho(xi_j)^n; Ball and Ellipsoid return their closed forms.
double volume(const StarBody& body, const SphereGrid& grid);

// wraps `body` as the image M body
StarBody linear_image(const Mat& map, const StarBody& body);

// tilde V_alpha(K, L) = (1/n) sum_j w_j rho_K^{n-alpha} rho_L^{alpha},
// accumulated in log space per node.
double dual_mixed_volume(const StarBody& K, const StarBody& L, double alpha,
                         const SphereGrid& grid);

// centered ball of the same volume
StarBody schwarz_symmetral(const StarBody& body, const SphereGrid& grid);

// Evaluates both sides of the dual mixed volume inequality in the regime
// dictated by alpha (<= for 0<alpha<n, >= for alpha>n), with a near-equality
// flag when K and L are numerically dilates (relative spread of rho_K/rho_L
// below 1e-6). Volumes are taken through the same grid sums as the mixed
// term so the discrete Hoelder inequality is exact.
ChainReport check_dual_mixed_inequality(const StarBody& K, const StarBody& L, double alpha,
                                        const SphereGrid& grid, double tol = 1e-10);

}  // namespace ahls::geo
