#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ahls/linalg.hpp"

namespace ahls {

// Every numerical budget in one place. All Monte-Carlo draws and quadrature
// resolutions derive from these fields, so a (config, seed) pair pins every
// reported number.
struct QuadConfig {
  double box_radius = 60.0;   // spatial truncation half-width cap
  int nodes_per_axis = 48;    // tensor quadrature nodes per axis
  double t_max = 0.0;         // outer ray-integral cutoff; 0 = certify from tail bounds
  int t_panels = 28;          // geometric panels on [t0, t_max]
  long mc_samples = 200000;   // Monte-Carlo sample count
  std::uint64_t seed = 0x41484c53ull;
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  double near_equality_gap = 0.02;  // relative gap below which a probe reports near-equality

  void validate() const {
    if (box_radius <= 0 || nodes_per_axis <= 0 || t_panels <= 0 || mc_samples <= 0)
      throw std::invalid_argument("QuadConfig: budgets must be positive");
    if (!(rel_tol > 0 && rel_tol < 1) || !(abs_tol > 0 && abs_tol < 1))
      throw std::invalid_argument("QuadConfig: tolerances must lie in (0,1)");
    if (t_max < 0) throw std::invalid_argument("QuadConfig: t_max must be >= 0");
  }

  static QuadConfig defaults() { return QuadConfig{}; }
  // tighter budgets for equality-case probes (< 0.5% gap target)
  static QuadConfig high() {
    QuadConfig c;
    c.nodes_per_axis = 80;
    c.t_panels = 44;
    c.mc_samples = 1000000;
    c.rel_tol = 1e-8;
    c.near_equality_gap = 0.005;
    return c;
  }
};

// Gauss-Legendre rule on [-1,1]; nodes/weights cached per order.
const std::vector<double>& gl_nodes(int m);
const std::vector<double>& gl_weights(int m);

struct Panel {
  double a;
  double b;
};

std::vector<Panel> uniform_panels(double a, double b, int k);
// panels geometrically graded toward `a` (first panel smallest)
std::vector<Panel> graded_panels_toward_a(double a, double b, int k, double ratio = 2.0);
std::vector<Panel> graded_panels_toward_b(double a, double b, int k, double ratio = 2.0);
// geometric panels on [a,b], 0 < a < b, constant panel-length ratio
std::vector<Panel> geometric_panels(double a, double b, int k);

double integrate_gl(const std::function<double(double)>& f, double a, double b, int m);
double integrate_panels(const std::function<double(double)>& f, const std::vector<Panel>& panels, int m);

struct Quad1dEst {
  double value = 0.0;
  double err = 0.0;  // |full-order - half-order| refinement estimate
};
Quad1dEst integrate_panels_est(const std::function<double(double)>& f, const std::vector<Panel>& panels,
                               int m);

// Tensor Gauss-Legendre over the box [lo,hi] in dimension lo.n (1..3),
// with `panels` uniform panels per axis of `m` nodes each.
double integrate_box(const Vec& lo, const Vec& hi, int m, int panels,
                     const std::function<double(const Vec&)>& f);

}  // namespace ahls
