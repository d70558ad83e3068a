#pragma once

#include "ahls/functions.hpp"
#include "ahls/geometry.hpp"
#include "ahls/report.hpp"
#include "ahls/salpha.hpp"
#include "ahls/specialfns.hpp"

namespace ahls::hls {

enum class Method { Polar, DirectMc };

struct ValueEst {
  double value = 0.0;
  double err = 0.0;
};

// The anisotropic double integral
//   integral of f(x) h(y) / ||x-y||_K^{n-alpha} dx dy.
// Polar route: n * dual_mixed_volume(K, S_alpha(f,h)) through the sampled
// body (the t^{alpha-1} weight makes the kernel singularity integrable by
// construction). Direct route: seeded Monte Carlo in the coordinates
// (y, direction, radius) with the radius drawn from the exact power-law
// density, so the kernel singularity at the diagonal carries no variance.
ValueEst hls_functional(const fn::TestFunction& f, const fn::TestFunction& h,
                        const geo::StarBody& K, double alpha, const geo::SphereGrid& grid,
                        const QuadConfig& cfg, Method method);

// Theorem-1.1-style chain (0 < alpha < n):
//   C(n,alpha,p) ||f||_p ||h||_r >= n w_n^{(n-a)/n} |S_alpha(f,h)|^{a/n} >= double integral.
// Uses the sharp constant when p = r = 2n/(n+alpha), the explicit upper
// bound otherwise (labeled in the metadata).
ChainReport verify_theorem_1_1(const fn::TestFunction& f, const fn::TestFunction& h,
                               const sf::HlsParams& params, const geo::SphereGrid& grid,
                               const QuadConfig& cfg);

// Reversed chain for alpha > n, 0 < p,r < 1 (quasi-norms).
ChainReport verify_theorem_1_2(const fn::TestFunction& f, const fn::TestFunction& h,
                               const sf::HlsParams& params, const geo::SphereGrid& grid,
                               const QuadConfig& cfg);

// Reverse affine chain for even log-concave pairs; direction set by sign(alpha - n):
//   Gamma(n+1)^{a/n}/Gamma(a) |S_a|^{a/n}  vs
//   (||f||_1 ||h||_1)^{a/n} (integral fh)^{1-a/n}  vs
//   || f^{(n+a)/2n} h^{(n-a)/2n} ||_{2n/(n+a)} || h^{(n+a)/2n} f^{(n-a)/2n} ||_{2n/(n+a)}
ChainReport verify_theorem_1_3(const fn::TestFunction& f, const fn::TestFunction& h, double alpha,
                               const geo::SphereGrid& grid, const QuadConfig& cfg);

// Same chain with the s-concave constant (n B(n,n+1+2/s))^{a/n} / B(a,n+1+2/s).
ChainReport verify_corollary_sconcave(const fn::TestFunction& f, const fn::TestFunction& h,
                                      double alpha, double s, const geo::SphereGrid& grid,
                                      const QuadConfig& cfg);

// Riesz rearrangement probe on indicator triples:
//   integral 1_A(y) 1_B(x-y) 1_C(x) <= the same with centered balls of equal
// volumes. Both sides by seeded Monte Carlo; near-equality is flagged for
// Burchard-type configurations.
ChainReport riesz_rearrangement_check(const fn::TestFunction& A, const fn::TestFunction& B,
                                      const fn::TestFunction& C, const QuadConfig& cfg);

// Representation identity: direct Monte Carlo of the anisotropic functional
// against n * dual_mixed_volume(K, S_alpha(f,h)).
ChainReport check_representation_identity(const fn::TestFunction& f, const fn::TestFunction& h,
                                          const geo::StarBody& K, double alpha,
                                          const geo::SphereGrid& grid, const QuadConfig& cfg);

}  // namespace ahls::hls
