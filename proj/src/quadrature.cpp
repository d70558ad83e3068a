#include "ahls/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ahls {

namespace {

struct GlRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Newton iteration on the Legendre recurrence; standard construction.
GlRule build_gl(int m) {
  GlRule r;
  r.x.resize(m);
  r.w.resize(m);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[m - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[m - 1 - i] = w;
  }
  return r;
}

const GlRule& cached_gl(int m) {
  static std::map<int, GlRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, build_gl(m)).first;
  return it->second;
}

}  // namespace

const std::vector<double>& gl_nodes(int m) { return cached_gl(m).x; }
const std::vector<double>& gl_weights(int m) { return cached_gl(m).w; }

std::vector<Panel> uniform_panels(double a, double b, int k) {
  std::vector<Panel> p;
  p.reserve(k);
  for (int i = 0; i < k; ++i)
    p.push_back({a + (b - a) * i / k, a + (b - a) * (i + 1) / k});
  return p;
}

std::vector<Panel> graded_panels_toward_a(double a, double b, int k, double ratio) {
  // lengths proportional to ratio^i, smallest first
  std::vector<double> len(k);
  double s = 0, l = 1;
  for (int i = 0; i < k; ++i) {
    len[i] = l;
    s += l;
    l *= ratio;
  }
  std::vector<Panel> p;
  p.reserve(k);
  double t = a;
  for (int i = 0; i < k; ++i) {
    double t2 = (i == k - 1) ? b : t + (b - a) * len[i] / s;
    p.push_back({t, t2});
    t = t2;
  }
  return p;
}

std::vector<Panel> graded_panels_toward_b(double a, double b, int k, double ratio) {
  auto p = graded_panels_toward_a(0.0, b - a, k, ratio);
  std::vector<Panel> q;
  q.reserve(k);
  for (int i = k - 1; i >= 0; --i) q.push_back({b - p[i].b, b - p[i].a});
  return q;
}

std::vector<Panel> geometric_panels(double a, double b, int k) {
  if (!(a > 0 && b > a)) throw std::invalid_argument("geometric_panels: need 0 < a < b");
  double g = std::pow(b / a, 1.0 / k);
  std::vector<Panel> p;
  p.reserve(k);
  double t = a;
  for (int i = 0; i < k; ++i) {
    double t2 = (i == k - 1) ? b : t * g;
    p.push_back({t, t2});
    t = t2;
  }
  return p;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int m) {
  const auto& x = gl_nodes(m);
  const auto& w = gl_weights(m);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < m; ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

double integrate_panels(const std::function<double(double)>& f, const std::vector<Panel>& panels,
                        int m) {
  double s = 0;
  for (const auto& p : panels) s += integrate_gl(f, p.a, p.b, m);
  return s;
}

Quad1dEst integrate_panels_est(const std::function<double(double)>& f,
                               const std::vector<Panel>& panels, int m) {
  int mh = std::max(2, m / 2);
  Quad1dEst est;
  for (const auto& p : panels) {
    double full = integrate_gl(f, p.a, p.b, m);
    double half = integrate_gl(f, p.a, p.b, mh);
    est.value += full;
    est.err += std::fabs(full - half);
  }
  return est;
}

double integrate_box(const Vec& lo, const Vec& hi, int m, int panels,
                     const std::function<double(const Vec&)>& f) {
  int n = lo.n;
  for (int i = 0; i < n; ++i)
    if (hi[i] <= lo[i]) return 0.0;

  // per-axis nodes and weights
  std::vector<std::vector<double>> xs(n), ws(n);
  for (int ax = 0; ax < n; ++ax) {
    auto ps = uniform_panels(lo[ax], hi[ax], panels);
    for (const auto& p : ps) {
      const auto& x = gl_nodes(m);
      const auto& w = gl_weights(m);
      double mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a);
      for (int i = 0; i < m; ++i) {
        xs[ax].push_back(mid + half * x[i]);
        ws[ax].push_back(w[i] * half);
      }
    }
  }

  Vec x(n);
  double total = 0;
  std::size_t n0 = xs[0].size();
  std::size_t n1 = n >= 2 ? xs[1].size() : 1;
  std::size_t n2 = n >= 3 ? xs[2].size() : 1;
  for (std::size_t i = 0; i < n0; ++i) {
    x[0] = xs[0][i];
    double w0 = ws[0][i];
    for (std::size_t j = 0; j < n1; ++j) {
      double w1 = w0;
      if (n >= 2) {
        x[1] = xs[1][j];
        w1 *= ws[1][j];
      }
      for (std::size_t k = 0; k < n2; ++k) {
        double w2 = w1;
        if (n >= 3) {
          x[2] = xs[2][k];
          w2 *= ws[2][k];
        }
        total += w2 * f(x);
      }
    }
  }
  return total;
}

}  // namespace ahls
