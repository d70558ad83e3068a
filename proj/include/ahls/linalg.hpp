#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

// Small dense vectors/matrices for ambient dimensions 1..3. Everything is
// by value; no heap. Inverses use the adjugate, which is exact enough at
// these sizes.

namespace ahls {

struct Vec {
  int n = 0;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  explicit Vec(int dim) : n(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Vec: dim must be 1..3");
  }
  Vec(std::initializer_list<double> xs) {
    if (xs.size() < 1 || xs.size() > 3) throw std::invalid_argument("Vec: 1..3 entries");
    n = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  Vec operator+(const Vec& o) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Vec operator*(double s) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) r.c[i] = c[i] * s;
    return r;
  }
  Vec operator-() const { return *this * -1.0; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += c[i] * o.c[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  double norm1() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::fabs(c[i]);
    return s;
  }
  double norm_inf() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s = std::max(s, std::fabs(c[i]));
    return s;
  }
  Vec unit() const {
    double m = norm();
    if (m == 0.0) throw std::invalid_argument("Vec::unit: zero vector");
    return *this * (1.0 / m);
  }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

struct Mat {
  int n = 0;
  // row-major, n*n entries used
  std::array<double, 9> a{};

  Mat() = default;
  explicit Mat(int dim) : n(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Mat: dim must be 1..3");
    a.fill(0.0);
  }

  double& at(int i, int j) { return a[i * n + j]; }
  double at(int i, int j) const { return a[i * n + j]; }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }
  static Mat diag(const Vec& d) {
    Mat m(d.n);
    for (int i = 0; i < d.n; ++i) m.at(i, i) = d[i];
    return m;
  }
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Mat m(static_cast<int>(rows.size()));
    int i = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != m.n) throw std::invalid_argument("Mat: ragged rows");
      int j = 0;
      for (double x : row) m.at(i, j++) = x;
      ++i;
    }
    return m;
  }

  Vec apply(const Vec& v) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += at(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  Mat operator*(const Mat& o) const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += at(i, k) * o.at(k, j);
        r.at(i, j) = s;
      }
    return r;
  }

  Mat operator*(double s) const {
    Mat r(n);
    for (int i = 0; i < n * n; ++i) r.a[i] = a[i] * s;
    return r;
  }

  Mat operator+(const Mat& o) const {
    Mat r(n);
    for (int i = 0; i < n * n; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }

  Mat transpose() const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.at(i, j) = at(j, i);
    return r;
  }

  double det() const {
    if (n == 1) return a[0];
    if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }

  Mat inverse() const {
    double d = det();
    if (std::fabs(d) < 1e-300) throw std::invalid_argument("Mat::inverse: singular matrix");
    Mat r(n);
    if (n == 1) {
      r.a[0] = 1.0 / d;
    } else if (n == 2) {
      r.at(0, 0) = at(1, 1) / d;
      r.at(0, 1) = -at(0, 1) / d;
      r.at(1, 0) = -at(1, 0) / d;
      r.at(1, 1) = at(0, 0) / d;
    } else {
      // adjugate / det
      r.at(0, 0) = (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) / d;
      r.at(0, 1) = (at(0, 2) * at(2, 1) - at(0, 1) * at(2, 2)) / d;
      r.at(0, 2) = (at(0, 1) * at(1, 2) - at(0, 2) * at(1, 1)) / d;
      r.at(1, 0) = (at(1, 2) * at(2, 0) - at(1, 0) * at(2, 2)) / d;
      r.at(1, 1) = (at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0)) / d;
      r.at(1, 2) = (at(0, 2) * at(1, 0) - at(0, 0) * at(1, 2)) / d;
      r.at(2, 0) = (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)) / d;
      r.at(2, 1) = (at(0, 1) * at(2, 0) - at(0, 0) * at(2, 1)) / d;
      r.at(2, 2) = (at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0)) / d;
    }
    return r;
  }

  double frobenius() const {
    double s = 0;
    for (int i = 0; i < n * n; ++i) s += a[i] * a[i];
    return std::sqrt(s);
  }

  // Lower bound on the smallest singular value: |det| / ||M||_F^{n-1}.
  double sigma_min_lb() const {
    double f = frobenius();
    if (f == 0.0) return 0.0;
    double d = std::fabs(det());
    double denom = 1.0;
    for (int i = 0; i < n - 1; ++i) denom *= f;
    return d / denom;
  }

  // Upper bound on the largest singular value.
  double sigma_max_ub() const { return frobenius(); }

  bool symmetric(double tol = 1e-12) const {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::fabs(at(i, j) - at(j, i)) > tol) return false;
    return true;
  }
};

}  // namespace ahls
