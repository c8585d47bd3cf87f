#pragma once

// Reference computations that share no code with the library: finite
// differences, bracketing root scans and rejection samplers.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kF = 1.1547005383792515;  // 2/sqrt(3), typed out

inline double cubic(double x) { return 4.0 * x - x * x * x; }

/// Central differences of a map R^n -> R^m.
template <int M, int N>
Eigen::Matrix<double, M, N> fd_jacobian(
    const std::function<Eigen::Matrix<double, M, 1>(const Eigen::Matrix<double, N, 1>&)>& f,
    const Eigen::Matrix<double, N, 1>& x, double h = 1e-6) {
  Eigen::Matrix<double, M, N> J;
  for (int j = 0; j < N; ++j) {
    Eigen::Matrix<double, N, 1> a = x;
    Eigen::Matrix<double, N, 1> b = x;
    const double step = h * std::max(1.0, std::abs(x[j]));
    a[j] += step;
    b[j] -= step;
    J.col(j) = (f(a) - f(b)) / (2.0 * step);
  }
  return J;
}

/// All sign-change roots of g on [lo, hi], found on an n-cell scan and
/// refined by bisection. Misses roots of even multiplicity.
inline std::vector<double> scan_roots(const std::function<double(double)>& g, double lo, double hi,
                                      int n = 20000) {
  std::vector<double> roots;
  double a = lo;
  double ga = g(a);
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    const double gb = g(b);
    if (ga == 0.0) {
      roots.push_back(a);
    } else if ((ga < 0.0) != (gb < 0.0) && gb != 0.0) {
      double l = a, r = b, gl = ga;
      for (int it = 0; it < 200 && r - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
        const double m = 0.5 * (l + r);
        const double gm = g(m);
        if ((gm < 0.0) == (gl < 0.0)) {
          l = m;
          gl = gm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    ga = gb;
  }
  return roots;
}

inline bool close_rel(double a, double b, double rel, double floor = 1.0) {
  return std::abs(a - b) <= rel * std::max({floor, std::abs(a), std::abs(b)});
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
};

}  // namespace oracle
