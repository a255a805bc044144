#pragma once

// Reference computations kept independent of the library code paths.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

// Central difference of a vector-valued function, one column per coordinate.
inline Eigen::MatrixXd central_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

inline Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

// Planar serial chain by summing link vectors.
struct PlanarTip {
  double x, y, orientation;
};

inline PlanarTip planar_tip(const double* lengths, const double* q, int n) {
  PlanarTip t{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    t.orientation += q[i];
    t.x += lengths[i] * std::cos(t.orientation);
    t.y += lengths[i] * std::sin(t.orientation);
  }
  return t;
}

// Solves the row-vector system [a, b] = [x, y] * [[p, q], [r, s]] by Cramer's rule.
inline std::pair<double, double> row_system(double a, double b, double p, double q, double r, double s) {
  // x*p + y*r = a ; x*q + y*s = b
  const double det = p * s - r * q;
  return {(a * s - r * b) / det, (p * b - a * q) / det};
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline std::mt19937_64 rng(unsigned long long seed) { return std::mt19937_64(seed); }

}  // namespace oracle
