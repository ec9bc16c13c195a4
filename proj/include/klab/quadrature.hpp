#pragma once

// Quadrature on complex projective spaces.
//
// The Fubini-Study measure on CP^d pushes forward, under
// [Z] -> (|Z_0|^2, ..., |Z_d|^2)/|Z|^2, to a uniform measure on the standard
// simplex, with independent uniform phases. A collapsed Gauss-Legendre rule on
// the simplex times a uniform rule on the phases therefore integrates every
// polynomial in (Z, Zbar)/|Z| of bidegree <= (D, D) exactly. For CP^1 this is
// Gauss-Legendre in t = rho^2/(1+rho^2) times the trapezoid rule in the angle.

#include "klab/linalg.hpp"

#include <vector>

namespace klab {

struct GaussRule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;  // weights, sum 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
GaussRule gauss_legendre01(int n);

/// Nodes on CP^d as unit vectors Z in C^{d+1} with Z_0 real positive.
/// Weights are positive and sum to vol(CP^d) = (2 pi)^d / d!, i.e. they
/// integrate against omega_FS^d / d! for omega_FS in 2 pi c_1(O(1)).
class ProjectiveRule {
public:
  ProjectiveRule() = default;
  /// Exact for polynomials of bidegree <= (degree, degree) in (Z, Zbar).
  ProjectiveRule(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return weights_.size(); }
  const CVec& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double volume() const;

  /// Affine chart coordinate z_a = Z_{a+1} / Z_0.
  CVec affine(std::size_t i) const;

private:
  int dim_ = 0;
  int degree_ = 0;
  std::vector<CVec> nodes_;
  std::vector<double> weights_;
};

/// Closed-form volume (2 pi)^d / d!.
double projective_volume(int d);

}  // namespace klab
