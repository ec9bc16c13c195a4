#include "klab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace klab {

GaussRule gauss_legendre01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre01: n must be positive");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    r.x[i] = 0.5 * (1.0 - x);
    r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) scaled by 1/2
  }
  return r;
}

double projective_volume(int d) {
  double v = 1.0;
  for (int i = 1; i <= d; ++i) v *= 2.0 * std::numbers::pi / i;
  return v;
}

ProjectiveRule::ProjectiveRule(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || degree < 0) throw std::invalid_argument("ProjectiveRule: negative argument");
  if (dim == 0) {
    nodes_.push_back(CVec::Ones(1));
    weights_.push_back(1.0);
    return;
  }
  const int n = (degree + dim) / 2 + 1;
  const int phases = degree + 1;
  const GaussRule g = gauss_legendre01(n);
  const double density = std::pow(2.0 * std::numbers::pi, dim);

  std::vector<int> ui(dim, 0), ti(dim, 0);
  auto next = [](std::vector<int>& idx, int base) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (++idx[a] < base) return true;
      idx[a] = 0;
    }
    return false;
  };
  do {
    // collapsed simplex coordinates
    std::vector<double> x(dim + 1, 0.0);
    double rest = 1.0, jac = 1.0, wsim = 1.0;
    for (int a = 0; a < dim; ++a) {
      const double u = g.x[ui[a]];
      x[a + 1] = rest * u;
      if (a < dim - 1) jac *= std::pow(1.0 - u, dim - 1 - a);
      rest *= (1.0 - u);
      wsim *= g.w[ui[a]];
    }
    x[0] = rest;
    std::fill(ti.begin(), ti.end(), 0);
    do {
      CVec z(dim + 1);
      z(0) = std::sqrt(x[0]);
      for (int a = 0; a < dim; ++a) {
        const double th = 2.0 * std::numbers::pi * ti[a] / phases;
        z(a + 1) = std::polar(std::sqrt(x[a + 1]), th);
      }
      nodes_.push_back(z);
      weights_.push_back(density * wsim * jac / std::pow(static_cast<double>(phases), dim));
    } while (next(ti, phases));
  } while (next(ui, n));
}

double ProjectiveRule::volume() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

CVec ProjectiveRule::affine(std::size_t i) const {
  const CVec& z = nodes_[i];
  CVec a(dim_);
  for (int j = 0; j < dim_; ++j) a(j) = z(j + 1) / z(0);
  return a;
}

}  // namespace klab
