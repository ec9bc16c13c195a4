#include "klab/quadrature.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace klab;

TEST_CASE("Gauss-Legendre on [0,1] is exact to degree 2n-1") {
  const GaussRule g = gauss_legendre01(5);
  for (int p = 0; p <= 9; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], p);
    CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
  }
}

TEST_CASE("projective rules carry the Fubini-Study volume") {
  for (int d = 0; d <= 3; ++d) {
    const ProjectiveRule q(d, 6);
    CHECK(q.volume() == doctest::Approx(projective_volume(d)).epsilon(1e-13));
    CHECK(projective_volume(d) == doctest::Approx(std::pow(2 * std::numbers::pi, d) / std::tgamma(d + 1.0)));
  }
}

TEST_CASE("projective rules integrate moments of |Z_a|^2 exactly") {
  // int |Z_a|^2 = vol/(d+1), int |Z_a|^4 = 2 vol/((d+1)(d+2)), int |Z_0 Z_1|^2 = vol/((d+1)(d+2))
  for (int d = 1; d <= 3; ++d) {
    const ProjectiveRule q(d, 4);
    const double vol = projective_volume(d);
    double s2 = 0, s4 = 0, s11 = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const CVec& z = q.node(i);
      s2 += q.weight(i) * std::norm(z(d));
      s4 += q.weight(i) * std::pow(std::norm(z(1)), 2);
      s11 += q.weight(i) * std::norm(z(0)) * std::norm(z(1));
    }
    CHECK(s2 == doctest::Approx(vol / (d + 1)).epsilon(1e-13));
    CHECK(s4 == doctest::Approx(2 * vol / ((d + 1) * (d + 2))).epsilon(1e-13));
    CHECK(s11 == doctest::Approx(vol / ((d + 1) * (d + 2))).epsilon(1e-13));
  }
}

TEST_CASE("nodes are unit vectors with real positive first entry") {
  const ProjectiveRule q(2, 5);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q.node(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.node(i)(0).real() > 0.0);
    CHECK(std::abs(q.node(i)(0).imag()) < 1e-15);
    const CVec z = q.affine(i);
    CHECK(std::abs(z(1) - q.node(i)(2) / q.node(i)(0)) < 1e-14);
  }
}
