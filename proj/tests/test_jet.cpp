#include "klab/jet.hpp"

#include "doctest.h"

#include <cmath>

using namespace klab;

namespace {

JetPoint at(cplx z0, int order) {
  std::vector<cplx> z{z0};
  return JetPoint::seed(z, order);
}

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("first and mixed derivatives of z zbar") {
  const cplx z0(0.3, -0.7);
  const JetPoint p = at(z0, 3);
  const Jet f = p.z[0] * p.zbar[0];
  CHECK(near(f.value(), std::norm(z0), 1e-15));
  CHECK(near(f.d(0), std::conj(z0), 1e-15));
  CHECK(near(f.d(1), z0, 1e-15));
  CHECK(near(f.dd(0, 1), 1.0, 1e-15));
  CHECK(near(f.dd(0, 0), 0.0, 1e-15));
}

TEST_CASE("log(1+|z|^2) has ddbar = (1+|z|^2)^-2") {
  const cplx z0(0.4, 0.2);
  const JetPoint p = at(z0, 2);
  const Jet phi = log(1.0 + p.norm2());
  const double s = std::norm(z0);
  CHECK(near(phi.dd(0, 1), 1.0 / ((1 + s) * (1 + s)), 1e-14));
  CHECK(near(phi.d(0), std::conj(z0) / (1 + s), 1e-14));
}

TEST_CASE("analytic compositions are consistent") {
  const JetPoint p = at(cplx(0.5, 0.1), 4);
  const Jet x = 2.0 + p.norm2() + p.z[0];
  const Jet s = sqrt(x);
  const Jet back = s * s - x;
  for (cplx c : back.coefficients()) CHECK(std::abs(c) < 1e-13);
  const Jet e = exp(log(x)) - x;
  for (cplx c : e.coefficients()) CHECK(std::abs(c) < 1e-13);
  const Jet r = reciprocal(x) * x - 1.0;
  for (cplx c : r.coefficients()) CHECK(std::abs(c) < 1e-13);
  const Jet q = pow(x, 3.0) - x * x * x;
  for (cplx c : q.coefficients()) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("differentiate and truncate agree with direct partials") {
  const JetPoint p = at(cplx(-0.2, 0.9), 4);
  const Jet f = log(1.0 + p.norm2()) * p.z[0];
  const Jet df = differentiate(f, 1);
  CHECK(df.space()->order() == 3);
  CHECK(near(df.value(), f.d(1), 1e-14));
  CHECK(near(df.d(0), f.dd(0, 1), 1e-14));
  const Jet t = truncate(f, 2);
  CHECK(t.space()->order() == 2);
  CHECK(near(t.dd(0, 1), f.dd(0, 1), 1e-15));
}

TEST_CASE("determinant of a jet matrix") {
  const JetPoint p = at(cplx(0.1, 0.2), 2);
  std::vector<Jet> a{1.0 + p.norm2(), p.z[0], p.zbar[0], 2.0 + p.norm2()};
  const Jet d = jet_determinant(a, 2);
  const Jet direct = a[0] * a[3] - a[1] * a[2];
  for (std::size_t i = 0; i < d.coefficients().size(); ++i)
    CHECK(std::abs(d.coefficients()[i] - direct.coefficients()[i]) < 1e-14);
}

TEST_CASE("zero-variable jets hold a constant") {
  std::vector<cplx> none;
  const JetPoint p = JetPoint::seed(none, 2);
  CHECK(p.space->size() == 1);
  const Jet c = p.constant(3.0) * 2.0;
  CHECK(near(c.value(), 6.0, 0));
}
