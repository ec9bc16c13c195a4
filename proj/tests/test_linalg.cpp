#include "klab/linalg.hpp"

#include "doctest.h"

using namespace klab;

TEST_CASE("guarded cholesky rejects ill-conditioned and indefinite input") {
  CMat a = CMat::Identity(2, 2);
  a(1, 1) = 1e-14;
  CHECK_THROWS_AS(guarded_cholesky(a, 1e12, "test"), NumericalGuardError);
  CMat b = CMat::Identity(2, 2);
  b(1, 1) = -1.0;
  CHECK_THROWS_AS(guarded_cholesky(b, 1e12, "test"), NumericalGuardError);
  CMat c(2, 2);
  c << 2.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 2.0;
  const CMat l = guarded_cholesky(c, 1e12, "test");
  CHECK((l * l.adjoint() - c).norm() < 1e-14);
}

TEST_CASE("hermitian functions") {
  CMat a(2, 2);
  a << 1.0, cplx(0.5, 0.5), cplx(0.5, -0.5), 3.0;
  const CMat s = hermitian_sqrt(a);
  CHECK((s * s - a).norm() < 1e-13);
  CHECK((hermitian_inv_sqrt(a) * s - CMat::Identity(2, 2)).norm() < 1e-13);
  CHECK((spd_inverse(a) * a - CMat::Identity(2, 2)).norm() < 1e-13);
  const CMat e = hermitian_exp(CMat::Zero(2, 2));
  CHECK((e - CMat::Identity(2, 2)).norm() < 1e-15);
  CHECK(condition_number(a) > 1.0);
  CHECK(hermitian_defect(a) < 1e-15);
}
