#include "klab/sections.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace klab;

TEST_CASE("basis size equals the Riemann-Roch count") {
  for (auto ms : {ModelSpace::projective_point(3), ModelSpace::line_bundle_sum_over_p1({0, 1}, 3),
                  ModelSpace::projective_space_base(2, {0, 2}, 1), ModelSpace::trivial_bundle_over_pm(2, 3, 2)}) {
    const SectionBasis sb(ms);
    CHECK(static_cast<long>(sb.size()) == riemann_roch_dimension(ms).n);
  }
  CHECK(riemann_roch_dimension(ModelSpace::line_bundle_sum_over_p1({0, 1}, 3)).n == 4 + 5);
  CHECK(riemann_roch_dimension(ModelSpace::projective_space_base(2, {0}, 2)).n == 6);
}

TEST_CASE("topological volumes") {
  const double tp = 2 * std::numbers::pi;
  // CP^1 with O(k): 2 pi k
  CHECK(topological_volume(ModelSpace::line_bundle_sum_over_p1({0}, 5)) == doctest::Approx(5 * tp));
  // CP^1 x CP^1 with O(1, k): (2 pi)^2 * 2k / 2
  CHECK(topological_volume(ModelSpace::trivial_bundle_over_pm(1, 2, 3)) == doctest::Approx(tp * tp * 3));
  // point base: CP^{r-1}
  CHECK(topological_volume(ModelSpace::projective_point(3)) == doctest::Approx(tp * tp / 2));
  // Hirzebruch O + O(1), k: (xi + kH)^2 = 2k + 1
  CHECK(topological_volume(ModelSpace::line_bundle_sum_over_p1({0, 1}, 2)) == doctest::Approx(tp * tp * 5 / 2));
}

TEST_CASE("section matrices and derivatives") {
  const SectionBasis sb(ModelSpace::line_bundle_sum_over_p1({0, 1}, 1));
  CVec z(1);
  z << cplx(0.5, 0.25);
  const CMat s = sb.section_matrix(z);
  CHECK(s.rows() == 2);
  CHECK(s.cols() == 5);
  const double h = 1e-6;
  CVec zp = z;
  zp(0) += h;
  const CMat fd = (sb.section_matrix(zp) - s) / h;
  CHECK((fd - sb.section_matrix_dz(z, 0)).norm() < 1e-5);
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS(ModelSpace::line_bundle_sum_over_p1({-3}, 1).validate());
  CHECK_THROWS(ModelSpace::line_bundle_sum_over_p1({}, 1).validate());
  const SectionBasis sb(ModelSpace::projective_point(2));
  CVec z(0);
  CHECK_THROWS_AS(eval_basis(sb, z, CVec::Zero(2)), NumericalGuardError);
}
