#include "klab/bergman.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace klab;

namespace {

CVec point(std::initializer_list<cplx> v) {
  CVec z(static_cast<long>(v.size()));
  long i = 0;
  for (cplx c : v) z(i++) = c;
  return z;
}

CMat random_pd(int r, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  CMat x(r, r);
  for (auto& v : x.reshaped()) v = cplx(nd(rng), nd(rng));
  return x * x.adjoint() + 0.5 * CMat::Identity(r, r);
}

BundleMetricField twisted() {
  MatrixJetField dm = [](const JetPoint& p) {
    const Jet w = reciprocal(1.0 + p.norm2());
    return std::vector<Jet>{p.constant(0.0), w * p.zbar[0] * 0.5, w * p.z[0] * 0.5, p.constant(0.0)};
  };
  return BundleMetricField::perturbed(BundleMetricField::split_fs(1, {1, 2}), dm, 0.3);
}

// eta on CP^1: a first and a second spherical harmonic in c = (1-|z|^2)/(1+|z|^2)
Jet harmonic_mix(const JetPoint& p, double a, double b, double c) {
  const Jet s = p.norm2();
  const Jet cc = (1.0 - s) / (1.0 + s);
  const Jet re = (p.z[0] + p.zbar[0]) / (1.0 + s);
  return a * cc + b * (1.5 * cc * cc - 0.5) + c * re;
}

}  // namespace

TEST_CASE("C_r quadrature matches (2 pi)^{r-1}/r!") {
  for (int r = 1; r <= 6; ++r) CHECK(c_r_constant(r) == doctest::Approx(c_r_closed_form(r)).epsilon(1e-13));
  CHECK(c_r_constant(2) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("volume weights are the coefficients of det(Theta + kW)/det W") {
  const CMat w = random_pd(2, *std::make_unique<std::mt19937>(2));
  auto f = volume_weights(CMat::Zero(2, 2), w);
  CHECK(f[0] == doctest::Approx(0.0));
  CHECK(f[1] == doctest::Approx(0.0));
  CHECK(f[2] == doctest::Approx(1.0));
  f = volume_weights(w, w);  // (k+1)^2
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(2.0));
  CHECK(f[2] == doctest::Approx(1.0));
  CHECK(volume_weights(CMat(0, 0), CMat(0, 0)).size() == 1);
}

TEST_CASE("horizontal form is the Schur complement of the chart Hessian") {
  // omega_g = i ddbar log(lambda P lambda^*) in the chart (z, lambda_0) with lambda_1 = 1
  const BundleMetricField h = twisted();
  const cplx z0(0.3, -0.4), l0(0.7, 0.2);
  std::vector<cplx> u{z0, l0};
  const JetPoint p = JetPoint::seed(u, 2);
  JetPoint base;
  base.space = p.space;
  base.z = {p.z[0]};
  base.zbar = {p.zbar[0]};
  const std::vector<Jet> pj = jet_matrix_inverse(h.field()(base), 2);
  const std::vector<Jet> lam{p.z[1], p.constant(1.0)}, lamb{p.zbar[1], p.constant(1.0)};
  Jet q = p.constant(0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q += lam[a] * pj[a * 2 + b] * lamb[b];
  const std::vector<cplx> hs = complex_hessian(log(q), 2);
  const cplx schur = hs[0] - hs[1] * hs[2] / hs[3];
  const CMat theta = horizontal_form(metric_jet(h, point({z0})), point({l0, 1.0}));
  CHECK(std::abs(theta(0, 0) - schur) < 1e-12);
}

TEST_CASE("push-forward of the hat metric returns h") {
  std::mt19937 rng(1);
  for (int r = 2; r <= 4; ++r) {
    const CMat h0 = random_pd(r, rng);
    const MetricJet mj = metric_jet(BundleMetricField::constant(1, h0), point({cplx(0.2, 0.1)}));
    const CMat g = fiber_push_forward(mj, ProjectiveRule(r - 1, 4), [](const CVec&) { return 1.0; });
    CHECK((g - h0).cwiseAbs().maxCoeff() < 1e-11);
  }
  const MetricJet mj = metric_jet(twisted(), point({cplx(0.6, 0.6)}));
  const CMat g = fiber_push_forward(mj, ProjectiveRule(1, 4), [](const CVec&) { return 1.0; });
  CHECK((g - mj.h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Psi_m = I and Psi_{m-1} = (tr K + K)/(r+1)") {
  SUBCASE("split bundles over CP^1") {
    for (auto a : std::vector<std::vector<int>>{{0, 1}, {2, -1}, {0, 1, 3}}) {
      const BundleMetricField h = BundleMetricField::split_fs(1, a);
      const CVec z = point({cplx(-0.3, 0.9)});
      const MetricJet mj = metric_jet(h, z);
      const CMat w = eval_kahler_form(fubini_study(1), z);
      const long r = static_cast<long>(a.size());
      const FiberEndomorphisms fe = fiber_push_forward(mj, w, ProjectiveRule(r - 1, 6));
      CHECK((fe.psi[1] - CMat::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((fe.psi[0] - psi_m_minus_1_formula(curvature(mj, w).mean)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("non-diagonal metric") {
    const CVec z = point({cplx(0.5, 0.1)});
    const MetricJet mj = metric_jet(twisted(), z);
    const CMat w = eval_kahler_form(fubini_study(1), z);
    const FiberEndomorphisms fe = fiber_push_forward(mj, w, ProjectiveRule(1, 6));
    CHECK((fe.psi[1] - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fe.psi[0] - psi_m_minus_1_formula(curvature(mj, w).mean)).cwiseAbs().maxCoeff() < 1e-11);
  }
  SUBCASE("CP^2 base") {
    const CVec z = point({cplx(0.2, 0.3), cplx(-0.1, 0.4)});
    const MetricJet mj = metric_jet(BundleMetricField::split_fs(2, {0, 1}), z);
    const CMat w = eval_kahler_form(fubini_study(2), z);
    const FiberEndomorphisms fe = fiber_push_forward(mj, w, ProjectiveRule(1, 8));
    CHECK((fe.psi[2] - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fe.psi[1] - psi_m_minus_1_formula(curvature(mj, w).mean)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("rho by direct orthonormalization equals C_r^-1 tr(lambda(v,h) B~)") {
  std::mt19937 rng(4);
  std::normal_distribution<double> nd;
  const BergmanProblem bp = standard_problem(ModelSpace::line_bundle_sum_over_p1({0, 1}, 0));
  const int k = 3;
  const RhoDirect rho(bp, k);
  const BergmanEndomorphism b(bp, k);
  for (int i = 0; i < 20; ++i) {
    const CVec z = point({cplx(nd(rng), nd(rng))});
    const CVec lam = point({cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))});
    const double a = rho(z, lam);
    CHECK(std::abs(a - rho_via_trace(b, z, lam)) < 1e-10 * a);
  }
  CHECK(rho.integral() == doctest::Approx(static_cast<double>(rho.dimension())).epsilon(1e-12));
}

TEST_CASE("degenerate and exact cases of B~") {
  SUBCASE("point base: B~ is the identity") {
    BergmanProblem bp = standard_problem(ModelSpace::projective_point(3));
    bp.h = BundleMetricField::constant(0, random_pd(3, *std::make_unique<std::mt19937>(9)));
    const BergmanEndomorphism b(bp, 0);
    CHECK((b.at(CVec(0)) - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("trivial bundle over CP^1: 2 pi B~ = (k+1) I") {
    const BergmanProblem bp = standard_problem(ModelSpace::trivial_bundle_over_pm(1, 2, 0));
    for (int k : {1, 4}) {
      const BergmanEndomorphism b(bp, k);
      const CMat bt = 2 * std::numbers::pi * b.at(point({cplx(0.4, -1.2)}));
      CHECK((bt - (k + 1.0) * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("serial and parallel Gram assembly agree") {
  BergmanProblem bp = standard_problem(ModelSpace::line_bundle_sum_over_p1({0, 2}, 0));
  bp.exec = Exec::serial;
  const BergmanEndomorphism s(bp, 3);
  bp.exec = Exec::parallel;
  const BergmanEndomorphism p(bp, 3);
  CHECK((s.gram() - p.gram()).norm() <= 1e-15 * s.gram().norm());
}

TEST_CASE("conditioning guard fires when the rule cannot resolve the sections") {
  BergmanProblem bp = standard_problem(ModelSpace::line_bundle_sum_over_p1({0}, 0));
  bp.base_degree = 1;
  CHECK_THROWS_AS(BergmanEndomorphism(bp, 8), NumericalGuardError);
}

TEST_CASE("A_1 closed form versus the fibre-integral form") {
  // the closed form is (r+1)/r times B_1 - Psi_{m-1}
  for (auto a : std::vector<std::vector<int>>{{0, 1}, {0, 0}, {1, 2, 4}}) {
    const BundleMetricField h = BundleMetricField::split_fs(1, a);
    const CVec z = point({cplx(0.3, 0.3)});
    const double r = static_cast<double>(a.size());
    const CMat alt = a1_alternative(h, fubini_study(1), z, ProjectiveRule(a.size() - 1, 6));
    CHECK((a1_formula(h, fubini_study(1), z) - (r + 1) / r * alt).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("expansion fit recovers the k^{m-1} coefficient") {
  const BergmanProblem bp = standard_problem(ModelSpace::line_bundle_sum_over_p1({0, 1}, 0));
  const CVec z = point({cplx(0.3, 0.1)});
  const ExpansionFit fit = expansion_fit(bp, {4, 6, 8, 10}, {z});
  const CMat alt = a1_alternative(bp.h, bp.omega, z, ProjectiveRule(1, 6));
  CHECK((fit.a[0] - alt).cwiseAbs().maxCoeff() < 0.02 * alt.cwiseAbs().maxCoeff());
  CHECK(fit.residual_slope == doctest::Approx(-1.0).epsilon(0.1));
  CHECK_THROWS_AS(expansion_fit(bp, {4, 5}, {z}), std::invalid_argument);
}

TEST_CASE("Lichnerowicz operator on CP^1 is Delta^2 + 2 Delta") {
  const double a = 0.7, b = -1.3, c = 0.4;
  const JetField eta = [=](const JetPoint& p) { return harmonic_mix(p, a, b, c); };
  for (cplx z0 : {cplx(0.2, 0.5), cplx(-1.5, 0.3)}) {
    std::vector<cplx> zz{z0};
    const JetPoint p = JetPoint::seed(zz, 4);
    const Jet g2 = pow(1.0 + p.norm2(), 2.0);
    const Jet lap = truncate(g2, 2) * differentiate(differentiate(eta(p), 0), 1);
    const cplx lap2 = g2.value() * lap.dd(0, 1);
    const double oracle = (lap2 + 2.0 * lap.value()).real();
    CHECK(lichnerowicz_apply(fubini_study(1), eta, point({z0})) == doctest::Approx(oracle).epsilon(1e-6));
  }
  // first harmonics are holomorphy potentials and lie in the kernel
  const JetField first = [](const JetPoint& p) { return harmonic_mix(p, 1.0, 0.0, 2.0); };
  CHECK(std::abs(lichnerowicz_apply(fubini_study(1), first, point({cplx(0.4, 0.4)}))) < 1e-6);
}

TEST_CASE("A_{1,1} matches finite differences of A_1") {
  const BundleMetricField h = BundleMetricField::split_fs(1, {1, 1});
  CMat x(2, 2), y(2, 2);
  x << 0.5, cplx(0.2, -0.3), cplx(0.2, 0.3), -0.5;
  y << 1.0, cplx(0.0, 0.4), cplx(0.0, -0.4), -0.2;
  A11Input in;
  in.eta = [](const JetPoint& p) { return harmonic_mix(p, 0.3, 0.8, -0.5); };
  in.m = [=](const JetPoint& p) {
    const Jet s = p.norm2();
    const Jet w = reciprocal(1.0 + s), f = (1.0 - s) / (1.0 + s);
    std::vector<Jet> out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.push_back(w * (x(i, j) + f * y(i, j)));
    return out;
  };
  check_a11_preconditions(h, fubini_study(1), in, ProjectiveRule(1, 12));
  const CVec z = point({cplx(0.4, -0.6)});
  const CMat exact = a11_apply(h, fubini_study(1), in, z);
  const CMat fd = a1_directional_fd(h, fubini_study(1), in, z);
  CHECK((exact - fd).norm() < 1e-3 * fd.norm());
}

TEST_CASE("A_{1,1} preconditions are enforced") {
  A11Input in;
  in.eta = [](const JetPoint& p) { return harmonic_mix(p, 1.0, 0.0, 0.0); };
  in.m = [](const JetPoint& p) { return std::vector<Jet>(4, p.constant(0.0)); };
  CHECK_THROWS_AS(check_a11_preconditions(BundleMetricField::split_fs(1, {0, 1}), fubini_study(1), in,
                                          ProjectiveRule(1, 8)),
                  PreconditionError);
  in.eta = [](const JetPoint& p) { return p.constant(1.0); };
  CHECK_THROWS_AS(check_a11_preconditions(BundleMetricField::split_fs(1, {1, 1}), fubini_study(1), in,
                                          ProjectiveRule(1, 8)),
                  PreconditionError);
}
