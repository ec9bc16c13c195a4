#include "klab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace klab {

namespace {

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

CheckResult verdict(std::string name, double worst, double tol, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = worst;
  c.tolerance = tol;
  c.passed = std::isfinite(worst) && worst < tol;
  c.detail = detail.empty() ? "max error " + sci(worst) : std::move(detail);
  return c;
}

CMat random_hermitian(long r, std::mt19937_64& rng, bool positive) {
  std::normal_distribution<double> nd;
  CMat x(r, r);
  for (auto& v : x.reshaped()) v = cplx(nd(rng), nd(rng));
  if (positive) return x * x.adjoint() + 0.5 * CMat::Identity(r, r);
  return (x + x.adjoint()) / 2.0;
}

}  // namespace

CVec random_point(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVec z(dim);
  for (auto& v : z) v = cplx(nd(rng), nd(rng));
  return z;
}

CheckResult check_c_r(int r_max, double tol) {
  double worst = 0;
  for (int r = 1; r <= r_max; ++r)
    worst = std::max(worst, std::abs(c_r_constant(r) / c_r_closed_form(r) - 1.0));
  return verdict("c_r", worst, tol, "r = 1.." + std::to_string(r_max) + ", max rel error " + sci(worst));
}

CheckResult check_prop52(int r, int trials, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  const ProjectiveRule fiber(r - 1, 4);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const CMat h0 = random_hermitian(r, rng, true);
    const MetricJet mj = metric_jet(BundleMetricField::constant(1, h0), CVec::Zero(1));
    const CMat g = fiber_push_forward(mj, fiber, [](const CVec&) { return 1.0; });
    worst = std::max(worst, (g - h0).cwiseAbs().maxCoeff());
  }
  return verdict("prop52_r" + std::to_string(r), worst, tol);
}

CheckResult check_psi_identities(const BergmanProblem& bp, int points, std::uint64_t seed, double tol_top,
                                 double tol_next) {
  const int m = bp.model.m;
  const long r = bp.model.rank();
  std::mt19937_64 rng(seed);
  double top = 0, next = 0;
  for (int p = 0; p < points; ++p) {
    const CVec z = random_point(m, rng);
    const MetricJet mj = metric_jet(bp.h, z);
    const CMat w = m > 0 ? eval_kahler_form(bp.omega, z) : CMat(0, 0);
    const FiberEndomorphisms fe = fiber_push_forward(mj, w, bp.fiber_rule());
    top = std::max(top, (fe.psi[m] - CMat::Identity(r, r)).cwiseAbs().maxCoeff());
    if (m > 0)
      next = std::max(next, (fe.psi[m - 1] - psi_m_minus_1_formula(curvature(mj, w).mean)).cwiseAbs().maxCoeff());
  }
  CheckResult c = verdict("psi_identities", std::max(top, next), tol_next);
  c.passed = top < tol_top && next < tol_next;
  c.detail = "Psi_m error " + sci(top) + " (tol " + sci(tol_top) + "), Psi_{m-1} error " + sci(next) + " (tol " +
             sci(tol_next) + ")";
  return c;
}

CheckResult check_route(const BergmanProblem& bp, int k, int points, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  const RhoDirect direct(bp, k);
  const BergmanEndomorphism b(bp, k);
  double worst = 0;
  for (int p = 0; p < points; ++p) {
    const CVec z = random_point(bp.model.m, rng);
    const CVec lam = random_point(bp.model.rank(), rng);
    const double a = direct(z, lam);
    worst = std::max(worst, std::abs(a - rho_via_trace(b, z, lam)) / std::abs(a));
  }
  return verdict("route_k" + std::to_string(k), worst, tol,
                 std::to_string(points) + " points, max rel error " + sci(worst));
}

CheckResult check_rho_integral(const BergmanProblem& bp, int k, double tol) {
  const RhoDirect direct(bp, k);
  const double n = static_cast<double>(direct.dimension());
  const double err = std::abs(direct.integral() - n) / n;
  return verdict("rho_integral_k" + std::to_string(k), err, tol,
                 "int rho = " + sci(direct.integral()) + ", N = " + std::to_string(direct.dimension()));
}

A11Input random_a11_direction(int m, int r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c1 = u(rng), c2 = u(rng), c3 = u(rng);
  CMat x = random_hermitian(r, rng, false), y = random_hermitian(r, rng, false);
  x -= x.trace() / static_cast<double>(r) * CMat::Identity(r, r);
  y -= y.trace() / static_cast<double>(r) * CMat::Identity(r, r);
  // d and re are mean-zero eigenfunctions; d * re is odd under z_1 -> -z_1
  auto d = [m](const JetPoint& p) {
    const Jet s = p.norm2();
    if (m == 1) return (1.0 - s) / (1.0 + s);
    return (p.z[0] * p.zbar[0] - p.z[1] * p.zbar[1]) / (1.0 + s);
  };
  auto re = [](const JetPoint& p) { return (p.z[0] + p.zbar[0]) / (1.0 + p.norm2()); };
  A11Input in;
  in.eta = [=](const JetPoint& p) {
    const Jet dd = d(p), rr = re(p);
    return c1 * dd + c2 * dd * rr + c3 * rr;
  };
  in.m = [=](const JetPoint& p) {
    const Jet w = reciprocal(1.0 + p.norm2()), f = d(p);
    std::vector<Jet> out;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) out.push_back(w * (x(i, j) + f * y(i, j)));
    return out;
  };
  return in;
}

CheckResult check_a11(int m, int r, int pairs, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  const BundleMetricField h = BundleMetricField::split_fs(m, std::vector<int>(r, 1));
  const KahlerStructure ks = fubini_study(m);
  const ProjectiveRule base(m, 12);
  double worst = 0;
  for (int i = 0; i < pairs; ++i) {
    const A11Input in = random_a11_direction(m, r, rng);
    check_a11_preconditions(h, ks, in, base);
    const CVec z = random_point(m, rng);
    const CMat exact = a11_apply(h, ks, in, z);
    const CMat fd = a1_directional_fd(h, ks, in, z);
    worst = std::max(worst, (exact - fd).norm() / fd.norm());
  }
  return verdict("a11_fd_m" + std::to_string(m), worst, tol,
                 std::to_string(pairs) + " directions, max rel error " + sci(worst));
}

}  // namespace klab
