#include "klab/balancing.hpp"

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <random>

using namespace klab;

namespace {

BalancingSetup p1_line(int k) {
  BalancingSetup s;
  s.model = ModelSpace::line_bundle_sum_over_p1({0}, k);
  return s;
}

// Random starts drift along the automorphism orbit, where the default rule
// leaves a ~1e-8 floor on |M|; a finer rule removes it.
BalancingSetup p1_line_fine(int k) {
  BalancingSetup s = p1_line(k);
  s.base_degree = 30;
  s.fiber_degree = 12;
  return s;
}

CMat random_spd(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  CMat x(n, n);
  for (auto& v : x.reshaped()) v = cplx(nd(rng), nd(rng));
  return x * x.adjoint() / static_cast<double>(n) + CMat::Identity(n, n);
}

// Grams agree as metrics on the projective space: G1 = c U^* G2 U is not
// tested for; we compare the induced Bergman densities instead.
double density_gap(const EmbeddingState& a, const EmbeddingState& b) {
  const auto ra = fs_bergman_density(a), rb = fs_bergman_density(b);
  double gap = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) gap = std::max(gap, std::abs(ra[i] - rb[i]) / std::abs(rb[i]));
  return gap;
}

// dense reference for Q_z: the same integral with the projection computed by SVD
RMat dense_qz(const EmbeddingState& es, const std::vector<CMat>& basis) {
  const auto& geo = es.geometry();
  const CMat& t = es.transform();
  const long nb = static_cast<long>(basis.size());
  RMat q = RMat::Zero(nb, nb);
  for (const YNode& y : geo.nodes()) {
    const CVec w = (y.v * t).transpose();
    const CMat du = (y.jac * t).transpose();
    const double nw = w.squaredNorm();
    const CMat pperp = CMat::Identity(w.size(), w.size()) - w * w.adjoint() / nw;
    const CMat tan = pperp * du;
    Eigen::JacobiSVD<CMat> svd(tan, Eigen::ComputeThinU);
    if (svd.singularValues().minCoeff() < 1e-10 * svd.singularValues().maxCoeff()) continue;
    const CMat u = svd.matrixU();
    CMat ys(w.size(), nb);
    for (long i = 0; i < nb; ++i) {
      CVec yi = pperp * (basis[i] * w);
      ys.col(i) = yi - u * (u.adjoint() * yi);
    }
    // volume density of omega_G in the chart
    CMat g = tan.adjoint() * tan / nw;
    const double dvol = y.ref_weight * g.determinant().real();
    q += dvol * (ys.adjoint() * ys).real() / nw;
  }
  return q;
}

}  // namespace

TEST_CASE("moment map is trace free") {
  const auto geo = std::make_shared<const EmbeddingGeometry>(p1_line(3));
  const EmbeddingState es(geo, random_spd(geo->dimension(), 3));
  const MomentValue mv = moment_map(es);
  CHECK(std::abs(mv.m.trace()) < 1e-10);
  CHECK(mv.m.isApprox(mv.m.adjoint(), 1e-12));
}

TEST_CASE("a point base is balanced at the identity") {
  BalancingSetup s;
  s.model = ModelSpace::projective_point(3);
  const EmbeddingState es = initial_state(s);
  CHECK(moment_map(es).op_norm < 1e-12);
  const EmbeddingState next = t_map_step(es);
  CHECK((next.gram() - es.gram()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sigma_z_operator(es).q.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("moment map is invariant under scaling and diagonal unitaries") {
  BalancingSetup s = p1_line(2);
  s.base_degree = 11;  // an even number of phases, so z -> -z permutes the nodes
  const auto geo = std::make_shared<const EmbeddingGeometry>(s);
  const CMat g = random_spd(geo->dimension(), 5);
  const MomentValue a = moment_map(EmbeddingState(geo, g));
  const MomentValue b = moment_map(EmbeddingState(geo, 7.5 * g));
  CHECK(b.op_norm == doctest::Approx(a.op_norm).epsilon(1e-10));
  // z -> -z acts on the monomials z^j by (-1)^j
  CMat u = CMat::Zero(geo->dimension(), geo->dimension());
  for (long i = 0; i < u.rows(); ++i) u(i, i) = geo->basis().monomials()[i].exps[0] % 2 ? -1.0 : 1.0;
  const MomentValue c = moment_map(EmbeddingState(geo, u.adjoint() * g * u));
  CHECK(c.op_norm == doctest::Approx(a.op_norm).epsilon(1e-10));
}

TEST_CASE("serial and parallel integrals agree") {
  const auto geo = std::make_shared<const EmbeddingGeometry>(p1_line(4));
  const EmbeddingState es(geo, random_spd(geo->dimension(), 8));
  const StateIntegrals s = state_integrals(es, Exec::serial), p = state_integrals(es, Exec::parallel);
  CHECK((s.k_t - p.k_t).norm() <= 1e-14 * s.k_t.norm());
  CHECK(s.volume == doctest::Approx(p.volume).epsilon(1e-14));
}

TEST_CASE("T-iteration balances P^1 O(2) from a random start") {
  const auto geo = std::make_shared<const EmbeddingGeometry>(p1_line_fine(2));
  const EmbeddingState start(geo, random_spd(geo->dimension(), 11));
  const BalanceReport rep = balance_iterate(start, 1e-10, 200);
  REQUIRE(rep.converged);
  CHECK_FALSE(rep.diverged);
  CHECK(rep.op_norm.back() < rep.op_norm.front());
  const EmbeddingState fin(geo, rep.final_gram);
  CHECK(relative_variance(fs_bergman_density(fin)) < 1e-12);
  const MomentValue mv = moment_map(fin);
  CHECK(mv.d == doctest::Approx(topological_volume(geo->setup().model) / 3.0).epsilon(1e-6));
}

TEST_CASE("gradient flow descends and meets the T-iteration fixed point") {
  const auto geo = std::make_shared<const EmbeddingGeometry>(p1_line_fine(2));
  const EmbeddingState start(geo, random_spd(geo->dimension(), 12));
  double used = 0;
  const EmbeddingState one = gradient_flow_step(start, 1.0, &used);
  CHECK(used > 0);
  CHECK(moment_map(one).frobenius < moment_map(start).frobenius);
  const FlowReport flow = gradient_flow(start, 1.0, 1e-10, 500);
  const BalanceReport tmap = balance_iterate(start, 1e-10, 200);
  REQUIRE(flow.converged);
  REQUIRE(tmap.converged);
  CHECK(density_gap(EmbeddingState(geo, flow.final_gram), EmbeddingState(geo, tmap.final_gram)) < 1e-6);
}

TEST_CASE("Q_z is PSD and matches a dense evaluation") {
  const auto geo = std::make_shared<const EmbeddingGeometry>(p1_line(2));
  CMat g = CMat::Identity(3, 3);
  g(0, 0) = 1.1;
  g(2, 2) = 0.9;
  const EmbeddingState es(geo, g);
  const auto basis = su_basis(3);
  CHECK(basis.size() == 8);
  const QzResult qz = sigma_z_operator(es, basis);
  CHECK(qz.eigenvalues.minCoeff() > -1e-10 * qz.eigenvalues.maxCoeff());
  const RMat dense = dense_qz(es, basis);
  CHECK((qz.q - dense).norm() < 1e-8 * dense.norm());
}

TEST_CASE("Q_z on the balanced conic has the sl2 kernel") {
  const auto geo = std::make_shared<const EmbeddingGeometry>(p1_line(2));
  const BalanceReport rep = balance_iterate(initial_state(p1_line(2)), 1e-12, 200);
  const EmbeddingState es(geo, rep.final_gram);
  const QzResult qz = sigma_z_operator(es);
  CHECK(qz.kernel_dim == 3);
  CHECK(qz.min_positive > 0);
  // conjugating the basis by a unitary leaves the spectrum unchanged
  Eigen::HouseholderQR<CMat> qr(random_spd(3, 2) + CMat::Identity(3, 3) * cplx(0, 1));
  const CMat u = qr.householderQ();
  std::vector<CMat> rotated;
  for (const CMat& b : su_basis(3)) rotated.push_back(u * b * u.adjoint());
  const QzResult qz2 = sigma_z_operator(es, rotated);
  CHECK((qz.eigenvalues - qz2.eigenvalues).cwiseAbs().maxCoeff() < 1e-9 * qz.eigenvalues.maxCoeff());
}

TEST_CASE("R-bounded check") {
  const FormField id = [](const CVec& u) { return CMat::Identity(u.size(), u.size()); };
  const std::vector<CVec> pts{CVec::Constant(1, cplx(0.1, 0.2))};
  const RBoundedResult ok = r_bounded_check(id, id, pts, 4.0);
  CHECK(ok.passed);
  CHECK(ok.norm_margin == doctest::Approx(4.0));
  CHECK(ok.positivity_margin == doctest::Approx(0.75));
  const FormField thrice = [](const CVec& u) { return CMat(3.0 * CMat::Identity(u.size(), u.size())); };
  CHECK_FALSE(r_bounded_check(thrice, id, pts, 1.5).passed);
  const FormField half = [](const CVec& u) { return CMat(0.5 * CMat::Identity(u.size(), u.size())); };
  const RBoundedResult degenerate = r_bounded_check(half, id, pts, 1.5);
  CHECK_FALSE(degenerate.passed);
  CHECK(degenerate.positivity_margin < 0);
}

TEST_CASE("almost balanced verdict reads the decay order") {
  std::vector<AlmostBalancedSample> seq;
  for (int k = 2; k <= 6; ++k) {
    AlmostBalancedSample s;
    s.k = k;
    s.m = CMat::Identity(2, 2) * std::pow(static_cast<double>(k), -3.0);
    s.m(1, 1) *= -1.0;
    s.d = 1.0;
    seq.push_back(s);
  }
  const AlmostBalancedVerdict v = almost_balanced_check(seq, 2);
  CHECK(v.verdict);
  CHECK(v.fitted_order == doctest::Approx(3.0));
  CHECK_FALSE(almost_balanced_check(seq, 3).verdict);
  for (auto& s : seq) s.m.setZero();
  const AlmostBalancedVerdict z = almost_balanced_check(seq, 5);
  CHECK(z.verdict);
  CHECK(z.all_zero);
  seq.resize(2);
  CHECK_THROWS(almost_balanced_check(seq, 1));
}
