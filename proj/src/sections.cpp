#include "klab/sections.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace klab {

ModelSpace ModelSpace::projective_point(int r) {
  ModelSpace ms;
  ms.kind = ModelKind::projective_point;
  ms.m = 0;
  ms.degrees.assign(r, 0);
  ms.k = 0;
  return ms;
}

ModelSpace ModelSpace::line_bundle_sum_over_p1(std::vector<int> a, int k) {
  ModelSpace ms;
  ms.kind = ModelKind::line_bundle_sum_over_p1;
  ms.m = 1;
  ms.degrees = std::move(a);
  ms.k = k;
  return ms;
}

ModelSpace ModelSpace::projective_space_base(int m, std::vector<int> a, int k) {
  ModelSpace ms;
  ms.kind = ModelKind::projective_space_base;
  ms.m = m;
  ms.degrees = std::move(a);
  ms.k = k;
  return ms;
}

ModelSpace ModelSpace::trivial_bundle_over_pm(int m, int r, int k) {
  ModelSpace ms;
  ms.kind = ModelKind::trivial_bundle_over_pm;
  ms.m = m;
  ms.degrees.assign(r, 0);
  ms.k = k;
  return ms;
}

ModelSpace ModelSpace::with_twist(int k2) const {
  ModelSpace ms = *this;
  ms.k = k2;
  return ms;
}

void ModelSpace::validate() const {
  if (degrees.empty()) throw std::invalid_argument("model: rank must be at least 1");
  if (m < 0) throw std::invalid_argument("model: negative base dimension");
  if (kind == ModelKind::projective_point && m != 0)
    throw std::invalid_argument("model: projective_point has base dimension 0");
  if (kind == ModelKind::line_bundle_sum_over_p1 && m != 1)
    throw std::invalid_argument("model: line_bundle_sum_over_p1 has base dimension 1");
  if (kind == ModelKind::trivial_bundle_over_pm)
    for (int a : degrees)
      if (a != 0) throw std::invalid_argument("model: trivial bundle must have zero degrees");
  if (m > 0)
    for (int a : degrees)
      if (a + k < 0) {
        std::ostringstream os;
        os << "model: a_i + k = " << a + k << " < 0 leaves the summand without sections";
        throw std::invalid_argument(os.str());
      }
}

std::string ModelSpace::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ModelKind::projective_point: os << "projective_point"; break;
    case ModelKind::line_bundle_sum_over_p1: os << "line_bundle_sum_over_p1"; break;
    case ModelKind::projective_space_base: os << "projective_space_base"; break;
    case ModelKind::trivial_bundle_over_pm: os << "trivial_bundle_over_pm"; break;
  }
  os << "(m=" << m << ", a=(";
  for (std::size_t i = 0; i < degrees.size(); ++i) os << (i ? "," : "") << degrees[i];
  os << "), k=" << k << ")";
  return os.str();
}

namespace {

void monomials_up_to(int m, int deg, std::vector<std::vector<int>>& out) {
  std::vector<int> e(m, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == m) {
      out.push_back(e);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      e[pos] = c;
      self(self, pos + 1, left - c);
    }
    e[pos] = 0;
  };
  rec(rec, 0, deg);
}

long binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

cplx monomial_value(const CVec& z, const std::vector<int>& e) {
  cplx v = 1.0;
  for (std::size_t j = 0; j < e.size(); ++j)
    for (int p = 0; p < e[j]; ++p) v *= z(j);
  return v;
}

}  // namespace

SectionBasis::SectionBasis(const ModelSpace& ms) : ms_(ms) {
  ms.validate();
  for (int i = 0; i < ms.rank(); ++i) {
    const int deg = (ms.m == 0) ? 0 : ms.degrees[i] + ms.k;
    std::vector<std::vector<int>> exps;
    monomials_up_to(ms.m, deg, exps);
    for (auto& e : exps) monomials_.push_back({i, std::move(e)});
  }
  if (monomials_.empty()) throw std::invalid_argument("section basis: empty section space");
}

CMat SectionBasis::section_matrix(const CVec& z) const {
  CMat s = CMat::Zero(ms_.rank(), static_cast<long>(size()));
  for (std::size_t c = 0; c < size(); ++c)
    s(monomials_[c].fiber, static_cast<long>(c)) = monomial_value(z, monomials_[c].exps);
  return s;
}

CMat SectionBasis::section_matrix_dz(const CVec& z, int j) const {
  CMat s = CMat::Zero(ms_.rank(), static_cast<long>(size()));
  for (std::size_t c = 0; c < size(); ++c) {
    const auto& mono = monomials_[c];
    const int p = mono.exps[j];
    if (p == 0) continue;
    std::vector<int> e = mono.exps;
    e[j] -= 1;
    s(mono.fiber, static_cast<long>(c)) = static_cast<double>(p) * monomial_value(z, e);
  }
  return s;
}

SectionBasis build_section_basis(const ModelSpace& ms) { return SectionBasis(ms); }

DimensionCount riemann_roch_dimension(const ModelSpace& ms) {
  ms.validate();
  DimensionCount d;
  for (int a : ms.degrees) d.n += (ms.m == 0) ? 1 : binomial(a + ms.k + ms.m, ms.m);
  double mf = 1.0;
  for (int i = 2; i <= ms.m; ++i) mf *= i;
  d.n1 = ms.rank() / mf;
  return d;
}

double topological_volume(const ModelSpace& ms) {
  // int (xi + kH)^n = sum_i C(n, m-i) k^{m-i} h_i(a), h_i complete homogeneous
  const int m = ms.m, r = ms.rank(), n = m + r - 1;
  std::vector<double> h(m + 1, 0.0);
  h[0] = 1.0;
  for (int a : ms.degrees)  // multiply generating series by 1/(1 - a t)
    for (int i = 1; i <= m; ++i) h[i] += a * h[i - 1];
  double total = 0.0;
  for (int i = 0; i <= m; ++i)
    total += static_cast<double>(binomial(n, m - i)) * std::pow(ms.k, m - i) * h[i];
  double nf = 1.0;
  for (int i = 2; i <= n; ++i) nf *= i;
  return std::pow(2.0 * std::numbers::pi, n) / nf * total;
}

CRow eval_basis(const SectionBasis& sb, const CVec& z, const CVec& lambda) {
  const CRow v = lambda.transpose() * sb.section_matrix(z);
  if (v.cwiseAbs().maxCoeff() == 0.0) {
    std::ostringstream os;
    os << "eval_basis: all sections vanish at z = " << z.transpose() << ", lambda = "
       << lambda.transpose();
    throw NumericalGuardError(os.str());
  }
  return v;
}

SectionJet eval_jet(const SectionBasis& sb, const CVec& z, const CVec& lambda) {
  SectionJet j;
  j.value = eval_basis(sb, z, lambda);
  const int m = sb.model().m;
  j.dz.resize(m, static_cast<long>(sb.size()));
  for (int a = 0; a < m; ++a) j.dz.row(a) = lambda.transpose() * sb.section_matrix_dz(z, a);
  j.dlambda = sb.section_matrix(z);
  return j;
}

}  // namespace klab
