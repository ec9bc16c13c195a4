#include "klab/geometry.hpp"

#include <bit>
#include <stdexcept>

namespace klab {

KahlerStructure fubini_study(int m) {
  KahlerStructure ks;
  ks.dim = m;
  ks.name = "fubini-study";
  ks.potential = [](const JetPoint& p) { return log(1.0 + p.norm2()); };
  return ks;
}

KahlerStructure flat(int m) {
  KahlerStructure ks;
  ks.dim = m;
  ks.name = "flat";
  ks.potential = [](const JetPoint& p) { return p.norm2(); };
  return ks;
}

KahlerStructure perturbed(const KahlerStructure& ks, JetField eta, double t) {
  if (!ks.exact()) throw std::invalid_argument("perturbed: base potential must be jet-valued");
  KahlerStructure out;
  out.dim = ks.dim;
  out.name = ks.name + "+t*ddbar(eta)";
  auto base = ks.potential;
  out.potential = [base, eta = std::move(eta), t](const JetPoint& p) {
    return base(p) - eta(p) * cplx(t);
  };
  return out;
}

KahlerStructure from_values(int m, ValueField phi, std::string name) {
  KahlerStructure ks;
  ks.dim = m;
  ks.name = std::move(name);
  ks.values = std::move(phi);
  return ks;
}

std::vector<Jet> kahler_jets(const KahlerStructure& ks, const JetPoint& p) {
  const int m = ks.dim;
  const Jet phi = ks.potential(p);
  std::vector<Jet> g;
  g.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    const Jet dj = differentiate(phi, j);
    for (int k = 0; k < m; ++k) g.push_back(differentiate(dj, m + k));
  }
  return g;
}

namespace {

CMat jet_values(const std::vector<Jet>& a, int m) {
  CMat out(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) out(j, k) = a[j * m + k].value();
  return out;
}

double fd_log_det(const ValueField& f, const CVec& z, double h) {
  const CMat g = fd_complex_hessian(f, z, h);
  return std::log(std::abs(g.determinant()));
}

}  // namespace

CMat kahler_matrix(const KahlerStructure& ks, const CVec& z) {
  if (z.size() != ks.dim) throw std::invalid_argument("kahler_matrix: dimension mismatch");
  if (!ks.exact()) return hermitian_part(fd_complex_hessian(ks.values, z));
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  const JetPoint p = JetPoint::seed(zz, 2);
  return hermitian_part(jet_values(kahler_jets(ks, p), ks.dim));
}

CMat eval_kahler_form(const KahlerStructure& ks, const CVec& z) {
  const CMat g = kahler_matrix(ks, z);
  if (ks.dim > 0 && !(min_eigenvalue(g) > 0.0)) {
    std::ostringstream os;
    os << "potential '" << ks.name << "' is not strictly plurisubharmonic at z = "
       << z.transpose();
    throw InvalidPotentialError(os.str());
  }
  return g;
}

CMat ricci_matrix(const KahlerStructure& ks, const CVec& z) {
  const int m = ks.dim;
  if (!ks.exact()) {
    // nested differences: log det of the FD Hessian, differentiated again
    const ValueField ld = [&](const CVec& w) { return fd_log_det(ks.values, w, 1e-3); };
    return -hermitian_part(fd_complex_hessian(ld, z, 2e-2));
  }
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  const JetPoint p = JetPoint::seed(zz, 4);
  const Jet ld = log(jet_determinant(kahler_jets(ks, p), m));
  CMat ric(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) ric(j, k) = -ld.dd(j, m + k);
  return hermitian_part(ric);
}

double scalar_curvature(const KahlerStructure& ks, const CVec& z) {
  const CMat g = eval_kahler_form(ks, z);
  return lambda1(spd_inverse(g), ricci_matrix(ks, z)).real();
}

CMat fd_complex_hessian(const ValueField& f, const CVec& z, double h) {
  const int m = static_cast<int>(z.size());
  // real coordinates x_j = Re z_j, y_j = Im z_j; d_j dbar_k = (1/4)(d_xj - i d_yj)(d_xk + i d_yk)
  auto real_hessian = [&](double step) {
    RMat hr(2 * m, 2 * m);
    auto shift = [&](int a, double s) {
      CVec w = z;
      if (a < m) w(a) += s; else w(a - m) += cplx(0.0, s);
      return w;
    };
    auto shift2 = [&](int a, double sa, int b, double sb) {
      CVec w = shift(a, sa);
      if (b < m) w(b) += sb; else w(b - m) += cplx(0.0, sb);
      return w;
    };
    const double f0 = f(z);
    for (int a = 0; a < 2 * m; ++a) {
      hr(a, a) = (f(shift(a, step)) - 2.0 * f0 + f(shift(a, -step))) / (step * step);
      for (int b = a + 1; b < 2 * m; ++b) {
        const double v = (f(shift2(a, step, b, step)) - f(shift2(a, step, b, -step)) -
                          f(shift2(a, -step, b, step)) + f(shift2(a, -step, b, -step))) /
                         (4.0 * step * step);
        hr(a, b) = hr(b, a) = v;
      }
    }
    return hr;
  };
  const RMat h1 = real_hessian(h);
  const RMat h2 = real_hessian(0.5 * h);
  const RMat hr = (4.0 * h2 - h1) / 3.0;
  CMat out(m, m);
  const cplx I(0.0, 1.0);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const int xj = j, yj = m + j, xk = k, yk = m + k;
      out(j, k) = 0.25 * (hr(xj, xk) + I * hr(xj, yk) - I * hr(yj, xk) + hr(yj, yk));
    }
  }
  return out;
}

cplx lambda1(const CMat& g_inv, const CMat& a) { return (g_inv * a).trace(); }

cplx lambda2(const CMat& g_inv, const CMat& a, const CMat& b) {
  return lambda1(g_inv, a) * lambda1(g_inv, b) - (g_inv * a * g_inv * b).trace();
}

// --- (p,p)-forms -----------------------------------------------------------

PPForm::PPForm(int m, int p) : m_(m), p_(p), slot_(1u << m, -1) {
  if (m < 0 || p < 0 || p > m || m > 16) throw std::invalid_argument("PPForm: bad bidegree");
  for (unsigned s = 0; s < (1u << m); ++s) {
    if (std::popcount(s) == p) {
      slot_[s] = static_cast<int>(subsets_.size());
      subsets_.push_back(s);
    }
  }
  coef_.assign(subsets_.size() * subsets_.size(), 0.0);
}

PPForm PPForm::from_11(const CMat& a) {
  const int m = static_cast<int>(a.rows());
  PPForm f(m, 1);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) f.at(1u << j, 1u << k) = a(j, k);
  return f;
}

cplx& PPForm::at(unsigned jmask, unsigned kmask) {
  const int a = slot_.at(jmask), b = slot_.at(kmask);
  if (a < 0 || b < 0) throw std::out_of_range("PPForm::at: wrong subset size");
  return coef_[a * subsets_.size() + b];
}

cplx PPForm::at(unsigned jmask, unsigned kmask) const {
  const int a = slot_.at(jmask), b = slot_.at(kmask);
  if (a < 0 || b < 0) throw std::out_of_range("PPForm::at: wrong subset size");
  return coef_[a * subsets_.size() + b];
}

namespace {

// Sign of merging two increasing index sets: (-1)^{#pairs (x in a, y in b) with x > y}.
int merge_sign(unsigned a, unsigned b) {
  int inv = 0;
  for (unsigned y = b; y; y &= y - 1) {
    const unsigned low = (y & -y) - 1;  // indices below the current element of b
    inv += std::popcount(a & ~low & ~(y & -y));
  }
  return (inv % 2) ? -1 : 1;
}

}  // namespace

PPForm PPForm::wedge(const PPForm& o) const {
  if (m_ != o.m_) throw std::invalid_argument("PPForm::wedge: dimension mismatch");
  if (p_ + o.p_ > m_) return PPForm(m_, m_);  // zero; caller should not need it
  PPForm out(m_, p_ + o.p_);
  for (unsigned J : subsets_)
    for (unsigned K : subsets_) {
      const cplx a = at(J, K);
      if (a == 0.0) continue;
      for (unsigned J2 : o.subsets_) {
        if (J & J2) continue;
        for (unsigned K2 : o.subsets_) {
          if (K & K2) continue;
          const cplx b = o.at(J2, K2);
          if (b == 0.0) continue;
          // pair blocks commute; only the relative order of J and K matters
          const int s = merge_sign(J, J2) * merge_sign(K, K2);
          out.at(J | J2, K | K2) += static_cast<double>(s) * a * b;
        }
      }
    }
  return out;
}

PPForm& PPForm::operator+=(const PPForm& o) {
  if (m_ != o.m_ || p_ != o.p_) throw std::invalid_argument("PPForm::+=: bidegree mismatch");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
  return *this;
}

PPForm& PPForm::operator*=(cplx c) {
  for (auto& x : coef_) x *= c;
  return *this;
}

cplx PPForm::top() const {
  if (p_ != m_) throw std::logic_error("PPForm::top: not a top form");
  const unsigned all = (m_ == 0) ? 0u : ((1u << m_) - 1u);
  return at(all, all);
}

ContractionOperator::ContractionOperator(CMat g, int j)
    : g_(std::move(g)), j_(j), m_(static_cast<int>(g_.rows())) {
  if (j < 0 || j > m_) throw std::invalid_argument("ContractionOperator: order exceeds dimension");
}

PPForm ContractionOperator::omega_power(int j) const {
  PPForm w(m_, 0);
  w.at(0u, 0u) = 1.0;
  const PPForm om = PPForm::from_11(g_);
  for (int i = 0; i < j; ++i) w = w.wedge(om);
  return w;
}

cplx ContractionOperator::contract(const PPForm& alpha) const {
  if (alpha.dim() != m_ || alpha.degree() != j_)
    throw std::invalid_argument("contract: form bidegree does not match the operator");
  double falling = 1.0;  // m!/(m-j)!
  for (int i = 0; i < j_; ++i) falling *= (m_ - i);
  const cplx lhs = alpha.wedge(omega_power(m_ - j_)).top() * falling;
  return lhs / omega_power(m_).top();
}

}  // namespace klab
