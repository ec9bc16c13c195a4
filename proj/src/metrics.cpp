#include "klab/metrics.hpp"

#include <sstream>
#include <stdexcept>

namespace klab {

BundleMetricField::BundleMetricField(int m, int r, MatrixJetField h, std::string name)
    : m_(m), r_(r), h_(std::move(h)), name_(std::move(name)) {}

BundleMetricField BundleMetricField::split_fs(int m, const std::vector<int>& a,
                                              std::vector<double> c) {
  const int r = static_cast<int>(a.size());
  if (c.empty()) c.assign(r, 1.0);
  if (static_cast<int>(c.size()) != r) throw std::invalid_argument("split_fs: scale count");
  auto field = [a, c, r](const JetPoint& p) {
    std::vector<Jet> h(static_cast<std::size_t>(r) * r, p.constant(0.0));
    const Jet base = 1.0 + p.norm2();
    for (int i = 0; i < r; ++i) h[i * r + i] = pow(base, -a[i]) * cplx(c[i]);
    return h;
  };
  std::ostringstream os;
  os << "split_fs(";
  for (int i = 0; i < r; ++i) os << (i ? "," : "") << a[i];
  os << ")";
  return BundleMetricField(m, r, field, os.str());
}

BundleMetricField BundleMetricField::constant(int m, const CMat& h0) {
  const int r = static_cast<int>(h0.rows());
  if (hermitian_defect(h0) > 1e-12 || !(min_eigenvalue(h0) > 0.0))
    throw std::invalid_argument("constant metric: H0 must be Hermitian positive definite");
  auto field = [h0, r](const JetPoint& p) {
    std::vector<Jet> h;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) h.push_back(p.constant(h0(i, j)));
    return h;
  };
  return BundleMetricField(m, r, field, "constant");
}

BundleMetricField BundleMetricField::perturbed(const BundleMetricField& base, MatrixJetField dm,
                                               double t) {
  auto f = base.field();
  auto field = [f, dm = std::move(dm), t](const JetPoint& p) {
    std::vector<Jet> h = f(p);
    const std::vector<Jet> d = dm(p);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += d[i] * cplx(t);
    return h;
  };
  return BundleMetricField(base.base_dim(), base.rank(), field, base.name() + "+tM");
}

CMat BundleMetricField::value(const CVec& z) const {
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  const JetPoint p = JetPoint::seed(zz, 0);
  const auto h = h_(p);
  CMat out(r_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < r_; ++j) out(i, j) = h[i * r_ + j].value();
  return out;
}

std::vector<Jet> jet_matrix_inverse(std::vector<Jet> a, int n) {
  std::vector<Jet> inv;
  inv.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.emplace_back(a[0].space(), i == j ? 1.0 : 0.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c].value()) > std::abs(a[piv * n + c].value())) piv = r;
    if (a[piv * n + c].value() == 0.0) throw NumericalGuardError("jet_matrix_inverse: singular");
    if (piv != c)
      for (int k = 0; k < n; ++k) {
        std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(inv[c * n + k], inv[piv * n + k]);
      }
    const Jet d = reciprocal(a[c * n + c]);
    for (int k = 0; k < n; ++k) {
      a[c * n + k] = a[c * n + k] * d;
      inv[c * n + k] = inv[c * n + k] * d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet f = a[r * n + c];
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

namespace {

CMat mat_of(const std::vector<Jet>& a, int r, auto&& get) {
  CMat out(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out(i, j) = get(a[i * r + j]);
  return out;
}

}  // namespace

MetricJet metric_jet(const BundleMetricField& h, const CVec& z) {
  const int m = h.base_dim(), r = h.rank();
  if (z.size() != m) throw std::invalid_argument("metric_jet: dimension mismatch");
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  const JetPoint pt = JetPoint::seed(zz, 2);
  const std::vector<Jet> hj = h.field()(pt);
  MetricJet mj;
  mj.h = hermitian_part(mat_of(hj, r, [](const Jet& x) { return x.value(); }));
  if (!(min_eigenvalue(mj.h) > 0.0)) {
    std::ostringstream os;
    os << "bundle metric '" << h.name() << "' is not positive definite at z = " << z.transpose();
    throw NumericalGuardError(os.str());
  }
  const std::vector<Jet> pj = jet_matrix_inverse(hj, r);
  mj.p = hermitian_part(mat_of(pj, r, [](const Jet& x) { return x.value(); }));
  for (int j = 0; j < m; ++j) {
    mj.dh.push_back(mat_of(hj, r, [j](const Jet& x) { return x.d(j); }));
    mj.dbar_h.push_back(mat_of(hj, r, [j, m](const Jet& x) { return x.d(m + j); }));
    mj.dp.push_back(mat_of(pj, r, [j](const Jet& x) { return x.d(j); }));
    mj.dbar_p.push_back(mat_of(pj, r, [j, m](const Jet& x) { return x.d(m + j); }));
  }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      mj.ddbar_h.push_back(mat_of(hj, r, [j, k, m](const Jet& x) { return x.dd(j, m + k); }));
      mj.ddbar_p.push_back(mat_of(pj, r, [j, k, m](const Jet& x) { return x.dd(j, m + k); }));
    }
  return mj;
}

CurvatureField curvature(const MetricJet& mj, const CMat& g) {
  const int m = static_cast<int>(g.rows());
  const int r = static_cast<int>(mj.h.rows());
  CurvatureField cf;
  const CMat hinv = mj.p;
  // F_{jk} = -dbar_k(H^{-1} d_j H) = -H^{-1} d_j dbar_k H + H^{-1} dbar_k H H^{-1} d_j H
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      cf.f.push_back(-hinv * mj.ddbar_h[j * m + k] + hinv * mj.dbar_h[k] * hinv * mj.dh[j]);
  cf.mean = CMat::Zero(r, r);
  if (m == 0) return cf;
  const CMat ginv = spd_inverse(g);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) cf.mean += ginv(k, j) * cf.f[j * m + k];
  return cf;
}

CurvatureField curvature(const BundleMetricField& h, const KahlerStructure& ks, const CVec& z) {
  const MetricJet mj = metric_jet(h, z);
  const CMat g = (ks.dim == 0) ? CMat(0, 0) : eval_kahler_form(ks, z);
  return curvature(mj, g);
}

double mean_curvature_hermitian_defect(const MetricJet& mj, const CMat& k) {
  return hermitian_defect(mj.h * k);
}

double hermitian_einstein_residual(const BundleMetricField& h, const KahlerStructure& ks,
                                   const ProjectiveRule& rule, Exec exec) {
  const int r = h.rank();
  struct Node {
    CMat k_orth;  // K in an h-orthonormal frame
    double vol = 0.0;
  };
  auto nodes = map_nodes<Node>(
      rule.size(),
      [&](std::size_t i) {
        const CVec z = rule.affine(i);
        const MetricJet mj = metric_jet(h, z);
        const CMat g = eval_kahler_form(ks, z);
        const CMat gfs = eval_kahler_form(fubini_study(ks.dim), z);
        const CurvatureField cf = curvature(mj, g);
        const CMat s = hermitian_sqrt(mj.h);
        Node n;
        n.k_orth = s * cf.mean * s.inverse();
        n.vol = (g.determinant() / gfs.determinant()).real();
        return n;
      },
      exec);
  double trk = 0.0, vol = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    trk += rule.weight(i) * nodes[i].vol * nodes[i].k_orth.trace().real();
    vol += rule.weight(i) * nodes[i].vol;
  }
  const double mu = trk / vol / r;
  double worst = 0.0;
  for (const auto& n : nodes) {
    const CMat d = hermitian_part(n.k_orth) - mu * CMat::Identity(r, r);
    worst = std::max(worst, op_norm_hermitian(d));
  }
  return worst;
}

double hat_metric(const MetricJet& mj, const CVec& lambda) {
  const double q = (lambda.transpose() * mj.p * lambda.conjugate())(0, 0).real();
  if (!(q > 0.0)) throw std::invalid_argument("hat_metric: zero covector");
  return 1.0 / q;
}

double hat_metric(const BundleMetricField& h, const CVec& z, const CVec& lambda) {
  if (lambda.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("hat_metric: zero covector");
  const CMat p = spd_inverse(h.value(z));
  const double q = (lambda.transpose() * p * lambda.conjugate())(0, 0).real();
  return 1.0 / q;
}

// --- Gram-induced FS metrics ---------------------------------------------

InducedFSMetric::InducedFSMetric(const CMat& gram, const SectionBasis& sb) : g_(gram), sb_(sb) {
  if (gram.rows() != static_cast<long>(sb.size()) || gram.cols() != gram.rows())
    throw std::invalid_argument("fs_from_gram: Gram size does not match the section basis");
  const CMat l = guarded_cholesky(hermitian_part(gram), 1e14, "fs_from_gram");
  // G = L L^*, so C = L^{-*} satisfies C^* G C = I and C C^* = G^{-1}
  c_ = l.adjoint().triangularView<Eigen::Upper>().solve(CMat::Identity(gram.rows(), gram.rows()));
  ginv_ = hermitian_part(c_ * c_.adjoint());
}

double InducedFSMetric::density(const CRow& v) const {
  return (v * ginv_ * v.adjoint())(0, 0).real();
}

double InducedFSMetric::density(const CVec& z, const CVec& lambda) const {
  return density(eval_basis(sb_, z, lambda));
}

double InducedFSMetric::norm2(const CVec& coeffs, const CVec& z, const CVec& lambda) const {
  const CRow v = eval_basis(sb_, z, lambda);
  return std::norm((v * coeffs)(0, 0)) / density(v);
}

CMat chart_jacobian(const SectionJet& jet, int chart) {
  const long m = jet.dz.rows(), r = jet.dlambda.rows(), n = jet.value.cols();
  CMat jac(m + r - 1, n);
  for (long j = 0; j < m; ++j) jac.row(j) = jet.dz.row(j);
  long row = m;
  for (long a = 0; a < r; ++a)
    if (a != chart) jac.row(row++) = jet.dlambda.row(a);
  return jac;
}

CMat InducedFSMetric::kahler_matrix(const CVec& z, const CVec& lambda, int chart) const {
  const SectionJet jet = eval_jet(sb_, z, lambda / lambda(chart));
  const CMat jac = chart_jacobian(jet, chart);
  const CRow& v = jet.value;
  const double q = density(v);
  const CMat a = jac * ginv_ * jac.adjoint();          // Q_{u vbar}
  const CVec b = jac * ginv_ * v.adjoint();            // Q_u
  return hermitian_part(a / q - b * b.adjoint() / (q * q));
}

CMat InducedFSMetric::pullback_fs_matrix(const CVec& z, const CVec& lambda, int chart) const {
  const SectionJet jet = eval_jet(sb_, z, lambda / lambda(chart));
  const CMat jac = chart_jacobian(jet, chart) * c_;  // rows d t / d u
  const CRow w = jet.value * c_;
  const double w2 = w.squaredNorm();
  const CVec jw = jac * w.adjoint();
  return hermitian_part(jac * jac.adjoint() / w2 - jw * jw.adjoint() / (w2 * w2));
}

InducedFSMetric fs_from_gram(const CMat& gram, const SectionBasis& sb) {
  return InducedFSMetric(gram, sb);
}

}  // namespace klab
