#include "klab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace klab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double potential_value(const KahlerStructure& ks, const CVec& z) {
  if (!ks.exact()) return ks.values(z);
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  return ks.potential(JetPoint::seed(zz, 0)).value().real();
}

double safe_scalar_curvature(const KahlerStructure& ks, const CVec& z) {
  return ks.dim == 0 ? 0.0 : scalar_curvature(ks, z);
}

CMat kahler_or_empty(const KahlerStructure& ks, const CVec& z) {
  return ks.dim == 0 ? CMat(0, 0) : eval_kahler_form(ks, z);
}

}  // namespace

double c_r_closed_form(int r) {
  if (r < 1) throw std::invalid_argument("C_r: rank must be positive");
  return std::pow(kTwoPi, r - 1) / factorial(r);
}

double c_r_constant(int r) {
  if (r < 1) throw std::invalid_argument("C_r: rank must be positive");
  if (r == 1) return 1.0;
  // polar reduction on C^n, n = r-1, then t = s/(1+s):
  // C_r = (2 pi)^n/(n-1)! int_0^1 t^{n-1} (1-t) dt
  const int n = r - 1;
  const GaussRule g = gauss_legendre01(n / 2 + 2);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i)
    s += g.w[i] * std::pow(g.x[i], n - 1) * (1.0 - g.x[i]);
  return std::pow(kTwoPi, n) / factorial(n - 1) * s;
}

ProjectiveRule BergmanProblem::base_rule(int k) const {
  int deg = base_degree;
  if (deg < 0) {
    int amax = 0;
    for (int a : model.degrees) amax = std::max(amax, a);
    deg = 2 * (amax + k) + 4;
  }
  return ProjectiveRule(model.m, deg);
}

ProjectiveRule BergmanProblem::fiber_rule() const {
  const int deg = fiber_degree < 0 ? 2 * model.m + 4 : fiber_degree;
  return ProjectiveRule(model.rank() - 1, deg);
}

BergmanProblem standard_problem(const ModelSpace& ms) {
  ms.validate();
  BergmanProblem bp;
  bp.model = ms;
  bp.h = BundleMetricField::split_fs(ms.m, ms.degrees);
  bp.omega = fubini_study(ms.m);
  return bp;
}

CMat horizontal_form(const MetricJet& mj, const CVec& lambda) {
  const long m = static_cast<long>(mj.dp.size());
  const cplx q = (lambda.transpose() * mj.p * lambda.conjugate())(0, 0);
  CMat theta(m, m);
  for (long j = 0; j < m; ++j)
    for (long k = 0; k < m; ++k) {
      const CMat c = mj.ddbar_p[j * m + k] - mj.dp[j] * mj.h * mj.dbar_p[k];
      theta(j, k) = (lambda.transpose() * c * lambda.conjugate())(0, 0) / q;
    }
  return theta;
}

std::vector<double> volume_weights(const CMat& theta, const CMat& w) {
  const long m = w.rows();
  std::vector<double> f(m + 1, 0.0);
  f[0] = 1.0;
  if (m == 0) return f;
  const CMat l = guarded_cholesky(w, 1e14, "volume_weights");
  const CMat li = l.triangularView<Eigen::Lower>().solve(CMat::Identity(m, m));
  const RVec e = hermitian_eigenvalues(li * hermitian_part(theta) * li.adjoint());
  // prod_i (k + e_i), coefficients in increasing powers of k
  std::vector<double> poly{1.0};
  for (long i = 0; i < m; ++i) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t p = 0; p < poly.size(); ++p) {
      next[p] += e(i) * poly[p];
      next[p + 1] += poly[p];
    }
    poly = std::move(next);
  }
  return poly;
}

CVec fiber_covector(const CMat& a_inv_t, const CVec& mu) { return a_inv_t * mu; }

namespace {

CMat fiber_frame(const MetricJet& mj) {
  const long r = mj.p.rows();
  const CMat a = guarded_cholesky(mj.p, 1e14, "fiber frame");
  return a.triangularView<Eigen::Lower>().solve(CMat::Identity(r, r)).transpose();
}

}  // namespace

FiberEndomorphisms fiber_push_forward(const MetricJet& mj, const CMat& w,
                                      const ProjectiveRule& fiber) {
  const long r = mj.p.rows();
  const int m = static_cast<int>(w.rows());
  if (fiber.dim() != r - 1) throw std::invalid_argument("fiber_push_forward: fibre rule dimension");
  const CMat ait = fiber_frame(mj);
  FiberEndomorphisms fe;
  fe.g.assign(m + 1, CMat::Zero(r, r));
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    const CVec lam = ait * fiber.node(i);
    const double q = (lam.transpose() * mj.p * lam.conjugate())(0, 0).real();
    if (!(q > 0.0) || !std::isfinite(q))
      throw NumericalGuardError("fiber_push_forward: degenerate fibre node");
    const std::vector<double> f = volume_weights(horizontal_form(mj, lam), w);
    const CMat outer = lam.conjugate() * lam.transpose() / q;
    for (int j = 0; j <= m; ++j) fe.g[j] += fiber.weight(i) * f[j] * outer;
  }
  const double cr = c_r_constant(static_cast<int>(r));
  for (auto& g : fe.g) {
    g = hermitian_part(g / cr);
    fe.psi.push_back(mj.p * g);
  }
  return fe;
}

CMat fiber_push_forward(const MetricJet& mj, const ProjectiveRule& fiber,
                        const std::function<double(const CVec& lambda)>& weight_vs_hat) {
  const long r = mj.p.rows();
  const CMat ait = fiber_frame(mj);
  CMat g = CMat::Zero(r, r);
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    const CVec lam = ait * fiber.node(i);
    const double q = (lam.transpose() * mj.p * lam.conjugate())(0, 0).real();
    g += fiber.weight(i) * weight_vs_hat(lam) * (lam.conjugate() * lam.transpose()) / q;
  }
  return hermitian_part(g / c_r_constant(static_cast<int>(r)));
}

std::vector<BaseNode> prepare_base(const BergmanProblem& bp, const SectionBasis& sb,
                                   const ProjectiveRule& base, const ProjectiveRule& fiber) {
  const int m = bp.model.m;
  const KahlerStructure fs = fubini_study(m);
  return map_nodes<BaseNode>(
      base.size(),
      [&](std::size_t i) {
        BaseNode n;
        n.z = base.affine(i);
        n.w = kahler_or_empty(bp.omega, n.z);
        const CMat wfs = kahler_or_empty(fs, n.z);
        n.weight = base.weight(i) * (n.w.determinant() / wfs.determinant()).real();
        n.phi = potential_value(bp.omega, n.z);
        n.mj = metric_jet(bp.h, n.z);
        n.sections = sb.section_matrix(n.z);
        n.fe = fiber_push_forward(n.mj, n.w, fiber);
        return n;
      },
      bp.exec);
}

// --- B~_k --------------------------------------------------------------------

namespace {

CMat h_of_k(const FiberEndomorphisms& fe, int k, int m) {
  CMat hk = CMat::Zero(fe.g[0].rows(), fe.g[0].cols());
  for (int j = 0; j <= m; ++j) hk += std::pow(static_cast<double>(k), j - m) * fe.g[j];
  return hk;
}

CMat guarded_inverse(const CMat& gram, const std::string& what, double* cond) {
  *cond = condition_number(gram);
  guarded_cholesky(gram, 1e12, what);
  return spd_inverse(gram);
}

}  // namespace

BergmanEndomorphism::BergmanEndomorphism(const BergmanProblem& bp, int k)
    : bp_(bp), k_(k), sb_(bp.model.with_twist(k)) {
  bp_.model = bp.model.with_twist(k);
  const int m = bp_.model.m;
  if (m > 0 && k < 1) throw std::invalid_argument("bergman_endomorphism: k must be positive");
  nodes_ = prepare_base(bp_, sb_, bp_.base_rule(k), bp_.fiber_rule());
  const long n = static_cast<long>(sb_.size());
  gram_ = reduce_nodes(
      nodes_.size(), CMat::Zero(n, n).eval(),
      [&](std::size_t i, CMat& acc) {
        const BaseNode& b = nodes_[i];
        const CMat hk = h_of_k(b.fe, k, m);
        acc.noalias() += (b.weight * std::exp(-k * b.phi)) * (b.sections.adjoint() * hk * b.sections);
      },
      bp_.exec);
  gram_ = hermitian_part(gram_);
  std::ostringstream what;
  what << "L2 Gram for B~_k (k=" << k << "); raise the base quadrature degree or lower k";
  gram_inv_ = guarded_inverse(gram_, what.str(), &cond_);
}

CMat BergmanEndomorphism::at(const CVec& z) const {
  const CMat s = sb_.section_matrix(z);
  const CMat h = bp_.h.value(z);
  const double phi = potential_value(bp_.omega, z);
  return s * gram_inv_ * s.adjoint() * h * std::exp(-k_ * phi);
}

CMat BergmanEndomorphism::at_node(std::size_t i) const {
  const BaseNode& b = nodes_[i];
  return b.sections * gram_inv_ * b.sections.adjoint() * b.mj.h * std::exp(-k_ * b.phi);
}

double BergmanEndomorphism::trace_integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += nodes_[i].weight * at_node(i).trace().real();
  return s;
}

// --- rho ---------------------------------------------------------------------

RhoDirect::RhoDirect(const BergmanProblem& bp, int k)
    : bp_(bp), k_(k), sb_(bp.model.with_twist(k)) {
  bp_.model = bp.model.with_twist(k);
  const int m = bp_.model.m;
  if (m > 0 && k < 1) throw std::invalid_argument("rho_direct: k must be positive");
  const ProjectiveRule base = bp_.base_rule(k), fiber = bp_.fiber_rule();
  const auto nodes = prepare_base(bp_, sb_, base, fiber);
  const std::size_t nf = fiber.size();
  const double kscale = m > 0 ? std::pow(static_cast<double>(k), -m) : 1.0;

  struct Local {
    CRow v;
    double weight;
  };
  auto local = [&](std::size_t idx) {
    const BaseNode& b = nodes[idx / nf];
    const std::size_t f = idx % nf;
    const CVec lam = fiber_frame(b.mj) * fiber.node(f);
    const std::vector<double> fw = volume_weights(horizontal_form(b.mj, lam), b.w);
    double p = 0.0;
    for (int j = 0; j <= m; ++j) p += fw[j] * std::pow(static_cast<double>(k), j);
    const double q = (lam.transpose() * b.mj.p * lam.conjugate())(0, 0).real();
    Local l;
    l.v = lam.transpose() * b.sections * std::exp(-0.5 * k * b.phi) / std::sqrt(q);
    l.weight = b.weight * fiber.weight(f) * kscale * p;
    return l;
  };
  const std::size_t total = nodes.size() * nf;
  const auto locals = map_nodes<Local>(total, local, bp_.exec);
  const long n = static_cast<long>(sb_.size());
  gram_ = hermitian_part(l2_gram(
      total, n, [&](std::size_t i) { return CMat(locals[i].v); },
      [&](std::size_t i) { return locals[i].weight; }, bp_.exec));
  double cond = 0.0;
  std::ostringstream what;
  what << "L2 Gram on PE* (k=" << k << ")";
  gram_inv_ = guarded_inverse(gram_, what.str(), &cond);
  volume_ = 0.0;
  integral_ = 0.0;
  for (const auto& l : locals) {
    volume_ += l.weight;
    integral_ += l.weight * (l.v * gram_inv_ * l.v.adjoint())(0, 0).real();
  }
}

double RhoDirect::operator()(const CVec& z, const CVec& lambda) const {
  const CMat s = sb_.section_matrix(z);
  const CMat p = spd_inverse(bp_.h.value(z));
  const double q = (lambda.transpose() * p * lambda.conjugate())(0, 0).real();
  if (!(q > 0.0)) throw std::invalid_argument("rho_direct: zero covector");
  const CRow e = lambda.transpose() * s;
  const double phi = potential_value(bp_.omega, z);
  return (e * gram_inv_ * e.adjoint())(0, 0).real() * std::exp(-k_ * phi) / q;
}

double RhoDirect::integral() const { return integral_; }

CMat lambda_endomorphism(const CVec& v, const CMat& h) {
  const double n = (v.adjoint() * h * v)(0, 0).real();
  if (!(n > 0.0)) throw std::invalid_argument("lambda(v,h): zero vector");
  return v * (v.adjoint() * h) / n;
}

double rho_via_trace(const BergmanEndomorphism& b, const CVec& z, const CVec& lambda) {
  if (lambda.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("rho_via_trace: zero covector");
  const CMat h = b.problem().h.value(z);
  const CVec v = spd_inverse(h) * lambda.conjugate();
  const double cr = c_r_constant(static_cast<int>(h.rows()));
  return (lambda_endomorphism(v, h) * b.at(z)).trace().real() / cr;
}

// --- A_1 ---------------------------------------------------------------------

CMat a1_formula(const BundleMetricField& h, const KahlerStructure& ks, const CVec& z) {
  const int r = h.rank();
  const CMat k = ks.dim == 0 ? CMat::Zero(r, r).eval() : curvature(h, ks, z).mean;
  const double s = safe_scalar_curvature(ks, z);
  const CMat id = CMat::Identity(r, r);
  return k - (k.trace() / static_cast<double>(r)) * id + ((r + 1.0) / (2.0 * r)) * s * id;
}

CMat psi_m_minus_1_formula(const CMat& mean_curvature) {
  const long r = mean_curvature.rows();
  return (mean_curvature.trace() * CMat::Identity(r, r) + mean_curvature) / static_cast<double>(r + 1);
}

CMat a1_alternative(const BundleMetricField& h, const KahlerStructure& ks, const CVec& z,
                    const ProjectiveRule& fiber) {
  const int r = h.rank();
  if (ks.dim == 0) return CMat::Zero(r, r);
  const MetricJet mj = metric_jet(h, z);
  const CMat w = eval_kahler_form(ks, z);
  const CMat k = curvature(mj, w).mean;
  const double s = scalar_curvature(ks, z);
  const FiberEndomorphisms fe = fiber_push_forward(mj, w, fiber);
  return k + 0.5 * s * CMat::Identity(r, r) - fe.psi[ks.dim - 1];
}

// --- expansion ---------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: non-positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExpansionFit expansion_fit(const BergmanProblem& bp, const std::vector<int>& k_grid,
                           const std::vector<CVec>& points) {
  if (k_grid.size() < 3) throw std::invalid_argument("expansion_fit: need at least three k values");
  if (points.empty()) throw std::invalid_argument("expansion_fit: no sample points");
  const int m = bp.model.m;
  const long r = bp.model.rank();
  const double scale = std::pow(kTwoPi, m);
  ExpansionFit fit;
  fit.ks = k_grid;
  fit.points = points;
  for (int k : k_grid) {
    const BergmanEndomorphism b(bp, k);
    std::vector<CMat> row;
    for (const auto& z : points) row.push_back(scale * b.at(z));
    fit.b.push_back(std::move(row));
  }
  // B - k^m I = A k^{m-1} + C k^{m-2}, least squares entrywise
  const std::size_t nk = k_grid.size();
  RMat design(static_cast<long>(nk), 2);
  for (std::size_t i = 0; i < nk; ++i) {
    const double k = k_grid[i];
    design(static_cast<long>(i), 0) = std::pow(k, m - 1);
    design(static_cast<long>(i), 1) = std::pow(k, m - 2);
  }
  const auto qr = design.colPivHouseholderQr();
  fit.residual.assign(nk, 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    CMat a(r, r);
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < r; ++j) {
        RVec yr(static_cast<long>(nk)), yi(static_cast<long>(nk));
        for (std::size_t q = 0; q < nk; ++q) {
          const cplx v = fit.b[q][p](i, j) - (i == j ? std::pow(static_cast<double>(k_grid[q]), m) : 0.0);
          yr(static_cast<long>(q)) = v.real();
          yi(static_cast<long>(q)) = v.imag();
        }
        a(i, j) = cplx(qr.solve(yr)(0), qr.solve(yi)(0));
      }
    fit.a.push_back(a);
    for (std::size_t q = 0; q < nk; ++q) {
      const double k = k_grid[q];
      const CMat res = fit.b[q][p] - std::pow(k, m) * CMat::Identity(r, r) - std::pow(k, m - 1) * a;
      fit.residual[q] = std::max(fit.residual[q], res.cwiseAbs().maxCoeff());
    }
  }
  double biggest = 0.0;
  for (std::size_t q = 0; q < nk; ++q)
    biggest = std::max(biggest, fit.residual[q] / std::pow(static_cast<double>(k_grid[q]), m));
  fit.exact = biggest < 1e-9;
  if (fit.exact) {
    fit.residual_slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    std::vector<double> x(k_grid.begin(), k_grid.end());
    fit.residual_slope = loglog_slope(x, fit.residual);
  }
  return fit;
}

// --- A_{1,1} -----------------------------------------------------------------

double lichnerowicz_apply(const KahlerStructure& ks, const JetField& eta, const CVec& z, double h) {
  auto central = [&](double t) {
    return (scalar_curvature(perturbed(ks, eta, t), z) - scalar_curvature(perturbed(ks, eta, -t), z)) /
           (2.0 * t);
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

namespace {

std::vector<Jet> jet_matmul(const std::vector<Jet>& a, const std::vector<Jet>& b, int r) {
  std::vector<Jet> c;
  c.reserve(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Jet s = a[i * r] * b[j];
      for (int l = 1; l < r; ++l) s += a[i * r + l] * b[l * r + j];
      c.push_back(std::move(s));
    }
  return c;
}

std::vector<Jet> jet_map(const std::vector<Jet>& a, const std::function<Jet(const Jet&)>& f) {
  std::vector<Jet> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(f(x));
  return out;
}

JetPoint seed_at(const CVec& z, int order) {
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  return JetPoint::seed(zz, order);
}

}  // namespace

void check_a11_preconditions(const BundleMetricField& h, const KahlerStructure& ks, const A11Input& in,
                             const ProjectiveRule& base) {
  std::vector<std::string> failed;
  const double he = hermitian_einstein_residual(h, ks, base, Exec::serial);
  if (!(he < 1e-6)) failed.push_back("h is not Hermitian-Einstein (residual " + std::to_string(he) + ")");

  const KahlerStructure fs = fubini_study(ks.dim);
  const int r = h.rank();
  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  double vol = 0.0, tr_phi = 0.0, eta_mean = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const CVec z = base.affine(i);
    const double w = base.weight(i) *
                     (eval_kahler_form(ks, z).determinant() / eval_kahler_form(fs, z).determinant()).real();
    const double s = scalar_curvature(ks, z);
    smin = std::min(smin, s);
    smax = std::max(smax, s);
    const JetPoint p = seed_at(z, 0);
    const std::vector<Jet> mj = in.m(p);
    CMat mm(r, r);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) mm(a, b) = mj[a * r + b].value();
    tr_phi += w * (spd_inverse(h.value(z)) * mm).trace().real();
    eta_mean += w * in.eta(p).value().real();
    vol += w;
  }
  // round-off in S grows towards the hyperplane at infinity
  if (smax - smin > 1e-6 * std::max(1.0, std::abs(smax))) failed.push_back("omega is not constant scalar curvature");
  if (std::abs(tr_phi) > 1e-8 * vol) failed.push_back("int tr(Phi) is not zero");
  if (std::abs(eta_mean) > 1e-8 * vol) failed.push_back("int eta is not zero");
  if (!failed.empty()) {
    std::string msg = "A_{1,1} preconditions failed:";
    for (const auto& f : failed) msg += " " + f + ";";
    throw PreconditionError(msg);
  }
}

CMat a11_apply(const BundleMetricField& h, const KahlerStructure& ks, const A11Input& in, const CVec& z) {
  const int m = ks.dim, r = h.rank();
  const JetPoint p = seed_at(z, 2);
  const std::vector<Jet> hj = h.field()(p);
  const std::vector<Jet> mj = in.m(p);
  const std::vector<Jet> hinv = jet_matrix_inverse(hj, r);
  auto trunc1 = [](const Jet& x) { return truncate(x, 1); };
  const std::vector<Jet> hinv1 = jet_map(hinv, trunc1), m1 = jet_map(mj, trunc1);

  // T = Lambda(i dbar(-X)) with X_j = H^{-1} d_j M - H^{-1} M H^{-1} d_j H, the
  // variation of H^{-1} d_j H
  const CMat w = eval_kahler_form(ks, z);
  const CMat ginv = spd_inverse(w);
  CMat t = CMat::Zero(r, r);
  for (int j = 0; j < m; ++j) {
    auto dj = [j](const Jet& x) { return differentiate(x, j); };
    const std::vector<Jet> x1 = jet_matmul(hinv1, jet_map(mj, dj), r);
    const std::vector<Jet> x2 = jet_matmul(jet_matmul(jet_matmul(hinv1, m1, r), hinv1, r), jet_map(hj, dj), r);
    for (int k = 0; k < m; ++k) {
      CMat df(r, r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) df(a, b) = -(x1[a * r + b] - x2[a * r + b]).d(m + k);
      t += ginv(k, j) * df;
    }
  }

  // variation of Lambda under omega -> omega - t i ddbar eta: Lambda^2(iF ^ beta), beta = -eta''
  const std::vector<cplx> eh = complex_hessian(in.eta(p), m);
  CMat beta(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) beta(j, k) = -eh[j * m + k];
  const CurvatureField cf = curvature(metric_jet(h, z), w);
  const cplx lam_beta = lambda1(ginv, beta);
  CMat l2 = cf.mean * lam_beta;
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) {
      cplx c = 0.0;
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) c += ginv(k, j) * ginv(l, i) * beta(i, k);
      l2 -= c * cf.f[j * m + l];
    }
  t += l2;

  const double lich = lichnerowicz_apply(ks, in.eta, z);
  const CMat id = CMat::Identity(r, r);
  return ((r + 1.0) / (2.0 * r)) * lich * id + t - (t.trace() / static_cast<double>(r)) * id;
}

CMat a1_directional_fd(const BundleMetricField& h, const KahlerStructure& ks, const A11Input& in,
                       const CVec& z, double t) {
  const CMat a0 = a1_formula(h, ks, z);
  auto forward = [&](double s) {
    return CMat((a1_formula(BundleMetricField::perturbed(h, in.m, s), perturbed(ks, in.eta, s), z) - a0) / s);
  };
  return 2.0 * forward(0.5 * t) - forward(t);
}

}  // namespace klab
