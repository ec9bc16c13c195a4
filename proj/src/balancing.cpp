#include "klab/balancing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace klab {

namespace {

int default_base_degree(const ModelSpace& ms) {
  int amax = 0;
  for (int a : ms.degrees) amax = std::max(amax, a);
  return 2 * (amax + ms.k) + 6;
}

// det of the FS form on C^m at z: (1 + |z|^2)^{-(m+1)}
double fs_density(const CVec& z) {
  return std::pow(1.0 + z.squaredNorm(), -static_cast<double>(z.size() + 1));
}

// Vertical block of i ddbar log(lambda^T P conj(lambda)) in the chart lambda_c = 1.
CMat vertical_block(const CMat& p, const CVec& lambda, int chart) {
  const long r = p.rows();
  const double q = (lambda.transpose() * p * lambda.conjugate())(0, 0).real();
  const CVec pl = p * lambda.conjugate();
  const CMat full = p / q - pl * pl.adjoint() / (q * q);
  CMat out(r - 1, r - 1);
  for (long a = 0, i = 0; a < r; ++a) {
    if (a == chart) continue;
    for (long b = 0, j = 0; b < r; ++b) {
      if (b == chart) continue;
      out(i, j++) = full(a, b);
    }
    ++i;
  }
  return out;
}

struct Accum {
  CMat k;
  double v = 0.0;
  Accum& operator+=(const Accum& o) {
    k += o.k;
    v += o.v;
    return *this;
  }
};

// omega_G^n/n! against the product measure at a node, for t = s T.
double node_volume(const YNode& nd, const CRow& wt, const CMat& jt) {
  const double q = wt.squaredNorm();
  const CVec b = jt * wt.adjoint();
  const CMat om = jt * jt.adjoint() / q - b * b.adjoint() / (q * q);
  const double det = om.rows() == 0 ? 1.0 : hermitian_part(om).determinant().real();
  return nd.ref_weight * det;
}

CMat det_normalized(const CMat& g) {
  const CMat h = hermitian_part(g);
  Eigen::LLT<CMat> llt(h);
  if (llt.info() != Eigen::Success) throw NumericalGuardError("Gram update lost positivity");
  double logdet = 0.0;
  for (long i = 0; i < h.rows(); ++i) logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
  return h * std::exp(-logdet / static_cast<double>(h.rows()));
}

}  // namespace

EmbeddingGeometry::EmbeddingGeometry(const BalancingSetup& setup)
    : setup_(setup), sb_(setup.model) {
  const ModelSpace& ms = setup_.model;
  const int m = ms.m, r = ms.rank();
  const ProjectiveRule base(m, setup_.base_degree < 0 ? default_base_degree(ms) : setup_.base_degree);
  const ProjectiveRule fiber(r - 1, setup_.fiber_degree < 0 ? 8 : setup_.fiber_degree);
  const BundleMetricField href = BundleMetricField::split_fs(m, ms.degrees);
  const std::size_t nf = fiber.size();
  nodes_ = map_nodes<YNode>(
      base.size() * nf,
      [&](std::size_t idx) {
        const std::size_t i = idx / nf, f = idx % nf;
        YNode nd;
        nd.z = base.affine(i);
        const CMat p = spd_inverse(href.value(nd.z));
        const CMat a = guarded_cholesky(p, 1e14, "reference fibre frame");
        const CMat ait = a.triangularView<Eigen::Lower>().solve(CMat::Identity(r, r)).transpose();
        const CVec lam = ait * fiber.node(f);
        lam.cwiseAbs().maxCoeff(&nd.chart);
        nd.lambda = lam / lam(nd.chart);
        const SectionJet jet = eval_jet(sb_, nd.z, nd.lambda);
        nd.v = jet.value;
        nd.jac = chart_jacobian(jet, nd.chart);
        const CMat vb = vertical_block(p, nd.lambda, nd.chart);
        const double vdet = vb.rows() == 0 ? 1.0 : vb.determinant().real();
        nd.ref_weight = base.weight(i) * fiber.weight(f) / (fs_density(nd.z) * vdet);
        return nd;
      },
      setup_.exec);
}

EmbeddingState::EmbeddingState(std::shared_ptr<const EmbeddingGeometry> geo, const CMat& gram)
    : geo_(std::move(geo)), gram_(hermitian_part(gram)) {
  const long n = geo_->dimension();
  if (gram_.rows() != n || gram_.cols() != n) throw std::invalid_argument("EmbeddingState: Gram size");
  const CMat l = guarded_cholesky(gram_, 1e12, "EmbeddingState Gram");
  t_ = l.adjoint().triangularView<Eigen::Upper>().solve(CMat::Identity(n, n));
}

EmbeddingState initial_state(const BalancingSetup& setup) {
  auto geo = std::make_shared<const EmbeddingGeometry>(setup);
  const long n = geo->dimension();
  return EmbeddingState(geo, CMat::Identity(n, n));
}

StateIntegrals state_integrals(const EmbeddingState& es) {
  return state_integrals(es, es.geometry().setup().exec);
}

StateIntegrals state_integrals(const EmbeddingState& es, Exec exec) {
  const auto& nodes = es.geometry().nodes();
  const long n = es.geometry().dimension();
  const CMat& t = es.transform();
  Accum zero{CMat::Zero(n, n), 0.0};
  const Accum acc = reduce_nodes(
      nodes.size(), zero,
      [&](std::size_t i, Accum& a) {
        const YNode& nd = nodes[i];
        const CRow wt = nd.v * t;
        const CMat jt = nd.jac * t;
        const double dv = node_volume(nd, wt, jt);
        if (!std::isfinite(dv)) {
          std::ostringstream os;
          os << "state_integrals: non-finite volume density at z = " << nd.z.transpose();
          throw NumericalGuardError(os.str());
        }
        a.k.noalias() += (dv / wt.squaredNorm()) * (wt.adjoint() * wt);
        a.v += dv;
      },
      exec);
  return {hermitian_part(acc.k), acc.v};
}

MomentValue moment_value(const CMat& m, double d, double volume) {
  MomentValue mv;
  mv.m = hermitian_part(m);
  mv.d = d;
  mv.volume = volume;
  mv.op_norm = op_norm_hermitian(mv.m);
  mv.frobenius = mv.m.norm();
  return mv;
}

MomentValue moment_map(const EmbeddingState& es) {
  const StateIntegrals si = state_integrals(es);
  const long n = es.geometry().dimension();
  const double d = si.volume / static_cast<double>(n);
  return moment_value(si.k_t - d * CMat::Identity(n, n), d, si.volume);
}

namespace {

// T^{-*} X T^{-1}, i.e. a Hermitian form given in the t basis moved back to s.
CMat from_orthonormal(const EmbeddingState& es, const CMat& x) {
  const long n = x.rows();
  const CMat tinv = es.transform().triangularView<Eigen::Upper>().solve(CMat::Identity(n, n));
  return tinv.adjoint() * x * tinv;
}

}  // namespace

EmbeddingState t_map_step(const EmbeddingState& es) {
  const StateIntegrals si = state_integrals(es);
  const double n = static_cast<double>(es.geometry().dimension());
  return EmbeddingState(es.geometry_ptr(), det_normalized(from_orthonormal(es, (n / si.volume) * si.k_t)));
}

BalanceReport balance_iterate(const EmbeddingState& start, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("balance_iterate: tol must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  BalanceReport rep;
  EmbeddingState es(start.geometry_ptr(), det_normalized(start.gram()));
  MomentValue mv = moment_map(es);
  rep.op_norm.push_back(mv.op_norm);
  rep.frobenius.push_back(mv.frobenius);
  int rising = 0;
  while (mv.op_norm >= tol && rep.iterations < max_iter) {
    es = t_map_step(es);
    ++rep.iterations;
    const double prev = mv.op_norm;
    mv = moment_map(es);
    rep.op_norm.push_back(mv.op_norm);
    rep.frobenius.push_back(mv.frobenius);
    if (!std::isfinite(mv.op_norm)) throw NumericalGuardError("balance_iterate: non-finite moment map");
    rising = mv.op_norm > prev ? rising + 1 : 0;
    if (rising >= 10) {
      rep.diverged = true;
      break;
    }
  }
  rep.final_gram = es.gram();
  rep.converged = mv.op_norm < tol;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

EmbeddingState gradient_flow_step(const EmbeddingState& es, double step, double* used_step) {
  if (!(step > 0.0)) throw std::invalid_argument("gradient_flow_step: step must be positive");
  const MomentValue mv = moment_map(es);
  const double n = static_cast<double>(es.geometry().dimension());
  const double f0 = mv.frobenius * mv.frobenius;
  for (double s = step; s >= 1e-14; s *= 0.5) {
    const CMat g = det_normalized(from_orthonormal(es, hermitian_exp(s * (n / mv.volume) * mv.m)));
    EmbeddingState next(es.geometry_ptr(), g);
    const double f1 = std::pow(moment_map(next).frobenius, 2);
    if (f1 <= f0) {
      if (used_step) *used_step = s;
      return next;
    }
  }
  throw NumericalGuardError("gradient_flow_step: step underflow in line search");
}

FlowReport gradient_flow(const EmbeddingState& start, double step, double tol, int max_iter) {
  FlowReport rep;
  EmbeddingState es(start.geometry_ptr(), det_normalized(start.gram()));
  MomentValue mv = moment_map(es);
  rep.op_norm.push_back(mv.op_norm);
  rep.frobenius.push_back(mv.frobenius);
  while (mv.op_norm >= tol && rep.iterations < max_iter) {
    es = gradient_flow_step(es, step);
    ++rep.iterations;
    mv = moment_map(es);
    rep.op_norm.push_back(mv.op_norm);
    rep.frobenius.push_back(mv.frobenius);
  }
  rep.final_gram = es.gram();
  rep.converged = mv.op_norm < tol;
  return rep;
}

std::vector<double> fs_bergman_density(const EmbeddingState& es) {
  const StateIntegrals si = state_integrals(es);
  const CMat kinv = spd_inverse(si.k_t);
  const auto& nodes = es.geometry().nodes();
  return map_nodes<double>(
      nodes.size(),
      [&](std::size_t i) {
        const CRow wt = nodes[i].v * es.transform();
        return (wt * kinv * wt.adjoint())(0, 0).real() / wt.squaredNorm();
      },
      es.geometry().setup().exec);
}

double relative_variance(const std::vector<double>& rho) {
  if (rho.empty()) return 0.0;
  double mean = 0.0;
  for (double x : rho) mean += x;
  mean /= static_cast<double>(rho.size());
  double var = 0.0;
  for (double x : rho) var += (x - mean) * (x - mean);
  var /= static_cast<double>(rho.size());
  return var / (mean * mean);
}

// --- Q_z -----------------------------------------------------------------------

std::vector<CMat> su_basis(int n) {
  std::vector<CMat> out;
  for (int l = 1; l < n; ++l) {
    CMat d = CMat::Zero(n, n);
    for (int i = 0; i < l; ++i) d(i, i) = 1.0;
    d(l, l) = -static_cast<double>(l);
    out.push_back(d / std::sqrt(static_cast<double>(l) * (l + 1)));
  }
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i1(0.0, 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      CMat x = CMat::Zero(n, n), y = CMat::Zero(n, n);
      x(a, b) = s;
      x(b, a) = s;
      y(a, b) = -i1 * s;
      y(b, a) = i1 * s;
      out.push_back(x);
      out.push_back(y);
    }
  return out;
}

QzResult sigma_z_operator(const EmbeddingState& es) {
  return sigma_z_operator(es, su_basis(static_cast<int>(es.geometry().dimension())));
}

QzResult sigma_z_operator(const EmbeddingState& es, const std::vector<CMat>& basis) {
  const auto& nodes = es.geometry().nodes();
  const long n = es.geometry().dimension();
  const long dsu = static_cast<long>(basis.size());
  const CMat& t = es.transform();
  struct Acc {
    RMat q;
    long skipped = 0;
    Acc& operator+=(const Acc& o) {
      q += o.q;
      skipped += o.skipped;
      return *this;
    }
  };
  const Acc acc = reduce_nodes(
      nodes.size(), Acc{RMat::Zero(dsu, dsu), 0},
      [&](std::size_t i, Acc& a) {
        const YNode& nd = nodes[i];
        const CRow wt = nd.v * t;
        const CMat jt = nd.jac * t;
        const double dv = node_volume(nd, wt, jt);
        const CVec w = wt.transpose();
        const double w2 = w.squaredNorm();
        auto perp = [&](const CMat& x) -> CMat { return x - w * (w.adjoint() * x) / w2; };
        const CMat tang = perp(jt.transpose());  // N x n
        Eigen::ColPivHouseholderQR<CMat> qr(tang);
        qr.setThreshold(1e-10);
        if (qr.rank() < tang.cols()) {
          ++a.skipped;
          return;
        }
        const CMat qm = qr.householderQ() * CMat::Identity(n, tang.cols());
        CMat y(n, dsu);
        for (long b = 0; b < dsu; ++b) y.col(b) = perp(basis[b] * w);
        y -= qm * (qm.adjoint() * y);
        a.q.noalias() += (dv / w2) * (y.adjoint() * y).real();
      },
      es.geometry().setup().exec);
  QzResult res;
  res.q = 0.5 * (acc.q + acc.q.transpose());
  res.skipped_nodes = acc.skipped;
  Eigen::SelfAdjointEigenSolver<RMat> eig(res.q);
  res.eigenvalues = eig.eigenvalues();
  const double top = res.eigenvalues.size() ? res.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  if (top <= 1e-14) {
    res.kernel_dim = res.eigenvalues.size();
    res.min_positive = 0.0;
    return res;
  }
  const double thresh = 1e-9 * top;
  res.min_positive = 0.0;
  for (long i = 0; i < res.eigenvalues.size(); ++i) {
    if (res.eigenvalues(i) <= thresh) {
      ++res.kernel_dim;
    } else if (res.min_positive == 0.0) {
      res.min_positive = res.eigenvalues(i);
    }
  }
  return res;
}

LambdaScaling lambda_z_scaling(const BalancingSetup& setup, const std::vector<int>& k_grid, double tol,
                               int max_iter) {
  if (k_grid.size() < 2) throw std::invalid_argument("lambda_z_scaling: k grid needs at least two values");
  LambdaScaling out;
  std::vector<double> ks, lams;
  for (int k : k_grid) {
    BalancingSetup s = setup;
    s.model = setup.model.with_twist(k);
    const EmbeddingState start = initial_state(s);
    const BalanceReport rep = balance_iterate(start, tol, max_iter);
    const EmbeddingState bal(start.geometry_ptr(), rep.final_gram);
    const MomentValue mv = moment_map(bal);
    const QzResult qz = sigma_z_operator(bal);
    EigEstimate e;
    e.k = k;
    e.su_dim = qz.q.rows();
    e.sample_size = bal.geometry().nodes().size() - static_cast<std::size_t>(qz.skipped_nodes);
    e.lambda_inv = qz.min_positive;
    e.lambda = qz.min_positive > 0.0 ? 1.0 / qz.min_positive : std::numeric_limits<double>::infinity();
    e.kernel_dim = qz.kernel_dim;
    e.moment_norm = mv.op_norm;
    e.balanced = mv.op_norm <= 0.1 * mv.d;
    if (std::isfinite(e.lambda)) {
      ks.push_back(k);
      lams.push_back(e.lambda);
    }
    out.table.push_back(e);
  }
  out.fitted_points = static_cast<long>(ks.size());
  out.exponent = ks.size() >= 2 ? loglog_slope(ks, lams) : std::numeric_limits<double>::quiet_NaN();
  out.monotone = true;
  for (std::size_t i = 1; i < lams.size(); ++i)
    if (lams[i] < lams[i - 1]) out.monotone = false;
  return out;
}

// --- R-bounded geometry ---------------------------------------------------------

RBoundedResult r_bounded_check(const FormField& cand, const FormField& ref, const std::vector<CVec>& points,
                               double r_bound, int a, double h) {
  RBoundedResult res;
  res.min_ratio = std::numeric_limits<double>::infinity();
  for (const CVec& u : points) {
    const CMat r0 = hermitian_part(ref(u));
    const CMat l = guarded_cholesky(r0, 1e12, "r_bounded_check reference form");
    const CMat li = l.triangularView<Eigen::Lower>().solve(CMat::Identity(r0.rows(), r0.rows()));
    auto diff = [&](const CVec& x) -> CMat { return li * (cand(x) - ref(x)) * li.adjoint(); };
    res.ca_norm = std::max(res.ca_norm, diff(u).norm());
    res.min_ratio = std::min(res.min_ratio, min_eigenvalue(hermitian_part(li * cand(u) * li.adjoint())));
    const long n = u.size();
    for (long c = 0; c < n; ++c)
      for (int part = 0; part < 2; ++part) {
        CVec e = CVec::Zero(n);
        e(c) = (part == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0)) / std::sqrt(r0(c, c).real());
        for (int j = 1; j <= a; ++j) {
          CMat dj = CMat::Zero(r0.rows(), r0.cols());
          double binom = 1.0;
          for (int i = 0; i <= j; ++i) {
            const double off = (0.5 * j - i) * h;
            dj += ((i % 2) ? -binom : binom) * diff(u + off * e);
            binom = binom * (j - i) / (i + 1);
          }
          res.ca_norm = std::max(res.ca_norm, dj.norm() / std::pow(h, j));
        }
      }
  }
  res.norm_margin = r_bound - res.ca_norm;
  res.positivity_margin = res.min_ratio - 1.0 / r_bound;
  res.passed = res.norm_margin >= 0.0 && res.positivity_margin >= 0.0;
  return res;
}

namespace {

void split_chart(const CVec& u, int m, int r, int chart, CVec& z, CVec& lambda) {
  z = u.head(m);
  lambda = CVec::Ones(r);
  for (int a = 0, i = m; a < r; ++a)
    if (a != chart) lambda(a) = u(i++);
}

}  // namespace

FormField gram_form(const EmbeddingState& es, int chart) {
  const InducedFSMetric fs = es.fs();
  const int m = es.geometry().setup().model.m, r = es.geometry().setup().model.rank();
  return [fs, m, r, chart](const CVec& u) {
    CVec z, lam;
    split_chart(u, m, r, chart, z, lam);
    return fs.kahler_matrix(z, lam, chart);
  };
}

FormField reference_form(const BundleMetricField& h, const KahlerStructure& omega, int k, int chart) {
  const int m = h.base_dim(), r = h.rank();
  return [h, omega, k, chart, m, r](const CVec& u) {
    const int n = static_cast<int>(u.size());
    std::vector<cplx> uu(u.data(), u.data() + n);
    const JetPoint full = JetPoint::seed(uu, 2);
    JetPoint sub;
    sub.space = full.space;
    sub.z.assign(full.z.begin(), full.z.begin() + m);
    sub.zbar.assign(full.zbar.begin(), full.zbar.begin() + m);
    const std::vector<Jet> p = jet_matrix_inverse(h.field()(sub), r);
    std::vector<Jet> lam, lamb;
    for (int a = 0, i = m; a < r; ++a) {
      if (a == chart) {
        lam.push_back(full.constant(1.0));
        lamb.push_back(full.constant(1.0));
      } else {
        lam.push_back(full.z[i]);
        lamb.push_back(full.zbar[i]);
        ++i;
      }
    }
    Jet q = full.constant(0.0);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) q += lam[a] * p[a * r + b] * lamb[b];
    Jet phi = log(q);
    if (m > 0 && k != 0) phi += static_cast<double>(k) * omega.potential(sub);
    const std::vector<cplx> hs = complex_hessian(phi, n);
    CMat out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = hs[i * n + j];
    return hermitian_part(out);
  };
}

// --- almost balanced ----------------------------------------------------------------

AlmostBalancedVerdict almost_balanced_check(const std::vector<AlmostBalancedSample>& seq, int q) {
  if (seq.size() < 3) throw std::invalid_argument("almost_balanced_check: need at least three k values");
  AlmostBalancedVerdict v;
  std::vector<double> ks, norms;
  bool zero = true;
  for (const auto& s : seq) {
    const double nrm = op_norm_hermitian(hermitian_part(s.m));
    if (nrm > 1e-12) zero = false;
    ks.push_back(s.k);
    norms.push_back(std::max(nrm, 1e-300));
    if (s.expected_d)
      v.d_max_error = std::max(v.d_max_error, std::abs(s.d - *s.expected_d) / std::abs(*s.expected_d));
  }
  v.all_zero = zero;
  if (zero) {
    v.fitted_order = std::numeric_limits<double>::infinity();
    v.verdict = true;
    return v;
  }
  v.fitted_order = -loglog_slope(ks, norms);
  v.verdict = v.fitted_order >= q + 1 - 0.3;
  return v;
}

AlmostBalancedSample almost_balanced_sample(const EmbeddingState& es) {
  const MomentValue mv = moment_map(es);
  const ModelSpace& ms = es.geometry().setup().model;
  AlmostBalancedSample s;
  s.k = ms.k;
  s.m = mv.m;
  s.d = mv.d;
  s.expected_d = topological_volume(ms) / static_cast<double>(riemann_roch_dimension(ms).n);
  return s;
}

}  // namespace klab
