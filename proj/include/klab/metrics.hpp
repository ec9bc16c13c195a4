#pragma once

// Hermitian metrics on the split bundles of sections.hpp and the metrics they
// induce on O_{PE*}(1).
//
// A bundle metric is an r x r Hermitian matrix field H(z) in the frame e with
// h(s, t) = t^* H s. Its Chern curvature in that frame is the End(E)-valued
// (1,1)-form i F = sum F_{jk} (i dz_j ^ dzbar_k), F_{jk} = -dbar_k(H^{-1} d_j H).
// The mean curvature K = Lambda_omega(i F) is what the rest of the code calls
// "(i/2 pi) Lambda F": with omega in 2 pi c_1(L) the factor 2 pi is absorbed
// by contracting against omega/2 pi, so K = a for O(a) over Fubini-Study CP^1.

#include "klab/geometry.hpp"
#include "klab/sections.hpp"

#include <functional>
#include <string>
#include <vector>

namespace klab {

/// r*r row-major jets of a matrix field.
using MatrixJetField = std::function<std::vector<Jet>(const JetPoint&)>;

class BundleMetricField {
public:
  BundleMetricField() = default;
  BundleMetricField(int m, int r, MatrixJetField h, std::string name);

  /// diag(c_i (1 + |z|^2)^{-a_i}), c_i = 1 unless given.
  static BundleMetricField split_fs(int m, const std::vector<int>& a, std::vector<double> c = {});
  /// Constant positive Hermitian H0.
  static BundleMetricField constant(int m, const CMat& h0);
  /// H + t M for a Hermitian matrix field M.
  static BundleMetricField perturbed(const BundleMetricField& base, MatrixJetField dm, double t);

  int base_dim() const { return m_; }
  int rank() const { return r_; }
  const std::string& name() const { return name_; }
  const MatrixJetField& field() const { return h_; }

  CMat value(const CVec& z) const;

private:
  int m_ = 0, r_ = 1;
  MatrixJetField h_;
  std::string name_;
};

/// H, P = H^{-1} and the derivatives of P needed by curvature and fibre forms.
struct MetricJet {
  CMat h, p;
  std::vector<CMat> dh, dbar_h;  // d_j H, dbar_k H
  std::vector<CMat> ddbar_h;     // d_j dbar_k H, index j*m+k
  std::vector<CMat> dp, dbar_p;
  std::vector<CMat> ddbar_p;
};
MetricJet metric_jet(const BundleMetricField& h, const CVec& z);

/// Inverse of a matrix of jets by Gauss-Jordan elimination.
std::vector<Jet> jet_matrix_inverse(std::vector<Jet> a, int n);

struct CurvatureField {
  std::vector<CMat> f;  // F_{jk} as r x r endomorphisms, index j*m+k
  CMat mean;            // K = Lambda_omega(i F)
};
CurvatureField curvature(const BundleMetricField& h, const KahlerStructure& ks, const CVec& z);
CurvatureField curvature(const MetricJet& mj, const CMat& g);

/// Largest |entry| of (H K) - (H K)^*, i.e. failure of K to be h-self-adjoint.
double mean_curvature_hermitian_defect(const MetricJet& mj, const CMat& k);

/// max over nodes of ||K - mu I|| in an h-orthonormal frame, with
/// mu = (1/r) (int tr K) / (int 1) against omega^m/m!.
double hermitian_einstein_residual(const BundleMetricField& h, const KahlerStructure& ks,
                                   const ProjectiveRule& base_rule, Exec exec = Exec::parallel);

/// Weight of h^ on O_{PE*}(1) at (z, [lambda]): |s^|^2 = |lambda.s|^2 * hat_metric.
double hat_metric(const MetricJet& mj, const CVec& lambda);
double hat_metric(const BundleMetricField& h, const CVec& z, const CVec& lambda);

/// Fubini-Study data induced by a Gram matrix G on H^0 (G_{ji} = <s_i, s_j>).
class InducedFSMetric {
public:
  InducedFSMetric(const CMat& gram, const SectionBasis& sb);

  const CMat& gram() const { return g_; }
  const CMat& gram_inverse() const { return ginv_; }
  const SectionBasis& basis() const { return sb_; }

  /// sum_alpha |t_alpha|^2 = v G^{-1} v^* in the frame of eval_basis.
  double density(const CRow& v) const;
  double density(const CVec& z, const CVec& lambda) const;
  /// |c . s|^2_{FS(G)} for a coefficient vector c.
  double norm2(const CVec& coeffs, const CVec& z, const CVec& lambda) const;

  /// Kahler matrix of omega_G = i ddbar log(v G^{-1} v^*) in the chart
  /// (z, lambda_a for a != chart) with lambda_chart = 1; size m + r - 1.
  CMat kahler_matrix(const CVec& z, const CVec& lambda, int chart) const;
  /// Same form as the pull-back of the standard FS form through t = v C.
  CMat pullback_fs_matrix(const CVec& z, const CVec& lambda, int chart) const;

private:
  CMat g_, ginv_, c_;
  SectionBasis sb_;
};

InducedFSMetric fs_from_gram(const CMat& gram, const SectionBasis& sb);

/// Chart-coordinate Jacobian rows d v / d u for u = (z, lambda_a, a != chart).
CMat chart_jacobian(const SectionJet& jet, int chart);

}  // namespace klab
