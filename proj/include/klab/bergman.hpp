#pragma once

// L^2 inner products, Bergman endomorphisms and the fibre-integral
// endomorphisms Psi_j on the models of sections.hpp.
//
// Measures. The base volume is omega^m/m!; integrals over PE* are taken
// fibre by fibre. At a base point z the fibre coordinate is mu in CP^{r-1}
// with lambda = mu A^{-1}, P = H^{-1} = A A^*, so that the fibre part of
// omega_g = i ddbar log(lambda P lambda^*) is the standard FS form in mu.
// Writing Theta for the horizontal part of omega_g and W for omega,
//   (omega_g + k omega)^n / n! = det(Theta + k W)/det(W) * dmu_g,
//   dmu_g = (omega_g^{r-1}/(r-1)!) ^ (omega^m/m!),
// so f_j is the k^j coefficient of det(Theta + k W)/det W. The denominator
// (m+r-1-j)! is the one forced by the binomial expansion.

#include "klab/geometry.hpp"
#include "klab/metrics.hpp"
#include "klab/sections.hpp"

#include <optional>
#include <string>
#include <vector>

namespace klab {

/// C_r = int_{C^{r-1}} (i dxi ^ dxibar)^{r-1} / (1 + |xi|^2)^{r+1}, by
/// Gauss-Legendre quadrature of the radial integral.
double c_r_constant(int r);
/// (2 pi)^{r-1} / r!.
double c_r_closed_form(int r);

struct BergmanProblem {
  ModelSpace model;
  BundleMetricField h;
  KahlerStructure omega;
  int base_degree = -1;   // exactness degree of the base rule; -1 picks a default
  int fiber_degree = -1;  // exactness degree of the fibre rule
  Exec exec = Exec::parallel;

  /// Rules for the problem twisted by k.
  ProjectiveRule base_rule(int k) const;
  ProjectiveRule fiber_rule() const;
};

/// Standard problem: split FS metric on E, Fubini-Study base.
BergmanProblem standard_problem(const ModelSpace& ms);

/// Horizontal part Theta_{jk} of omega_g at (z, [lambda]).
CMat horizontal_form(const MetricJet& mj, const CVec& lambda);

/// f_0..f_m: coefficients of det(Theta + k W)/det W.
std::vector<double> volume_weights(const CMat& theta, const CMat& w);

/// lambda = mu A^{-1} for the fibre frame at a base point (column vector).
CVec fiber_covector(const CMat& a_inv_t, const CVec& mu);

/// Hermitian forms g~_j (matrices G_j with g~_j(s,t) = t^* G_j s) at one base
/// point, j = 0..m, and Psi_j = H^{-1} G_j.
struct FiberEndomorphisms {
  std::vector<CMat> g;
  std::vector<CMat> psi;
};
FiberEndomorphisms fiber_push_forward(const MetricJet& mj, const CMat& w, const ProjectiveRule& fiber);

/// g~ for a metric on O(1) given by its weight against h^ (1 gives g = h^).
CMat fiber_push_forward(const MetricJet& mj, const ProjectiveRule& fiber,
                        const std::function<double(const CVec& lambda)>& weight_vs_hat);

/// Per-base-node data shared by the L^2 computations.
struct BaseNode {
  CVec z;
  double weight = 0.0;  // quadrature weight for omega^m/m!
  double phi = 0.0;     // potential of omega, so sigma = exp(-phi)
  MetricJet mj;
  CMat w;               // omega matrix
  CMat sections;        // r x N
  FiberEndomorphisms fe;
};
std::vector<BaseNode> prepare_base(const BergmanProblem& bp, const SectionBasis& sb,
                                   const ProjectiveRule& base, const ProjectiveRule& fiber);

/// sum_i w_i v_i^* v_i for rows v_i (G_{ji} = <s_i, s_j>).
template <class Values, class Weights>
CMat l2_gram(std::size_t n, long dim, Values&& values, Weights&& weights, Exec exec = Exec::parallel) {
  return reduce_nodes(
      n, CMat::Zero(dim, dim).eval(),
      [&](std::size_t i, CMat& acc) {
        const double wt = weights(i);
        if (wt == 0.0) return;
        const CMat v = values(i);  // rows are section-value vectors
        acc.noalias() += wt * (v.adjoint() * v);
      },
      exec);
}

/// B~_k and the data it was built from.
class BergmanEndomorphism {
public:
  BergmanEndomorphism(const BergmanProblem& bp, int k);

  int k() const { return k_; }
  const SectionBasis& basis() const { return sb_; }
  /// L^2(h(k) (x) sigma^k, omega^m/m!) Gram of the section basis.
  const CMat& gram() const { return gram_; }
  double gram_condition() const { return cond_; }
  const std::vector<BaseNode>& nodes() const { return nodes_; }
  const BergmanProblem& problem() const { return bp_; }

  /// B~_k(z) in the frame e; h-self-adjoint.
  CMat at(const CVec& z) const;
  /// B~_k at base node i.
  CMat at_node(std::size_t i) const;
  /// sum_i int |s_i|^2_{h (x) sigma^k} omega^m/m! for an h(k)-orthonormal basis.
  double trace_integral() const;

private:
  BergmanProblem bp_;
  int k_;
  SectionBasis sb_;
  std::vector<BaseNode> nodes_;
  CMat gram_, gram_inv_;
  double cond_ = 0.0;
};

/// Bergman density on PE* from an L^2(h^ (x) sigma^k, dmu_{g,k}) orthonormal basis.
class RhoDirect {
public:
  RhoDirect(const BergmanProblem& bp, int k);
  double operator()(const CVec& z, const CVec& lambda) const;
  /// int rho dmu_{g,k} by the same quadrature.
  double integral() const;
  /// int dmu_{g,k}.
  double volume() const { return volume_; }
  const CMat& gram() const { return gram_; }
  long dimension() const { return static_cast<long>(sb_.size()); }

private:
  BergmanProblem bp_;
  int k_;
  SectionBasis sb_;
  CMat gram_, gram_inv_;
  double volume_ = 0.0;
  double integral_ = 0.0;
};

/// lambda(v, h) = v v^* H / (v^* H v).
CMat lambda_endomorphism(const CVec& v, const CMat& h);
/// C_r^{-1} tr(lambda(v, h) B~_k(z)) with v = P lambda^* the h-dual of lambda.
double rho_via_trace(const BergmanEndomorphism& b, const CVec& z, const CVec& lambda);

/// K - tr(K)/r + (r+1)/(2r) S, the closed-form coefficient.
CMat a1_formula(const BundleMetricField& h, const KahlerStructure& ks, const CVec& z);
/// B_1 - Psi_{m-1} with B_1 = K + S/2 and Psi_{m-1} from fibre quadrature.
CMat a1_alternative(const BundleMetricField& h, const KahlerStructure& ks, const CVec& z,
                    const ProjectiveRule& fiber);
/// (tr K I + K)/(r+1), the predicted Psi_{m-1}.
CMat psi_m_minus_1_formula(const CMat& mean_curvature);

struct ExpansionFit {
  std::vector<int> ks;
  std::vector<CVec> points;            // base sample points
  std::vector<std::vector<CMat>> b;    // (2 pi)^m B~_k at each point, per k
  std::vector<CMat> a;                 // fitted k^{m-1} coefficient per point
  std::vector<double> residual;        // max_point ||(2pi)^m B~_k - k^m I - A k^{m-1}|| per k
  double residual_slope = 0.0;         // log-log slope of residual against k
  bool exact = false;                  // residual at round-off for every k
};
/// Least squares over the k-grid with a k^{m-2} nuisance term.
ExpansionFit expansion_fit(const BergmanProblem& bp, const std::vector<int>& k_grid,
                           const std::vector<CVec>& points);

/// Log-log least-squares slope.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// D^*D eta = d/dt S(omega + t i dbar d eta) at t = 0, Richardson-extrapolated.
double lichnerowicz_apply(const KahlerStructure& ks, const JetField& eta, const CVec& z,
                          double h = 1e-3);

struct A11Input {
  MatrixJetField m;  // metric variation, Phi = H^{-1} M
  JetField eta;
};

/// Raised when an A_{1,1} precondition fails; the message lists which.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Checks the a11_apply preconditions on a base rule; throws PreconditionError.
void check_a11_preconditions(const BundleMetricField& h, const KahlerStructure& ks,
                             const A11Input& in, const ProjectiveRule& base);

/// Linearization of a1_formula at (h_HE, omega) in the direction (Phi, eta).
CMat a11_apply(const BundleMetricField& h, const KahlerStructure& ks, const A11Input& in,
               const CVec& z);

/// [A_1(h + tM, omega + t i dbar d eta) - A_1(h, omega)]/t by forward differences
/// at t and t/2, Richardson-extrapolated.
CMat a1_directional_fd(const BundleMetricField& h, const KahlerStructure& ks, const A11Input& in,
                       const CVec& z, double t = 1e-3);

}  // namespace klab
