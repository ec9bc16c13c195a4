#pragma once

// Balanced embeddings of Y = PE* by the sections of O(1) (x) pi^* L^k.
//
// A Gram matrix G on H^0 induces the FS metric |v|^2 / (v G^{-1} v^*) on
// O_Y(1) and its curvature form omega_G. All integrals are over Y against
// omega_G^n/n!, realized as a product rule (base rule x fibre rule in the
// reference frame of a split bundle metric) reweighted by the density of
// omega_G^n/n! against the product measure. V in the moment map is the
// quadrature volume of omega_G, so tr M vanishes to round-off.
//
// The state variable is always a Gram matrix in the monomial basis of
// sections.hpp; det G = 1 after every update.

#include "klab/bergman.hpp"
#include "klab/metrics.hpp"
#include "klab/sections.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace klab {

struct BalancingSetup {
  ModelSpace model;        // k is the twist being balanced
  int base_degree = -1;    // -1: 2(max a + k) + 6
  int fiber_degree = -1;   // -1: 8
  Exec exec = Exec::parallel;
};

/// Quadrature nodes on Y with everything that does not depend on G.
struct YNode {
  CVec z, lambda;  // lambda normalized so lambda(chart) = 1
  int chart = 0;
  CRow v;          // section values lambda^T S(z)
  CMat jac;        // d v / d u in the chart, n x N
  double ref_weight = 0.0;  // product weight / product density in the chart
};

class EmbeddingGeometry {
public:
  explicit EmbeddingGeometry(const BalancingSetup& setup);

  const BalancingSetup& setup() const { return setup_; }
  const SectionBasis& basis() const { return sb_; }
  const std::vector<YNode>& nodes() const { return nodes_; }
  int k() const { return setup_.model.k; }
  long dimension() const { return static_cast<long>(sb_.size()); }
  int y_dim() const { return setup_.model.m + setup_.model.rank() - 1; }

private:
  BalancingSetup setup_;
  SectionBasis sb_;
  std::vector<YNode> nodes_;
};

class EmbeddingState {
public:
  EmbeddingState(std::shared_ptr<const EmbeddingGeometry> geo, const CMat& gram);

  const EmbeddingGeometry& geometry() const { return *geo_; }
  std::shared_ptr<const EmbeddingGeometry> geometry_ptr() const { return geo_; }
  const CMat& gram() const { return gram_; }
  /// T with T^* G T = I; the G-orthonormal basis is t = s T.
  const CMat& transform() const { return t_; }
  int k() const { return geo_->k(); }
  InducedFSMetric fs() const { return fs_from_gram(gram_, geo_->basis()); }

private:
  std::shared_ptr<const EmbeddingGeometry> geo_;
  CMat gram_, t_;
};

/// Identity Gram on a fresh geometry.
EmbeddingState initial_state(const BalancingSetup& setup);

struct MomentValue {
  CMat m;            // N x N, in the G-orthonormal basis
  double d = 0.0;    // V/N
  double volume = 0.0;
  double op_norm = 0.0;
  double frobenius = 0.0;
};

/// Integrated data of one state: L^2 Gram of t against omega_G^n/n!, and V.
struct StateIntegrals {
  CMat k_t;      // int t^* t / |t|^2 dvol_G
  double volume = 0.0;
};
StateIntegrals state_integrals(const EmbeddingState& es);
StateIntegrals state_integrals(const EmbeddingState& es, Exec exec);

MomentValue moment_map(const EmbeddingState& es);
MomentValue moment_value(const CMat& m, double d, double volume);

/// G' = (N/V) int <s_i, s_j>_{FS(G)} dvol_G, det-normalized.
EmbeddingState t_map_step(const EmbeddingState& es);

struct BalanceReport {
  int iterations = 0;
  std::vector<double> op_norm, frobenius;  // entry 0 is the start state
  CMat final_gram;
  bool converged = false;
  bool diverged = false;
  double seconds = 0.0;
};
/// T-iteration until ||M||_op < tol; stops with diverged = true after ten
/// consecutive increases.
BalanceReport balance_iterate(const EmbeddingState& start, double tol, int max_iter);

/// Descent step on |M|_F^2: in the orthonormal basis the Gram becomes
/// exp(step (N/V) M); step is halved until |M|_F^2 does not increase.
EmbeddingState gradient_flow_step(const EmbeddingState& es, double step, double* used_step = nullptr);

struct FlowReport {
  int iterations = 0;
  std::vector<double> op_norm, frobenius;
  CMat final_gram;
  bool converged = false;
};
FlowReport gradient_flow(const EmbeddingState& start, double step, double tol, int max_iter);

/// Bergman density of L^2(FS(G), dvol_G): t K^{-1} t^* / |t|^2 at every node.
std::vector<double> fs_bergman_density(const EmbeddingState& es);
/// Variance of rho / mean(rho) over nodes.
double relative_variance(const std::vector<double>& rho);

/// Orthonormal basis of su(N) in the trace inner product, as Hermitian
/// matrices (multiply by i for the skew-Hermitian form).
std::vector<CMat> su_basis(int n);

struct QzResult {
  RMat q;                   // (N^2-1) x (N^2-1), real symmetric PSD
  RVec eigenvalues;         // ascending
  double min_positive = 0;  // smallest eigenvalue above 1e-9 * max
  long kernel_dim = 0;      // eigenvalues below that threshold
  long skipped_nodes = 0;   // rank-deficient Jacobians
};
/// Q_z = sigma^* sigma on the normal projections of the vector fields of su(N)
/// over the G-orthonormal embedding.
QzResult sigma_z_operator(const EmbeddingState& es);
QzResult sigma_z_operator(const EmbeddingState& es, const std::vector<CMat>& basis);

struct EigEstimate {
  int k = 0;
  long su_dim = 0;
  std::size_t sample_size = 0;
  double lambda_inv = 0.0;  // min positive eigenvalue of Q_z (0 when Q_z = 0)
  double lambda = 0.0;      // 1/lambda_inv, +inf when Q_z = 0
  long kernel_dim = 0;
  double moment_norm = 0.0;
  bool balanced = false;
};
struct LambdaScaling {
  std::vector<EigEstimate> table;
  double exponent = 0.0;    // log-log slope of lambda over the k with finite lambda
  long fitted_points = 0;
  bool monotone = false;
};
/// Balances each k, then estimates Lambda_z. Needs at least two k values with
/// a non-zero Q_z.
LambdaScaling lambda_z_scaling(const BalancingSetup& setup, const std::vector<int>& k_grid,
                               double tol = 1e-8, int max_iter = 500);

/// A (1,1)-form on Y in one chart, as its coefficient matrix at chart point u.
using FormField = std::function<CMat(const CVec& u)>;
struct RBoundedResult {
  bool passed = false;
  double ca_norm = 0.0;           // max over points of the C^a size of (cand - ref)
  double min_ratio = 0.0;         // min eigenvalue of cand against ref
  double norm_margin = 0.0;       // R - ca_norm
  double positivity_margin = 0.0; // min_ratio - 1/R
};
/// C^a norms via central differences of order up to a along ref-unit
/// coordinate directions, in a frame frozen at each point.
RBoundedResult r_bounded_check(const FormField& cand, const FormField& ref, const std::vector<CVec>& points,
                               double r_bound, int a = 4, double h = 1e-2);

/// omega_G in chart `chart`, with u = (z, lambda_a for a != chart).
FormField gram_form(const EmbeddingState& es, int chart);
/// The reference form i ddbar log(lambda P lambda^*) + k omega in the same chart.
FormField reference_form(const BundleMetricField& h, const KahlerStructure& omega, int k, int chart);

struct AlmostBalancedSample {
  int k = 0;
  CMat m;
  double d = 0.0;
  std::optional<double> expected_d;  // V_k/N_k from topology
};
struct AlmostBalancedVerdict {
  bool verdict = false;
  double fitted_order = 0.0;       // -slope of ||M||_op against k
  bool all_zero = false;
  double d_max_error = 0.0;        // max |D - V_k/N_k| where expected is known
};
AlmostBalancedVerdict almost_balanced_check(const std::vector<AlmostBalancedSample>& seq, int q);

/// Sample from a state: M, D and the topological V_k/N_k.
AlmostBalancedSample almost_balanced_sample(const EmbeddingState& es);

}  // namespace klab
