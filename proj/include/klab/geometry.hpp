#pragma once

// Kahler structures given by local potentials on an affine chart of C^m,
// contraction by powers of the Kahler form, and quadrature integration.
//
// Conventions. omega = i ddbar(phi) = i sum g_{jk} dz_j ^ dzbar_k with
// g_{jk} = d_j dbar_k phi. The volume form is omega^m/m! = 2^m det(g) dLeb.
// Built-in potentials are normalized so that omega lies in 2 pi c_1(L):
// the Fubini-Study form on CP^1 has total area 2 pi and scalar curvature 2.

#include "klab/jet.hpp"
#include "klab/linalg.hpp"
#include "klab/parallel.hpp"
#include "klab/quadrature.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace klab {

/// A real function on C^m expressed through jet arithmetic.
using JetField = std::function<Jet(const JetPoint&)>;
/// A real function on C^m given only by values (derivatives by finite differences).
using ValueField = std::function<double(const CVec&)>;

/// Raised when i ddbar(phi) fails to be positive definite.
class InvalidPotentialError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct KahlerStructure {
  int dim = 0;
  std::string name;
  JetField potential;  // exact route
  ValueField values;   // finite-difference route, used when potential is empty

  bool exact() const { return static_cast<bool>(potential); }
};

KahlerStructure fubini_study(int m);
KahlerStructure flat(int m);
/// phi - t*eta, i.e. omega + t i dbar d eta.
KahlerStructure perturbed(const KahlerStructure& ks, JetField eta, double t);
KahlerStructure from_values(int m, ValueField phi, std::string name);

/// Entries g_{jk} as jets of order (order of the seed) - 2.
std::vector<Jet> kahler_jets(const KahlerStructure& ks, const JetPoint& p);

/// g_{jk} at z without positivity check.
CMat kahler_matrix(const KahlerStructure& ks, const CVec& z);
/// g_{jk} at z; throws InvalidPotentialError unless positive definite.
CMat eval_kahler_form(const KahlerStructure& ks, const CVec& z);
/// Ricci form coefficients -d_j dbar_k log det g.
CMat ricci_matrix(const KahlerStructure& ks, const CVec& z);
/// S = Lambda_omega Ric(omega).
double scalar_curvature(const KahlerStructure& ks, const CVec& z);

/// d_j dbar_k f by centered differences in the real coordinates, Richardson
/// extrapolated from steps h and h/2.
CMat fd_complex_hessian(const ValueField& f, const CVec& z, double h = 1e-3);

/// Lambda of a (1,1)-form with coefficient matrix a: sum_{jk} g^{kj} a_{jk}.
cplx lambda1(const CMat& g_inv, const CMat& a);
/// Lambda^2 of alpha ^ beta for (1,1)-forms: Lambda(a)Lambda(b) - tr(g^-1 a g^-1 b).
cplx lambda2(const CMat& g_inv, const CMat& a, const CMat& b);

/// A (p,p)-form sum alpha_{JK} prod_s (i dz_{j_s} ^ dzbar_{k_s}), J and K
/// increasing index sets stored as bitmasks.
class PPForm {
public:
  PPForm(int m, int p);
  static PPForm from_11(const CMat& a);

  int dim() const { return m_; }
  int degree() const { return p_; }
  const std::vector<unsigned>& subsets() const { return subsets_; }
  cplx& at(unsigned jmask, unsigned kmask);
  cplx at(unsigned jmask, unsigned kmask) const;

  PPForm wedge(const PPForm& o) const;
  PPForm& operator+=(const PPForm& o);
  PPForm& operator*=(cplx c);
  /// Coefficient of the top form prod_j (i dz_j ^ dzbar_j).
  cplx top() const;

private:
  int m_, p_;
  std::vector<unsigned> subsets_;
  std::vector<int> slot_;  // bitmask -> position in subsets_
  std::vector<cplx> coef_;
};

/// Lambda^j with respect to a reference Kahler matrix g.
class ContractionOperator {
public:
  ContractionOperator(CMat g, int j);
  int order() const { return j_; }
  /// The scalar c with (m!/(m-j)!) alpha ^ omega^{m-j} = c omega^m.
  cplx contract(const PPForm& alpha) const;
  /// omega^j as a (j,j)-form.
  PPForm omega_power(int j) const;

private:
  CMat g_;
  int j_;
  int m_;
};

/// Sum w_i f(node i) over a projective rule. T is a scalar or Eigen matrix.
template <class T, class F>
T integrate(const ProjectiveRule& q, const T& zero, F&& f, Exec exec = Exec::parallel) {
  T total = reduce_nodes(
      q.size(), zero,
      [&](std::size_t i, T& acc) {
        const T v = f(i);
        bool finite;
        if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
          finite = std::isfinite(std::abs(v));
        } else {
          finite = v.allFinite();
        }
        if (!finite) {
          std::ostringstream os;
          os << "integrate: non-finite integrand at node " << i << " (Z = "
             << q.node(i).transpose() << ")";
          throw NumericalGuardError(os.str());
        }
        acc += q.weight(i) * v;
      },
      exec);
  return total;
}

}  // namespace klab
