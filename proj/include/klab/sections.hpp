#pragma once

// Model spaces PE* -> X with X = CP^m (m = 0 is a point) and E a split bundle
// O(a_1) + ... + O(a_r), polarized by O_{PE*}(1) (x) pi^* O(k).
//
// Frames. On the affine chart z = (Z_1/Z_0, ..., Z_m/Z_0) of X the summand
// O(a_i) is trivialized by e_i and L = O(1) by its standard section. A point
// of PE* is a pair (z, lambda) with lambda in C^r a nonzero covector on the
// fibre E_z; a section s of E (x) L^k then gives the section s^ of O(1) (x)
// L^k whose value at (z, [lambda]) in the induced frame is lambda . s(z).

#include "klab/linalg.hpp"

#include <string>
#include <vector>

namespace klab {

enum class ModelKind { projective_point, line_bundle_sum_over_p1, projective_space_base, trivial_bundle_over_pm };

struct ModelSpace {
  ModelKind kind = ModelKind::projective_point;
  int m = 0;                 // base dimension
  std::vector<int> degrees;  // a_1..a_r
  int k = 0;                 // twist

  static ModelSpace projective_point(int r);
  static ModelSpace line_bundle_sum_over_p1(std::vector<int> a, int k);
  static ModelSpace projective_space_base(int m, std::vector<int> a, int k);
  static ModelSpace trivial_bundle_over_pm(int m, int r, int k);

  int rank() const { return static_cast<int>(degrees.size()); }
  /// Complex dimension of PE*.
  int total_dim() const { return m + rank() - 1; }
  ModelSpace with_twist(int k2) const;
  /// Throws std::invalid_argument when the section space would be empty or
  /// the declared data are inconsistent.
  void validate() const;
  std::string describe() const;
};

struct Monomial {
  int fiber = 0;           // index i of e_i
  std::vector<int> exps;   // exponent of z
};

struct SectionJet {
  CRow value;    // 1 x N, values lambda . s(z)
  CMat dz;       // m x N, d/dz_j of the values
  CMat dlambda;  // r x N, d/dlambda_a of the values
};

class SectionBasis {
public:
  explicit SectionBasis(const ModelSpace& ms);

  const ModelSpace& model() const { return ms_; }
  std::size_t size() const { return monomials_.size(); }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  /// r x N matrix whose column i is s_i(z) in the frame e.
  CMat section_matrix(const CVec& z) const;
  /// d/dz_j of section_matrix.
  CMat section_matrix_dz(const CVec& z, int j) const;

private:
  ModelSpace ms_;
  std::vector<Monomial> monomials_;
};

SectionBasis build_section_basis(const ModelSpace& ms);

struct DimensionCount {
  long n = 0;         // dim H^0
  double n1 = 0.0;    // leading coefficient of N_k = n1 k^m + ...
};
DimensionCount riemann_roch_dimension(const ModelSpace& ms);

/// int_{PE*} (omega_g + k omega)^n / n! for omega in 2 pi c_1(O(1)).
double topological_volume(const ModelSpace& ms);

/// Values lambda . s_i(z); throws NumericalGuardError if all vanish.
CRow eval_basis(const SectionBasis& sb, const CVec& z, const CVec& lambda);
SectionJet eval_jet(const SectionBasis& sb, const CVec& z, const CVec& lambda);

}  // namespace klab
