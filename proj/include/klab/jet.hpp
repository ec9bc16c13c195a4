#pragma once

// Truncated multivariate Taylor series ("jets") with complex coefficients.
//
// A real-analytic function on C^m is expanded in the 2m independent variables
// (z_1..z_m, zbar_1..zbar_m). Arithmetic and analytic compositions propagate
// the expansion exactly up to a fixed total order, so every mixed partial
// d^a/dz^a d^b/dzbar^b of a built-in potential is available to round-off.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace klab {

using cplx = std::complex<double>;

/// Shared indexing data for jets with a given variable count and order.
class JetSpace {
public:
  static std::shared_ptr<const JetSpace> get(int num_vars, int order);

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return degrees_.size(); }

  /// Exponent vector of coefficient `i`.
  std::span<const std::uint8_t> exponent(std::size_t i) const {
    return {exponents_.data() + i * num_vars_, static_cast<std::size_t>(num_vars_)};
  }
  int degree(std::size_t i) const { return degrees_[i]; }
  /// Index of an exponent vector, or -1 when its degree exceeds the order.
  long index_of(std::span<const int> exps) const;

  struct Product {
    std::uint32_t a, b, out;
  };
  const std::vector<Product>& products() const { return products_; }

  JetSpace(int num_vars, int order);

private:
  int num_vars_;
  int order_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degrees_;
  std::vector<long> lookup_;
  std::vector<Product> products_;
};

class Jet {
public:
  Jet() = default;
  explicit Jet(std::shared_ptr<const JetSpace> space, cplx value = 0.0);

  static Jet variable(std::shared_ptr<const JetSpace> space, int var, cplx value);

  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  cplx value() const { return coef_[0]; }
  const std::vector<cplx>& coefficients() const { return coef_; }
  std::vector<cplx>& coefficients() { return coef_; }

  /// Partial derivative with multiplicities `counts` (one entry per variable).
  cplx partial(std::span<const int> counts) const;
  cplx d(int i) const;
  cplx dd(int i, int j) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(cplx c) { coef_[0] += c; return *this; }
  Jet& operator-=(cplx c) { coef_[0] -= c; return *this; }
  Jet& operator*=(cplx c);

  Jet operator-() const;

  /// g(f) from the derivatives g(f0), g'(f0), ... g^(order)(f0).
  Jet compose(std::span<const cplx> derivs) const;

private:
  std::shared_ptr<const JetSpace> space_;
  std::vector<cplx> coef_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, cplx c);
Jet operator+(cplx c, Jet a);
Jet operator-(Jet a, cplx c);
Jet operator-(cplx c, const Jet& a);
Jet operator*(Jet a, cplx c);
Jet operator*(cplx c, Jet a);
Jet operator/(Jet a, cplx c);
Jet operator/(cplx c, const Jet& a);

Jet log(const Jet& a);
Jet exp(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sqrt(const Jet& a);
Jet reciprocal(const Jet& a);

/// Seed variables for a point z in C^m: vars[j] = z_j, vars[m+j] = conj(z_j).
struct JetPoint {
  std::shared_ptr<const JetSpace> space;
  std::vector<Jet> z;
  std::vector<Jet> zbar;

  static JetPoint seed(std::span<const cplx> z, int order);
  int dim() const { return static_cast<int>(z.size()); }
  Jet constant(cplx c) const { return Jet(space, c); }
  /// |z|^2 = sum z_j zbar_j
  Jet norm2() const;
};

/// d f / d(var) as a jet of order one lower.
Jet differentiate(const Jet& f, int var);

/// The same expansion viewed at a lower truncation order.
Jet truncate(const Jet& f, int order);

/// Determinant of a small square matrix of jets (row-major, n x n).
Jet jet_determinant(std::vector<Jet> a, int n);

/// Mixed second derivatives d_j dbar_k f as an m x m matrix (row-major).
std::vector<cplx> complex_hessian(const Jet& f, int m);

}  // namespace klab
