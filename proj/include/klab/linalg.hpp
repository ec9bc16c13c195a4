#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace klab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Raised when a numerical guard trips (conditioning, positivity, quadrature).
class NumericalGuardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

/// Largest |entry| of A - A^*.
double hermitian_defect(const CMat& a);

/// Eigenvalues of a Hermitian matrix, ascending.
RVec hermitian_eigenvalues(const CMat& a);
double min_eigenvalue(const CMat& a);
double op_norm_hermitian(const CMat& a);
double condition_number(const CMat& a);

/// Lower Cholesky factor of a Hermitian positive-definite matrix with a
/// condition-number guard; throws NumericalGuardError on failure.
CMat guarded_cholesky(const CMat& a, double max_condition, const std::string& what);

/// f(A) for Hermitian A through its eigendecomposition.
CMat hermitian_function(const CMat& a, double (*f)(double));
CMat hermitian_exp(const CMat& a);
CMat hermitian_inv_sqrt(const CMat& a);
CMat hermitian_sqrt(const CMat& a);

/// Inverse of a Hermitian positive-definite matrix.
CMat spd_inverse(const CMat& a);

}  // namespace klab
