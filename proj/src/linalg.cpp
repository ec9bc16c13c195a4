#include "klab/linalg.hpp"

#include <cmath>
#include <sstream>

namespace klab {

double hermitian_defect(const CMat& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

RVec hermitian_eigenvalues(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const CMat& a) { return hermitian_eigenvalues(a)(0); }

double op_norm_hermitian(const CMat& a) {
  if (a.size() == 0) return 0.0;
  return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
}

double condition_number(const CMat& a) {
  RVec ev = hermitian_eigenvalues(a);
  if (ev(0) <= 0.0) return std::numeric_limits<double>::infinity();
  return ev(ev.size() - 1) / ev(0);
}

CMat guarded_cholesky(const CMat& a, double max_condition, const std::string& what) {
  const double cond = condition_number(a);
  if (!(cond <= max_condition)) {
    std::ostringstream os;
    os << what << ": Gram matrix condition number " << cond << " exceeds " << max_condition
       << "; increase the quadrature budget or lower k";
    throw NumericalGuardError(os.str());
  }
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw NumericalGuardError(what + ": Cholesky failed");
  return llt.matrixL();
}

CMat hermitian_function(const CMat& a, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
  RVec d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMat hermitian_exp(const CMat& a) { return hermitian_function(a, [](double x) { return std::exp(x); }); }

CMat hermitian_inv_sqrt(const CMat& a) {
  return hermitian_function(a, [](double x) { return 1.0 / std::sqrt(x); });
}

CMat hermitian_sqrt(const CMat& a) { return hermitian_function(a, [](double x) { return std::sqrt(x); }); }

CMat spd_inverse(const CMat& a) {
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw NumericalGuardError("spd_inverse: matrix not positive definite");
  return llt.solve(CMat::Identity(a.rows(), a.cols()));
}

}  // namespace klab
