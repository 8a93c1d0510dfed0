#include "shapecalc/fem.hpp"

#include <umfpack.h>

#include <array>
#include <sstream>

namespace shapecalc::fem {

SparseLU::SparseLU(const SpMat& A) : A_(A) {
  if (A_.rows() != A_.cols()) throw SolverError("SparseLU: matrix must be square");
  A_.makeCompressed();
  std::array<double, UMFPACK_CONTROL> control{};
  std::array<double, UMFPACK_INFO> info{};
  umfpack_di_defaults(control.data());
  void* symbolic = nullptr;
  const int n = static_cast<int>(A_.rows());
  int status = umfpack_di_symbolic(n, n, A_.outerIndexPtr(), A_.innerIndexPtr(), A_.valuePtr(), &symbolic,
                                   control.data(), info.data());
  if (status != UMFPACK_OK) throw SolverError("UMFPACK symbolic analysis failed (status " + std::to_string(status) + ")");
  status = umfpack_di_numeric(A_.outerIndexPtr(), A_.innerIndexPtr(), A_.valuePtr(), symbolic, &numeric_,
                              control.data(), info.data());
  umfpack_di_free_symbolic(&symbolic);
  rcond_ = info[UMFPACK_RCOND];
  if (status != UMFPACK_OK) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    std::ostringstream os;
    os << "UMFPACK factorization failed (status " << status << ", reciprocal condition estimate " << rcond_ << ")";
    throw SolverError(os.str());
  }
}

SparseLU::~SparseLU() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b) const {
  if (b.size() != A_.rows()) throw SolverError("SparseLU: right-hand side has wrong size");
  Eigen::VectorXd x(b.size());
  std::array<double, UMFPACK_INFO> info{};
  const int status = umfpack_di_solve(UMFPACK_A, A_.outerIndexPtr(), A_.innerIndexPtr(), A_.valuePtr(), x.data(),
                                      b.data(), numeric_, nullptr, info.data());
  if (status != UMFPACK_OK) {
    std::ostringstream os;
    os << "UMFPACK solve failed (status " << status << ", reciprocal condition estimate " << rcond_ << ")";
    throw SolverError(os.str());
  }
  return x;
}

}  // namespace shapecalc::fem
