#pragma once

#include <stdexcept>
#include <vector>

#include "bslab/scaled.hpp"

namespace bslab {

// Dense complex matrix, column-major (LAPACK layout).
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {}

  int rows() const { return r_; }
  int cols() const { return c_; }
  Complex& operator()(int i, int j) { return a_[size_t(j) * r_ + i]; }
  const Complex& operator()(int i, int j) const { return a_[size_t(j) * r_ + i]; }
  Complex* data() { return a_.data(); }
  const Complex* data() const { return a_.data(); }

  double frobenius() const;
  Complex trace() const;

 private:
  int r_ = 0, c_ = 0;
  std::vector<Complex> a_;
};

CMatrix matmul(const CMatrix& A, const CMatrix& B);

struct EigResult {
  std::vector<Complex> values;
  CMatrix vectors;      // right eigenvectors, column i for values[i]
  double max_residual;  // max_i ||A v_i - lambda_i v_i||_2 / ||A||_F
};

struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full nonsymmetric eigendecomposition (LAPACK zgeev).
EigResult eigen_dense(const CMatrix& A);

// log det(I + A) via LU with partial pivoting; branch of the log is the sum of
// per-pivot principal logs, so only exp() and the real part are meaningful.
Complex logdet_lu_IplusA(const CMatrix& A);

}  // namespace bslab
