#include "bslab/linalg.hpp"

#include <cmath>
#include <string>

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, bslab::Complex* a,
            const int* lda, bslab::Complex* w, bslab::Complex* vl, const int* ldvl,
            bslab::Complex* vr, const int* ldvr, bslab::Complex* work, const int* lwork,
            double* rwork, int* info);
}

namespace bslab {

double CMatrix::frobenius() const {
  double s = 0.0;
  for (const Complex& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

Complex CMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (int i = 0; i < std::min(r_, c_); ++i) t += (*this)(i, i);
  return t;
}

CMatrix matmul(const CMatrix& A, const CMatrix& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: shape mismatch");
  CMatrix C(A.rows(), B.cols());
  for (int j = 0; j < B.cols(); ++j)
    for (int k = 0; k < A.cols(); ++k) {
      Complex b = B(k, j);
      if (b == Complex(0.0, 0.0)) continue;
      for (int i = 0; i < A.rows(); ++i) C(i, j) += A(i, k) * b;
    }
  return C;
}

EigResult eigen_dense(const CMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigen_dense: square matrix required");
  int n = A.rows();
  EigResult res;
  res.values.resize(n);
  res.vectors = CMatrix(n, n);
  res.max_residual = 0.0;
  if (n == 0) return res;

  CMatrix work_a = A;
  int lda = n, ldvl = 1, ldvr = n, info = 0;
  int lwork = 4 * n;
  std::vector<Complex> work(lwork);
  std::vector<double> rwork(2 * n);
  zgeev_("N", "V", &n, work_a.data(), &lda, res.values.data(), nullptr, &ldvl,
         res.vectors.data(), &ldvr, work.data(), &lwork, rwork.data(), &info);
  if (info != 0)
    throw NumericFailure("zgeev failed with info=" + std::to_string(info));

  double anorm = A.frobenius();
  if (anorm > 0.0) {
    for (int j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) {
        Complex av{0.0, 0.0};
        for (int k = 0; k < n; ++k) av += A(i, k) * res.vectors(k, j);
        r2 += std::norm(av - res.values[j] * res.vectors(i, j));
      }
      res.max_residual = std::max(res.max_residual, std::sqrt(r2) / anorm);
    }
  }
  return res;
}

Complex logdet_lu_IplusA(const CMatrix& A) {
  int n = A.rows();
  CMatrix M = A;
  for (int i = 0; i < n; ++i) M(i, i) += 1.0;
  Complex logdet{0.0, 0.0};
  double sign_flips = 0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(M(col, col));
    for (int i = col + 1; i < n; ++i)
      if (std::abs(M(i, col)) > best) {
        best = std::abs(M(i, col));
        piv = i;
      }
    if (best == 0.0) return Complex(-std::numeric_limits<double>::infinity(), 0.0);
    if (piv != col) {
      for (int j = col; j < n; ++j) std::swap(M(col, j), M(piv, j));
      sign_flips += 1;
    }
    logdet += std::log(M(col, col));
    for (int i = col + 1; i < n; ++i) {
      Complex f = M(i, col) / M(col, col);
      if (f == Complex(0.0, 0.0)) continue;
      for (int j = col + 1; j < n; ++j) M(i, j) -= f * M(col, j);
    }
  }
  if (std::fmod(sign_flips, 2.0) == 1.0) logdet += Complex(0.0, M_PI);
  return logdet;
}

}  // namespace bslab
