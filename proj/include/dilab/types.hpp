#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>

namespace dilab {

using Scalar = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<Scalar>;
using Triplet = Eigen::Triplet<Scalar>;

// Default tolerances. Callers may override per operation.
struct Tolerances {
  double rel = 1e-9;      // commutation residual accepted in a representation
  double unitary = 1e-10; // ||u*u - I|| accepted for relation matrices
  double interior = 1e-9; // residuals on the interior of a truncation
  double psd = 1e-10;     // eigenvalue clamp for PSD square roots
};

inline const Tolerances& default_tol() {
  static const Tolerances t{};
  return t;
}

}  // namespace dilab
