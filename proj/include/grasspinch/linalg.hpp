#pragma once

// Dense complex linear algebra shared by every module: matrix aliases, the
// error hierarchy, tolerance tiers, the deterministic orthonormalizer and the
// extreme eigenpair used by the pinching analysis.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace grasspinch {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};
class ConventionError : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class DifferentiationError : public Error {
 public:
  using Error::Error;
};
class NonUnitError : public Error {
 public:
  using Error::Error;
};

/// Tolerance tiers. Each extra differentiation costs about two digits.
struct Tolerances {
  double algebraic = 1e-10;
  double firstDerivative = 1e-6;
  double secondDerivative = 1e-4;
  double normalCurvature = 1e-3;
  double frame = 1e-12;
  double flatnessGate = 1e-6;
  double pinch = 1e-3;
  double parallel = 1e-3;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError("dimension mismatch: " + what);
}

/// Frobenius inner product tr(B* A), linear in the first slot.
inline cplx hdot(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (b.conjugate().cwiseProduct(a)).sum();
}

/**
 * Gram-Schmidt with one reorthogonalization pass. The triangular factor has a
 * positive real diagonal, which fixes the U(p) gauge of the result so that the
 * same column span always yields the same frame.
 */
inline ComplexMatrix orthonormalize(const ComplexMatrix& a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (cols > rows || cols == 0) {
    throw DimensionError("orthonormalize: need 0 < cols <= rows");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  if (svd.singularValues()(cols - 1) <= 1e-12 * scale) {
    throw DegenerateFrameError("orthonormalize: rank-deficient input");
  }
  ComplexMatrix b = a;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const cplx r = b.col(i).dot(b.col(j));
        b.col(j) -= r * b.col(i);
      }
    }
    const double nrm = b.col(j).norm();
    if (nrm <= 1e-14 * scale) {
      throw DegenerateFrameError("orthonormalize: rank-deficient input");
    }
    b.col(j) /= nrm;
  }
  return b;
}

/**
 * Deterministic orthonormal completion of an orthonormal frame: repeatedly
 * picks the standard basis vector with the largest residual against the
 * current span (lowest index on ties).
 */
inline ComplexMatrix orthonormal_complement(const ComplexMatrix& frame) {
  const Eigen::Index n = frame.rows();
  const Eigen::Index k = n - frame.cols();
  ComplexMatrix basis(n, frame.cols() + k);
  basis.leftCols(frame.cols()) = frame;
  Eigen::Index filled = frame.cols();
  ComplexMatrix out(n, k);
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1.0;
    ComplexVector bestVec;
    for (Eigen::Index e = 0; e < n; ++e) {
      ComplexVector v = ComplexVector::Unit(n, e);
      for (int pass = 0; pass < 2; ++pass) {
        v -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * v);
      }
      const double r = v.norm();
      if (r > best + 1e-12) {
        best = r;
        bestVec = v;
      }
    }
    bestVec /= best;
    out.col(step) = bestVec;
    basis.col(filled++) = bestVec;
  }
  return out;
}

template <class Scalar>
struct Eigenpair {
  double value;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
};

/// Largest eigenvalue of a symmetric (or Hermitian) matrix and a unit
/// eigenvector whose first nonzero component is positive real.
template <class Derived>
Eigenpair<typename Derived::Scalar> max_hermitian_eigenpair(
    const Eigen::MatrixBase<Derived>& b, double symmetryTol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (b.rows() != b.cols() || b.rows() == 0) {
    throw DimensionError("max_hermitian_eigenpair: square input required");
  }
  const Mat m = b;
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > symmetryTol * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw ConventionError("max_hermitian_eigenpair: operator is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(Mat(0.5 * (m + m.adjoint())));
  const Eigen::Index last = m.rows() - 1;
  Eigenpair<Scalar> out{solver.eigenvalues()(last), solver.eigenvectors().col(last)};
  out.vector.normalize();
  for (Eigen::Index i = 0; i < out.vector.size(); ++i) {
    const double mag = std::abs(out.vector(i));
    if (mag > 1e-12) {
      if constexpr (std::is_same_v<Scalar, double>) {
        if (out.vector(i) < 0) out.vector = -out.vector;
      } else {
        out.vector *= std::conj(out.vector(i)) / mag;
      }
      break;
    }
  }
  return out;
}

}  // namespace grasspinch
