#pragma once

// Homogeneous geometry of Gr_p(C^n) in the adapted-frame picture.
//
// A point carries orthonormal frames for S and for its orthogonal complement,
// which realizes the quotient Q. A (1,0) tangent vector is a q x p matrix,
// the Hom(S, Q) representative in those frames. With this identification the
// bundle second fundamental forms are H_U = U and K_Vbar = -V^*, and every
// curvature below is a closed-form matrix product.
//
// Sign conventions are fixed so that the holomorphic sectional curvature of
// Gr_{n-1}(C^n) is +2 and -H_U K_Ubar = U U^*.

#include "grasspinch/linalg.hpp"

#include <cstdint>
#include <memory>
#include <random>

namespace grasspinch {

class GrassmannPoint {
 public:
  GrassmannPoint(ComplexMatrix frameS, ComplexMatrix frameQ)
      : frameS_(std::move(frameS)), frameQ_(std::move(frameQ)) {
    require_dims(frameS_.rows() == frameQ_.rows(), "frame row counts differ");
    require_dims(frameS_.cols() >= 1 && frameQ_.cols() >= 1, "p and q must be positive");
  }

  /// Point spanned by the columns of `spanning` (any full-rank n x p matrix).
  static GrassmannPoint from_span(const ComplexMatrix& spanning) {
    if (spanning.cols() >= spanning.rows()) {
      throw DimensionError("GrassmannPoint: need p < n");
    }
    ComplexMatrix s = orthonormalize(spanning);
    ComplexMatrix q = orthonormal_complement(s);
    return GrassmannPoint(std::move(s), std::move(q));
  }

  /// The point whose frames are the first p and last q coordinate axes.
  static GrassmannPoint standard(int n, int p) {
    if (p < 1 || p >= n) throw DimensionError("GrassmannPoint: need 0 < p < n");
    ComplexMatrix id = ComplexMatrix::Identity(n, n);
    return GrassmannPoint(id.leftCols(p), id.rightCols(n - p));
  }

  int n() const { return int(frameS_.rows()); }
  int p() const { return int(frameS_.cols()); }
  int q() const { return int(frameQ_.cols()); }
  const ComplexMatrix& frameS() const { return frameS_; }
  const ComplexMatrix& frameQ() const { return frameQ_; }
  ComplexMatrix projectorS() const { return frameS_ * frameS_.adjoint(); }
  ComplexMatrix projectorQ() const { return frameQ_ * frameQ_.adjoint(); }

  /// Largest deviation of [frameS | frameQ] from unitarity.
  double frame_defect() const {
    ComplexMatrix g(n(), n());
    g << frameS_, frameQ_;
    return (g.adjoint() * g - ComplexMatrix::Identity(n(), n())).cwiseAbs().maxCoeff();
  }

  /// Re-gauged copy: frames rotated by a in U(p) and b in U(q).
  GrassmannPoint regauged(const ComplexMatrix& a, const ComplexMatrix& b) const {
    return GrassmannPoint(frameS_ * a, frameQ_ * b);
  }

  /// Same plane as `other` up to 1e-10 in projector distance.
  bool same_plane(const GrassmannPoint& other, double tol = 1e-10) const {
    return n() == other.n() && p() == other.p() &&
           (projectorS() - other.projectorS()).cwiseAbs().maxCoeff() < tol;
  }

 private:
  ComplexMatrix frameS_;
  ComplexMatrix frameQ_;
};

/// A (1,0) tangent vector at `base`, stored as its q x p Hom(S,Q) matrix.
struct AmbientTangent {
  std::shared_ptr<const GrassmannPoint> base;
  ComplexMatrix mat;

  AmbientTangent(std::shared_ptr<const GrassmannPoint> b, ComplexMatrix m)
      : base(std::move(b)), mat(std::move(m)) {
    require_dims(mat.rows() == base->q() && mat.cols() == base->p(),
                 "tangent matrix must be q x p");
  }

  /// Representative as an endomorphism of C^n supported on S -> Q.
  ComplexMatrix ambient() const { return base->frameQ() * mat * base->frameS().adjoint(); }

  /// Tangent at `base` from an ambient n x n representative.
  static AmbientTangent from_ambient(std::shared_ptr<const GrassmannPoint> b,
                                     const ComplexMatrix& amb) {
    ComplexMatrix m = b->frameQ().adjoint() * amb * b->frameS();
    return AmbientTangent(std::move(b), std::move(m));
  }

  AmbientTangent scaled(cplx s) const { return AmbientTangent(base, s * mat); }
};

/// Hom(S_x, Q_x) value: a q x p matrix.
struct HomSQ {
  std::shared_ptr<const GrassmannPoint> base;
  ComplexMatrix mat;
  ComplexVector apply(const ComplexVector& s) const { return mat * s; }
};

/// Hom(Q_x, S_x) value: a p x q matrix.
struct HomQS {
  std::shared_ptr<const GrassmannPoint> base;
  ComplexMatrix mat;
  ComplexVector apply(const ComplexVector& t) const { return mat * t; }
};

namespace detail {
inline void require_same_base(const AmbientTangent& a, const AmbientTangent& b) {
  if (a.base != b.base && !a.base->same_plane(*b.base, 1e-12)) {
    throw DimensionError("tangent vectors live at different base points");
  }
  require_dims(a.mat.rows() == b.mat.rows() && a.mat.cols() == b.mat.cols(),
               "tangent shapes differ");
}
}  // namespace detail

/// Coefficients of w in frameS (the section pi_S(w) at x).
inline ComplexVector project_S(const GrassmannPoint& x, const ComplexVector& w) {
  require_dims(w.size() == x.n(), "project_S: vector length must be n");
  return x.frameS().adjoint() * w;
}

/// Coefficients of w in frameQ (the section pi_Q(w) at x).
inline ComplexVector project_Q(const GrassmannPoint& x, const ComplexVector& w) {
  require_dims(w.size() == x.n(), "project_Q: vector length must be n");
  return x.frameQ().adjoint() * w;
}

inline ComplexVector inject_S(const GrassmannPoint& x, const ComplexVector& s) {
  return x.frameS() * s;
}
inline ComplexVector inject_Q(const GrassmannPoint& x, const ComplexVector& t) {
  return x.frameQ() * t;
}

/// h_Gr(U, V) = trace(V^* U).
inline cplx metric(const AmbientTangent& u, const AmbientTangent& v) {
  detail::require_same_base(u, v);
  return hdot(u.mat, v.mat);
}

inline double norm(const AmbientTangent& u) { return std::sqrt(std::real(metric(u, u))); }

inline HomSQ second_ff_H(const AmbientTangent& u) { return HomSQ{u.base, u.mat}; }

/// K_Ubar = -(H_U)^*.
inline HomQS second_ff_K(const AmbientTangent& u) {
  return HomQS{u.base, -u.mat.adjoint()};
}

/// Metric through the trace formula -trace_Q(H_U K_Vbar).
inline cplx metric_trace_formula(const AmbientTangent& u, const AmbientTangent& v) {
  detail::require_same_base(u, v);
  return -(second_ff_H(u).mat * second_ff_K(v).mat).trace();
}

/// Metric as sum over the standard basis w_A of h_Q(H_U s_A, H_V s_A).
inline cplx metric_section_sum(const AmbientTangent& u, const AmbientTangent& v) {
  detail::require_same_base(u, v);
  const GrassmannPoint& x = *u.base;
  cplx sum(0.0);
  for (int a = 0; a < x.n(); ++a) {
    const ComplexVector s = project_S(x, ComplexVector::Unit(x.n(), a));
    sum += (second_ff_H(v).apply(s)).dot(second_ff_H(u).apply(s));
  }
  return sum;
}

/// R^S(U, Vbar) = K_Vbar H_U as a p x p operator.
inline ComplexMatrix curvature_S(const AmbientTangent& u, const AmbientTangent& v) {
  detail::require_same_base(u, v);
  return second_ff_K(v).mat * second_ff_H(u).mat;
}

/// R^Q(U, Vbar) = -H_U K_Vbar as a q x q operator.
inline ComplexMatrix curvature_Q(const AmbientTangent& u, const AmbientTangent& v) {
  detail::require_same_base(u, v);
  return -second_ff_H(u).mat * second_ff_K(v).mat;
}

/// R^Gr(U, Vbar) Z = -H_Z K_Vbar H_U - H_U K_Vbar H_Z.
inline AmbientTangent curvature_Gr(const AmbientTangent& u, const AmbientTangent& v,
                                   const AmbientTangent& z) {
  detail::require_same_base(u, v);
  detail::require_same_base(u, z);
  const ComplexMatrix k = second_ff_K(v).mat;
  ComplexMatrix r = -(z.mat * k * u.mat) - u.mat * k * z.mat;
  return AmbientTangent(u.base, std::move(r));
}

/// Same closed form on ambient n x n representatives (gauge-free).
inline ComplexMatrix curvature_Gr_ambient(const ComplexMatrix& u, const ComplexMatrix& v,
                                          const ComplexMatrix& z) {
  return z * v.adjoint() * u + u * v.adjoint() * z;
}

/// Holomorphic sectional curvature of a unit (1,0) vector.
inline double hol_sectional(const AmbientTangent& u, double unitTol = 1e-10) {
  const double h = std::real(metric(u, u));
  if (std::abs(h - 1.0) > unitTol) {
    throw NonUnitError("hol_sectional: tangent vector is not unit");
  }
  return std::real(metric(curvature_Gr(u, u, u), u));
}

/// Hol of the direction of a nonzero ambient representative, normalized.
inline double hol_sectional_ambient(const ComplexMatrix& u) {
  const double h = u.squaredNorm();
  const ComplexMatrix uu = u * u.adjoint();
  return 2.0 * std::real((uu * uu).trace()) / (h * h);
}

inline ComplexMatrix random_gaussian(std::mt19937_64& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  }
  return m;
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index k) {
  return orthonormalize(random_gaussian(rng, k, k));
}

inline GrassmannPoint random_point(int n, int p, std::uint64_t seed) {
  if (p < 1 || p >= n) throw DimensionError("random_point: need 0 < p < n");
  std::mt19937_64 rng(seed);
  return GrassmannPoint::from_span(random_gaussian(rng, n, p));
}

inline AmbientTangent random_tangent(std::shared_ptr<const GrassmannPoint> base,
                                     std::uint64_t seed, bool unit = true) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  ComplexMatrix m = random_gaussian(rng, base->q(), base->p());
  if (unit) m /= m.norm();
  return AmbientTangent(std::move(base), std::move(m));
}

}  // namespace grasspinch
