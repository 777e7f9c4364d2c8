#pragma once

// Submanifold calculus of a holomorphic immersion M -> Gr_p(C^n).
//
// Everything is computed in the gauge-free ambient picture. With F(z) the
// chart map, P_S = F (F^*F)^{-1} F^* and P_Q = I - P_S, the pushforward of the
// chart vector d/dz_i is the n x n matrix X_i = P_Q (d_i F)(F^*F)^{-1} F^*,
// a section of Hom(S, Q). The Levi-Civita connection of the Grassmannian acts
// on such sections as Y -> P_Q (dY) P_S. Tangential and normal parts are taken
// with respect to the span of the X_i and the pairing tr(B^* A).
//
// Fields are truncated Taylor series around the base point in the Wirtinger
// variables of a few chart directions, so every derivative is exact up to
// rounding. LocalGeometry builds those series; the free functions below
// assemble the second fundamental form, the shape operator, covariant
// derivatives and curvatures from them.

#include "grasspinch/immersion.hpp"

#include <memory>
#include <vector>

namespace grasspinch {

namespace detail {

inline TaylorMatrix constant_series(const TaylorSpacePtr& sp, const ComplexMatrix& m) {
  return TaylorMatrix::constant(sp, m);
}

inline TaylorMatrix pack_row(const TaylorSpacePtr& sp, const std::vector<TaylorScalar>& xs) {
  const int m = int(xs.size());
  TaylorMatrix out(sp, ComplexMatrix::Zero(1, m));
  for (int k = 0; k < sp->size(); ++k) {
    bool any = false;
    for (const auto& x : xs) any = any || x.nonzero(k);
    if (!any) continue;
    ComplexMatrix row(1, m);
    for (int i = 0; i < m; ++i) row(0, i) = xs[i].nonzero(k) ? xs[i][k] : cplx(0.0);
    out.set(k, row);
  }
  return out;
}

}  // namespace detail

/**
 * Truncated Taylor expansion of the immersion around one chart point along
 * the chart directions `dirs`. Direction a contributes the Wirtinger pair
 * (d/dt_a, d/ds_a), i.e. derivatives along the (1,0) vector dirs[a] and its
 * conjugate. Each derivative costs one order of exactness, so `order` must be
 * at least the number of derivatives the caller takes before evaluating.
 */
class LocalGeometry {
 public:
  LocalGeometry(const Immersion& f, ChartPoint cp, std::vector<ComplexVector> dirs, int order)
      : m_(f.m()), cp_(std::move(cp)), dirs_(std::move(dirs)),
        space_(taylor_space(int(dirs_.size()), order)) {
    require_dims(cp_.z.size() == m_, "chart point dimension");
    const PolyMatrix& F = f.chart_map(cp_.chart);
    const int n = f.n();
    const TaylorMatrix fs = F.taylor_along(space_, cp_.z, dirs_);
    const TaylorMatrix fsAdj = fs.adjoint();
    const TaylorMatrix ginvFs = inverse(fsAdj * fs) * fsAdj;
    ps_ = fs * ginvFs;
    pq_ = detail::constant_series(space_, ComplexMatrix::Identity(n, n)) - ps_;
    for (int i = 0; i < m_; ++i) {
      const TaylorMatrix di = F.partial(i).taylor_along(space_, cp_.z, dirs_);
      basis_.push_back(pq_ * di * ginvFs);
    }
    TaylorMatrix h(space_, ComplexMatrix::Zero(m_, m_));
    std::vector<std::vector<TaylorScalar>> hs(m_, std::vector<TaylorScalar>(m_));
    for (int i = 0; i < m_; ++i) {
      for (int j = i; j < m_; ++j) {
        hs[i][j] = hdot(basis_[i], basis_[j]);
        if (j != i) hs[j][i] = hs[i][j].adjoint();
      }
    }
    for (int k = 0; k < space_->size(); ++k) {
      ComplexMatrix c(m_, m_);
      for (int i = 0; i < m_; ++i) {
        for (int j = 0; j < m_; ++j) c(i, j) = hs[i][j][k];
      }
      h.set(k, c);
    }
    metric_ = h;
    metricInv_ = inverse(h);
    point_ = std::make_shared<const GrassmannPoint>(GrassmannPoint::from_span(fs.value()));
  }

  const TaylorSpacePtr& space() const { return space_; }
  int m() const { return m_; }
  const ChartPoint& chart_point() const { return cp_; }
  const std::shared_ptr<const GrassmannPoint>& point() const { return point_; }
  int var(int dir, bool bar) const {
    return bar ? space_->antiholomorphic_var(dir) : space_->holomorphic_var(dir);
  }

  const TaylorMatrix& basis_field(int i) const { return basis_.at(i); }
  const TaylorMatrix& projector_S() const { return ps_; }
  const TaylorMatrix& projector_Q() const { return pq_; }
  /// Series of the m x m matrix h(d/dz_i, d/dz_j).
  const TaylorMatrix& metric() const { return metric_; }

  /// Pushforward of a constant-coefficient chart vector field.
  TaylorMatrix tangent_field(const ComplexVector& u) const {
    require_dims(u.size() == m_, "chart vector dimension");
    TaylorMatrix out(space_, basis_[0].value());
    for (int i = 0; i < m_; ++i) {
      if (u(i) != cplx(0.0)) out += u(i) * basis_[i];
    }
    return out;
  }

  /// Pushforward of a chart vector field given by a 1 x m row of series.
  TaylorMatrix tangent_field(const TaylorMatrix& coordsRow) const {
    TaylorMatrix out(space_, basis_[0].value());
    for (int i = 0; i < m_; ++i) out += component(coordsRow, 0, i) * basis_[i];
    return out;
  }

  /// Chart coordinates (1 x m row) of the tangential part of an ambient field.
  TaylorMatrix coords(const TaylorMatrix& y) const {
    std::vector<TaylorScalar> b;
    for (int j = 0; j < m_; ++j) b.push_back(hdot(y, basis_[j]));
    return detail::pack_row(space_, b) * metricInv_;
  }

  TaylorMatrix tangential(const TaylorMatrix& y) const { return tangent_field(coords(y)); }
  TaylorMatrix normal(const TaylorMatrix& y) const { return y - tangential(y); }

  /// Ambient covariant derivative P_Q (d Y) P_S along direction `dir`.
  TaylorMatrix connection(const TaylorMatrix& y, int dir, bool bar) const {
    return pq_ * y.derivative(var(dir, bar)) * ps_;
  }

  /// Normal field extending `ambient` (n x n, normal at the base point).
  TaylorMatrix normal_extension(const ComplexMatrix& ambient) const {
    return normal(pq_ * detail::constant_series(space_, ambient) * ps_);
  }

  /// n x n ambient form of a q x p tangent matrix at the base point.
  ComplexMatrix ambient(const ComplexMatrix& mat) const {
    return point_->frameQ() * mat * point_->frameS().adjoint();
  }
  /// q x p form of an n x n ambient matrix at the base point.
  ComplexMatrix local(const ComplexMatrix& amb) const {
    return point_->frameQ().adjoint() * amb * point_->frameS();
  }

 private:
  int m_;
  ChartPoint cp_;
  std::vector<ComplexVector> dirs_;
  TaylorSpacePtr space_;
  TaylorMatrix ps_, pq_;
  std::vector<TaylorMatrix> basis_;
  TaylorMatrix metric_, metricInv_;
  std::shared_ptr<const GrassmannPoint> point_;
};

inline ComplexVector row_to_vector(const ComplexMatrix& row) {
  return row.transpose();
}

/// sigma, shape operator, Christoffel symbols and frames at one chart point.
struct FundamentalFormData {
  ChartPoint point;
  std::shared_ptr<const GrassmannPoint> base;
  int q = 0;
  ComplexMatrix metric;                              // h(d_i, d_j)
  std::vector<AmbientTangent> tangentFrame;          // pushforwards of d_i
  std::vector<AmbientTangent> normalFrame;           // orthonormal basis of N
  std::vector<std::vector<ComplexMatrix>> sigma;     // sigma(d_i, d_j), q x p
  std::vector<std::vector<ComplexVector>> christoffel;  // nabla_{d_i} d_j in chart coords
  std::vector<std::vector<ComplexVector>> shape;     // A_{nu_alpha} conj(d_j) in chart coords

  int m() const { return int(metric.rows()); }

  cplx inner(const ComplexVector& u, const ComplexVector& v) const {
    return induced_inner(metric, u, v);
  }
  double norm(const ComplexVector& u) const { return std::sqrt(std::real(inner(u, u))); }

  ComplexMatrix tangent_mat(const ComplexVector& u) const {
    ComplexMatrix out = ComplexMatrix::Zero(base->q(), base->p());
    for (int i = 0; i < m(); ++i) out += u(i) * tangentFrame[i].mat;
    return out;
  }
  AmbientTangent tangent(const ComplexVector& u) const {
    return AmbientTangent(base, tangent_mat(u));
  }

  /// Chart coordinates of the tangential part of a q x p matrix.
  ComplexVector tangential_coords(const ComplexMatrix& y) const {
    ComplexVector b(m());
    for (int j = 0; j < m(); ++j) b(j) = hdot(y, tangentFrame[j].mat);
    return metric.transpose().partialPivLu().solve(b);
  }
  ComplexMatrix normal_part(const ComplexMatrix& y) const {
    return y - tangent_mat(tangential_coords(y));
  }

  ComplexMatrix sigma_mat(const ComplexVector& u, const ComplexVector& v) const {
    ComplexMatrix out = ComplexMatrix::Zero(base->q(), base->p());
    for (int i = 0; i < m(); ++i) {
      for (int j = 0; j < m(); ++j) {
        const cplx c = u(i) * v(j);
        if (c != cplx(0.0)) out += c * sigma[i][j];
      }
    }
    return out;
  }
  AmbientTangent sigma_of(const ComplexVector& u, const ComplexVector& v) const {
    return AmbientTangent(base, sigma_mat(u, v));
  }

  ComplexVector christoffel_of(const ComplexVector& u, const ComplexVector& v) const {
    ComplexVector out = ComplexVector::Zero(m());
    for (int i = 0; i < m(); ++i) {
      for (int j = 0; j < m(); ++j) out += u(i) * v(j) * christoffel[i][j];
    }
    return out;
  }

  /// Chart coordinates of A_xi conj(u); xi must be normal.
  ComplexVector shape_coords(const ComplexMatrix& xi, const ComplexVector& u,
                             double normalTol = 1e-8) const {
    const ComplexVector tc = tangential_coords(xi);
    if (std::sqrt(std::abs(std::real(inner(tc, tc)))) > normalTol) {
      throw DimensionError("shape_operator: xi has a tangential component");
    }
    ComplexVector out = ComplexVector::Zero(m());
    for (int a = 0; a < int(normalFrame.size()); ++a) {
      const cplx c = hdot(xi, normalFrame[a].mat);
      if (c == cplx(0.0)) continue;
      for (int j = 0; j < m(); ++j) out += c * std::conj(u(j)) * shape[a][j];
    }
    return out;
  }
};

/// Builds the first-order data at `cp` from an order-1 expansion along the
/// chart axes.
inline FundamentalFormData fundamental_form_data(const Immersion& f, const ChartPoint& cp) {
  const int m = f.m();
  std::vector<ComplexVector> axes;
  for (int i = 0; i < m; ++i) axes.push_back(ComplexVector::Unit(m, i));
  const LocalGeometry g(f, cp, axes, 1);
  FundamentalFormData d;
  d.point = cp;
  d.base = g.point();
  d.q = f.q();
  d.metric = g.metric().value();
  for (int i = 0; i < m; ++i) {
    d.tangentFrame.emplace_back(d.base, g.local(g.basis_field(i).value()));
  }
  d.sigma.assign(m, std::vector<ComplexMatrix>(m));
  d.christoffel.assign(m, std::vector<ComplexVector>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const ComplexMatrix c = g.local(g.connection(g.basis_field(j), i, false).value());
      d.sigma[i][j] = d.normal_part(c);
      d.christoffel[i][j] = d.tangential_coords(c);
    }
  }
  // Normal frame: orthonormal complement of the tangent image in Hom(S, Q).
  const int q = f.q(), p = f.p();
  const int dim = p * q;
  if (dim > m) {
    ComplexMatrix t(dim, m);
    for (int i = 0; i < m; ++i) {
      t.col(i) = Eigen::Map<const ComplexVector>(d.tangentFrame[i].mat.data(), dim);
    }
    const ComplexMatrix nf = orthonormal_complement(orthonormalize(t));
    for (int a = 0; a < nf.cols(); ++a) {
      ComplexVector col = nf.col(a);
      d.normalFrame.emplace_back(d.base, Eigen::Map<const ComplexMatrix>(col.data(), q, p));
    }
  }
  for (const auto& nu : d.normalFrame) {
    const TaylorMatrix xi = g.normal_extension(g.ambient(nu.mat));
    std::vector<ComplexVector> row;
    for (int j = 0; j < m; ++j) {
      row.push_back(-d.tangential_coords(g.local(g.connection(xi, j, true).value())));
    }
    d.shape.push_back(std::move(row));
  }
  return d;
}

/// sigma(U, V) = normal part of the ambient derivative of f_*V along U.
inline AmbientTangent second_fundamental_form(const Immersion& f, const ChartPoint& cp,
                                              const ComplexVector& u, const ComplexVector& v) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  return d.sigma_of(u, v);
}

/// Normal part of the ambient derivative of f_*V along conj(U); vanishes.
inline AmbientTangent sigma_mixed(const Immersion& f, const ChartPoint& cp,
                                  const ComplexVector& u, const ComplexVector& v) {
  const LocalGeometry g(f, cp, {u}, 1);
  const TaylorMatrix c = g.connection(g.tangent_field(v), 0, true);
  return AmbientTangent(g.point(), g.local(g.normal(c).value()));
}

/// A_xi conj(U) as a tangent vector, computed as minus the tangential part of
/// the ambient derivative of a normal extension of xi along conj(U).
inline AmbientTangent shape_operator(const Immersion& f, const ChartPoint& cp,
                                     const AmbientTangent& xi, const ComplexVector& u) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  return d.tangent(d.shape_coords(xi.mat, u));
}

/// Tangential part of the ambient derivative of a normal extension of xi
/// along the (1,0) vector U; this is A_xi U and vanishes.
inline AmbientTangent shape_operator_holomorphic(const Immersion& f, const ChartPoint& cp,
                                                 const AmbientTangent& xi,
                                                 const ComplexVector& u) {
  const LocalGeometry g(f, cp, {u}, 1);
  const TaylorMatrix e = g.normal_extension(g.ambient(xi.mat));
  return AmbientTangent(g.point(), g.local(-g.tangential(g.connection(e, 0, false)).value()));
}

/// (nabla_W sigma)(U, Z).
inline AmbientTangent nabla_sigma(const Immersion& f, const ChartPoint& cp,
                                  const ComplexVector& w, const ComplexVector& u,
                                  const ComplexVector& z) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const LocalGeometry g(f, cp, {w, u}, 2);
  const TaylorMatrix sigUZ = g.normal(g.connection(g.tangent_field(z), 1, false));
  const ComplexMatrix lead = g.local(g.normal(g.connection(sigUZ, 0, false)).value());
  const ComplexMatrix out =
      lead - d.sigma_mat(d.christoffel_of(w, u), z) - d.sigma_mat(u, d.christoffel_of(w, z));
  return AmbientTangent(d.base, out);
}

/// (nabla_{conj V} sigma)(U, Z); mixed Christoffel terms are computed, not assumed zero.
inline AmbientTangent nabla_bar_sigma(const Immersion& f, const ChartPoint& cp,
                                      const ComplexVector& v, const ComplexVector& u,
                                      const ComplexVector& z) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const LocalGeometry g(f, cp, {v, u}, 2);
  const TaylorMatrix xu = g.tangent_field(u), xz = g.tangent_field(z);
  const TaylorMatrix sigUZ = g.normal(g.connection(xz, 1, false));
  const ComplexMatrix lead = g.local(g.normal(g.connection(sigUZ, 0, true)).value());
  const ComplexVector mixU = row_to_vector(g.coords(g.connection(xu, 0, true)).value());
  const ComplexVector mixZ = row_to_vector(g.coords(g.connection(xz, 0, true)).value());
  return AmbientTangent(d.base, lead - d.sigma_mat(mixU, z) - d.sigma_mat(u, mixZ));
}

/// -(R^Gr(U, conj V) Z)^perp at the base point.
inline AmbientTangent curvature_normal_part(const FundamentalFormData& d, const ComplexVector& u,
                                            const ComplexVector& v, const ComplexVector& z) {
  const ComplexMatrix r = curvature_Gr(d.tangent(u), d.tangent(v), d.tangent(z)).mat;
  return AmbientTangent(d.base, -d.normal_part(r));
}

/// h(R^M(U, conj V) Z, W) from the induced metric alone.
inline cplx intrinsic_curvature(const Immersion& f, const ChartPoint& cp, const ComplexVector& u,
                                const ComplexVector& v, const ComplexVector& z,
                                const ComplexVector& w) {
  const LocalGeometry g(f, cp, {u, v}, 2);
  const TaylorMatrix& h = g.metric();
  const TaylorMatrix du = h.derivative(g.var(0, false));
  const TaylorMatrix dvb = h.derivative(g.var(1, true));
  const ComplexMatrix dudvb = du.derivative(g.var(1, true)).value();
  const ComplexMatrix r =
      -dudvb + du.value() * h.value().partialPivLu().solve(dvb.value());
  return (z.transpose() * r * w.conjugate())(0, 0);
}

/// |h(R^M(U,V)Z,W) - h(R^Gr(U,V)Z,W) + h(sigma(U,Z), sigma(V,W))|.
inline double gauss_equation_residual(const Immersion& f, const ChartPoint& cp,
                                      const ComplexVector& u, const ComplexVector& v,
                                      const ComplexVector& z, const ComplexVector& w) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const cplx lhs = intrinsic_curvature(f, cp, u, v, z, w);
  const cplx gr = metric(curvature_Gr(d.tangent(u), d.tangent(v), d.tangent(z)), d.tangent(w));
  const cplx ss = hdot(d.sigma_mat(u, z), d.sigma_mat(v, w));
  return std::abs(lhs - (gr - ss));
}

/// h(R^N(U, conj V) xi, eta) from the normal connection.
inline cplx normal_curvature(const Immersion& f, const ChartPoint& cp, const ComplexVector& u,
                             const ComplexVector& v, const AmbientTangent& xi,
                             const AmbientTangent& eta) {
  const LocalGeometry g(f, cp, {u, v}, 2);
  const TaylorMatrix e = g.normal_extension(g.ambient(xi.mat));
  const TaylorMatrix dvb = g.normal(g.connection(e, 1, true));
  const TaylorMatrix du = g.normal(g.connection(e, 0, false));
  const TaylorMatrix a = g.normal(g.connection(dvb, 0, false));
  const TaylorMatrix b = g.normal(g.connection(du, 1, true));
  return hdot(g.local(a.value() - b.value()), eta.mat);
}

/// |h(R^N(U,V)xi,eta) - h(R^Gr(U,V)xi,eta) - h(A_xi V, A_eta U)|.
inline double ricci_equation_residual(const Immersion& f, const ChartPoint& cp,
                                      const ComplexVector& u, const ComplexVector& v,
                                      const AmbientTangent& xi, const AmbientTangent& eta) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const cplx lhs = normal_curvature(f, cp, u, v, xi, eta);
  const AmbientTangent xiAt(d.base, xi.mat), etaAt(d.base, eta.mat);
  const cplx gr = metric(curvature_Gr(d.tangent(u), d.tangent(v), xiAt), etaAt);
  const cplx aa = d.inner(d.shape_coords(xi.mat, v), d.shape_coords(eta.mat, u));
  return std::abs(lhs - (gr + aa));
}

struct HolM {
  double intrinsic = 0.0;
  double extrinsic = 0.0;
  bool normalized = false;  // input was not unit and has been rescaled
};

inline double hol_M_extrinsic(const FundamentalFormData& d, const ComplexVector& u) {
  const double h = std::real(d.inner(u, u));
  const double hol = hol_sectional_ambient(d.tangent_mat(u));
  return hol - d.sigma_mat(u, u).squaredNorm() / (h * h);
}

/// Hol^M(u) intrinsically from the metric and extrinsically as Hol^Gr - |sigma|^2.
inline HolM hol_M(const Immersion& f, const ChartPoint& cp, const ComplexVector& u) {
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const double h = std::real(d.inner(u, u));
  if (h <= 0.0) throw NonUnitError("hol_M: zero tangent vector");
  HolM out;
  out.normalized = std::abs(h - 1.0) > 1e-10;
  const ComplexVector e = u / std::sqrt(h);
  out.intrinsic = std::real(intrinsic_curvature(f, cp, e, e, e, e));
  out.extrinsic = hol_M_extrinsic(d, e);
  return out;
}

/// Both sides of the second-variation identity for T(U,V,Z,W) = h(sigma(U,V), sigma(Z,W))
/// at a unit vector u, plus the pieces of the right-hand side.
struct SecondVariation {
  cplx lhs;                    // (nabla^2 T)(conj u, u; u, u, conj u, conj u)
  double rhs = 0.0;            // (3/q)(|sigma|^2 - q |A_sigma conj u|^2) + |nabla sigma(u,u,u)|^2
  double sigmaNormSq = 0.0;    // |sigma(u,u)|^2
  double shapeNormSq = 0.0;    // |A_{sigma(u,u)} conj u|^2
  double nablaSigmaNormSq = 0.0;
  cplx firstDerivative;        // (nabla T)(conj u; u, u, conj u, conj u), not phase invariant
  ComplexVector unit;          // the normalized input
};

inline ComplexVector normalize_chart(const Immersion& f, const ChartPoint& cp,
                                     const ComplexVector& u) {
  const ComplexMatrix h = induced_metric(pushforward_basis(f, cp));
  const double n2 = std::real(induced_inner(h, u, u));
  if (n2 <= 0.0) throw NonUnitError("zero tangent vector");
  return u / std::sqrt(n2);
}

inline SecondVariation second_variation(const Immersion& f, const ChartPoint& cp,
                                        const ComplexVector& u0) {
  SecondVariation out;
  const ComplexVector u = normalize_chart(f, cp, u0);
  out.unit = u;
  const LocalGeometry g(f, cp, {u}, 3);
  const int dz = g.var(0, false), dzb = g.var(0, true);
  const TaylorMatrix xu = g.tangent_field(u);
  const TaylorMatrix c = g.connection(xu, 0, false);
  const TaylorMatrix sig = g.normal(c);
  const TaylorMatrix gam = g.coords(c);
  const TaylorMatrix sigGam = g.normal(g.connection(g.tangent_field(gam), 0, false));
  const TaylorScalar t = hdot(sig, sig);
  const TaylorScalar g1 = t.derivative(dz) - 2.0 * hdot(sigGam, sig);
  const ComplexVector w = row_to_vector(gam.value());
  const TaylorMatrix sigW = g.normal(g.connection(g.tangent_field(w), 0, false));
  const TaylorScalar g2 = hdot(sig, sigW);
  const cplx cross = hdot(sigGam.value(), sigW.value());
  out.lhs = g1.derivative(dzb).value() - 2.0 * (g2.derivative(dz).value() - 2.0 * cross);
  out.firstDerivative = t.derivative(dzb).value() - 2.0 * hdot(sig.value(), sigW.value());

  const ComplexMatrix s0 = sig.value();
  out.sigmaNormSq = std::real(hdot(s0, s0));
  const TaylorMatrix xi = g.normal_extension(s0);
  const ComplexVector a = -row_to_vector(g.coords(g.connection(xi, 0, true)).value());
  out.shapeNormSq = std::real(induced_inner(g.metric().value(), a, a));
  const ComplexMatrix ns = g.normal(g.connection(sig, 0, false)).value() - 2.0 * sigGam.value();
  out.nablaSigmaNormSq = std::real(hdot(ns, ns));
  const double q = f.q();
  out.rhs = 3.0 / q * (out.sigmaNormSq - q * out.shapeNormSq) + out.nablaSigmaNormSq;
  return out;
}

/// |nabla sigma(u, u, u)| for a unit u, from a second-order expansion along u.
inline double nabla_sigma_cubic_norm(const Immersion& f, const ChartPoint& cp,
                                     const ComplexVector& u0) {
  const ComplexVector u = normalize_chart(f, cp, u0);
  const LocalGeometry g(f, cp, {u}, 2);
  const TaylorMatrix c = g.connection(g.tangent_field(u), 0, false);
  const TaylorMatrix sig = g.normal(c);
  const TaylorMatrix sigGam = g.normal(g.connection(g.tangent_field(g.coords(c)), 0, false));
  const ComplexMatrix ns = g.normal(g.connection(sig, 0, false)).value() - 2.0 * sigGam.value();
  return ns.norm();
}

}  // namespace grasspinch
