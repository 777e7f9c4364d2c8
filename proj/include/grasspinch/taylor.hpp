#pragma once

// Truncated multivariate Taylor series in Wirtinger variables.
//
// A TaylorSpace over r complex directions carries 2r formal variables
// (t_1..t_r, s_1..s_r) standing for z - z0 along each direction and its
// conjugate. Real-analytic functions of (z, conj z) expand uniquely in these,
// so d/dt_a and d/ds_a of a series are exactly the Wirtinger derivatives
// d/dz and d/dconj(z) along direction a. Products, inverses and adjoints are
// exact up to the truncation order; every derivative lowers the order to
// which a series is exact by one.

#include "grasspinch/linalg.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace grasspinch {

class TaylorSpace {
 public:
  struct Product {
    int lhs, rhs, out;
  };
  struct DerivEntry {
    int from, to;
    double factor;
  };

  TaylorSpace(int directions, int order) : directions_(directions), order_(order) {
    if (directions < 1 || order < 0) throw DimensionError("TaylorSpace: bad shape");
    const int nv = 2 * directions;
    std::vector<int> e(nv, 0);
    // Graded enumeration: all exponent vectors of total degree d, d = 0..order.
    for (int d = 0; d <= order; ++d) enumerate(e, 0, d);
    std::map<std::vector<int>, int> lookup;
    for (int k = 0; k < size(); ++k) lookup[exps_[k]] = k;

    for (int i = 0; i < size(); ++i) {
      for (int j = 0; j < size(); ++j) {
        if (degree_[i] + degree_[j] > order) continue;
        std::vector<int> s(nv);
        for (int v = 0; v < nv; ++v) s[v] = exps_[i][v] + exps_[j][v];
        products_.push_back({i, j, lookup.at(s)});
      }
    }
    std::sort(products_.begin(), products_.end(),
              [](const Product& a, const Product& b) {
                return a.out != b.out ? a.out < b.out
                                      : (a.lhs != b.lhs ? a.lhs < b.lhs : a.rhs < b.rhs);
              });
    productStart_.assign(size() + 1, 0);
    for (const auto& p : products_) ++productStart_[p.out + 1];
    for (int k = 0; k < size(); ++k) productStart_[k + 1] += productStart_[k];

    derivs_.resize(nv);
    for (int v = 0; v < nv; ++v) {
      for (int k = 0; k < size(); ++k) {
        if (exps_[k][v] == 0) continue;
        std::vector<int> t = exps_[k];
        --t[v];
        derivs_[v].push_back({k, lookup.at(t), double(exps_[k][v])});
      }
    }
    conj_.resize(size());
    for (int k = 0; k < size(); ++k) {
      std::vector<int> c(nv);
      for (int a = 0; a < directions; ++a) {
        c[a] = exps_[k][directions + a];
        c[directions + a] = exps_[k][a];
      }
      conj_[k] = lookup.at(c);
    }
    units_.resize(nv);
    for (int v = 0; v < nv; ++v) {
      std::vector<int> u(nv, 0);
      if (order >= 1) {
        u[v] = 1;
        units_[v] = lookup.at(u);
      } else {
        units_[v] = -1;
      }
    }
    lookup_ = std::move(lookup);
  }

  int directions() const { return directions_; }
  int variables() const { return 2 * directions_; }
  int order() const { return order_; }
  int size() const { return int(exps_.size()); }
  const std::vector<int>& exponent(int k) const { return exps_[k]; }
  int degree(int k) const { return degree_[k]; }
  const std::vector<Product>& products() const { return products_; }
  int product_begin(int out) const { return productStart_[out]; }
  int product_end(int out) const { return productStart_[out + 1]; }
  const std::vector<DerivEntry>& derivative(int var) const { return derivs_[var]; }
  int conj_index(int k) const { return conj_[k]; }
  int unit(int var) const { return units_[var]; }
  int find(const std::vector<int>& e) const {
    auto it = lookup_.find(e);
    return it == lookup_.end() ? -1 : it->second;
  }
  int holomorphic_var(int direction) const { return direction; }
  int antiholomorphic_var(int direction) const { return directions_ + direction; }

 private:
  void enumerate(std::vector<int>& e, int pos, int remaining) {
    if (pos == int(e.size()) - 1) {
      e[pos] = remaining;
      exps_.push_back(e);
      degree_.push_back(degree_of(e));
      e[pos] = 0;
      return;
    }
    for (int x = remaining; x >= 0; --x) {
      e[pos] = x;
      enumerate(e, pos + 1, remaining - x);
    }
    e[pos] = 0;
  }
  static int degree_of(const std::vector<int>& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
  }

  int directions_;
  int order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degree_;
  std::vector<Product> products_;
  std::vector<int> productStart_;
  std::vector<std::vector<DerivEntry>> derivs_;
  std::vector<int> conj_;
  std::vector<int> units_;
  std::map<std::vector<int>, int> lookup_;
};

using TaylorSpacePtr = std::shared_ptr<const TaylorSpace>;

/// Shared, lazily built spaces; construction is serialized, lookups are cheap.
inline TaylorSpacePtr taylor_space(int directions, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, TaylorSpacePtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(directions, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto sp = std::make_shared<const TaylorSpace>(directions, order);
  cache.emplace(key, sp);
  return sp;
}

namespace detail {
inline cplx zero_like(const cplx&) { return cplx(0.0); }
inline ComplexMatrix zero_like(const ComplexMatrix& m) {
  return ComplexMatrix::Zero(m.rows(), m.cols());
}
inline cplx adjoint_of(const cplx& c) { return std::conj(c); }
inline ComplexMatrix adjoint_of(const ComplexMatrix& m) { return m.adjoint(); }
}  // namespace detail

/// Series with coefficients of type T (cplx or ComplexMatrix). `nz` marks
/// structurally nonzero coefficients so products can skip known zeros.
template <class T>
class Taylor {
 public:
  Taylor() = default;
  Taylor(TaylorSpacePtr space, const T& zero)
      : space_(std::move(space)),
        coeffs_(space_->size(), detail::zero_like(zero)),
        nz_(space_->size(), 0) {}

  static Taylor constant(TaylorSpacePtr space, const T& value) {
    Taylor out(space, value);
    out.coeffs_[0] = value;
    out.nz_[0] = 1;
    return out;
  }

  const TaylorSpacePtr& space() const { return space_; }
  int size() const { return int(coeffs_.size()); }
  const T& operator[](int k) const { return coeffs_[k]; }
  const T& value() const { return coeffs_[0]; }
  bool nonzero(int k) const { return nz_[k] != 0; }
  void set(int k, const T& v) {
    coeffs_[k] = v;
    nz_[k] = 1;
  }
  void add(int k, const T& v) {
    if (nz_[k]) {
      coeffs_[k] += v;
    } else {
      coeffs_[k] = v;
      nz_[k] = 1;
    }
  }
  T& mutable_coeff(int k) {
    nz_[k] = 1;
    return coeffs_[k];
  }
  T zero() const { return detail::zero_like(coeffs_[0]); }

  Taylor& operator+=(const Taylor& o) {
    for (int k = 0; k < size(); ++k) {
      if (o.nz_[k]) add(k, o.coeffs_[k]);
    }
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (int k = 0; k < size(); ++k) {
      if (o.nz_[k]) add(k, T(-o.coeffs_[k]));
    }
    return *this;
  }
  Taylor& operator*=(cplx s) {
    for (int k = 0; k < size(); ++k) {
      if (nz_[k]) coeffs_[k] *= s;
    }
    return *this;
  }
  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, cplx s) { return a *= s; }
  friend Taylor operator*(cplx s, Taylor a) { return a *= s; }
  friend Taylor operator-(Taylor a) { return a *= cplx(-1.0); }

  /// d/dvar of the series; exact to one order less than the input.
  Taylor derivative(int var) const {
    Taylor out(space_, coeffs_[0]);
    for (const auto& d : space_->derivative(var)) {
      if (nz_[d.from]) out.set(d.to, T(d.factor * coeffs_[d.from]));
    }
    return out;
  }

  /// Pointwise conjugate transpose, i.e. the series of f(z)^*.
  Taylor adjoint() const {
    Taylor out(space_, detail::adjoint_of(coeffs_[0]));
    for (int k = 0; k < size(); ++k) {
      if (nz_[k]) out.set(space_->conj_index(k), detail::adjoint_of(coeffs_[k]));
    }
    return out;
  }

 private:
  TaylorSpacePtr space_;
  std::vector<T> coeffs_;
  std::vector<char> nz_;
};

using TaylorScalar = Taylor<cplx>;
using TaylorMatrix = Taylor<ComplexMatrix>;

inline TaylorMatrix operator*(const TaylorMatrix& a, const TaylorMatrix& b) {
  const auto& sp = *a.space();
  TaylorMatrix out(a.space(), ComplexMatrix::Zero(a.value().rows(), b.value().cols()));
  ComplexMatrix acc(a.value().rows(), b.value().cols());
  for (int k = 0; k < sp.size(); ++k) {
    bool any = false;
    acc.setZero();
    for (int idx = sp.product_begin(k); idx < sp.product_end(k); ++idx) {
      const auto& p = sp.products()[idx];
      if (!a.nonzero(p.lhs) || !b.nonzero(p.rhs)) continue;
      acc.noalias() += a[p.lhs] * b[p.rhs];
      any = true;
    }
    if (any) out.set(k, acc);
  }
  return out;
}

inline TaylorMatrix operator*(const TaylorScalar& a, const TaylorMatrix& b) {
  const auto& sp = *a.space();
  TaylorMatrix out(a.space(), b.value());
  ComplexMatrix acc(b.value().rows(), b.value().cols());
  for (int k = 0; k < sp.size(); ++k) {
    bool any = false;
    acc.setZero();
    for (int idx = sp.product_begin(k); idx < sp.product_end(k); ++idx) {
      const auto& p = sp.products()[idx];
      if (!a.nonzero(p.lhs) || !b.nonzero(p.rhs)) continue;
      acc += a[p.lhs] * b[p.rhs];
      any = true;
    }
    if (any) out.set(k, acc);
  }
  return out;
}

inline TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b) {
  const auto& sp = *a.space();
  TaylorScalar out(a.space(), cplx(0.0));
  for (int k = 0; k < sp.size(); ++k) {
    bool any = false;
    cplx acc(0.0);
    for (int idx = sp.product_begin(k); idx < sp.product_end(k); ++idx) {
      const auto& p = sp.products()[idx];
      if (!a.nonzero(p.lhs) || !b.nonzero(p.rhs)) continue;
      acc += a[p.lhs] * b[p.rhs];
      any = true;
    }
    if (any) out.set(k, acc);
  }
  return out;
}

/// Series of tr(b^* a): the Hermitian pairing, linear in `a`.
inline TaylorScalar hdot(const TaylorMatrix& a, const TaylorMatrix& b) {
  const auto& sp = *a.space();
  TaylorScalar out(a.space(), cplx(0.0));
  for (int k = 0; k < sp.size(); ++k) {
    bool any = false;
    cplx acc(0.0);
    for (int idx = sp.product_begin(k); idx < sp.product_end(k); ++idx) {
      const auto& p = sp.products()[idx];
      const int bj = sp.conj_index(p.rhs);
      if (!a.nonzero(p.lhs) || !b.nonzero(bj)) continue;
      acc += hdot(a[p.lhs], b[bj]);
      any = true;
    }
    if (any) out.set(k, acc);
  }
  return out;
}

inline TaylorScalar trace(const TaylorMatrix& a) {
  TaylorScalar out(a.space(), cplx(0.0));
  for (int k = 0; k < a.size(); ++k) {
    if (a.nonzero(k)) out.set(k, a[k].trace());
  }
  return out;
}

inline TaylorScalar component(const TaylorMatrix& a, Eigen::Index r, Eigen::Index c) {
  TaylorScalar out(a.space(), cplx(0.0));
  for (int k = 0; k < a.size(); ++k) {
    if (a.nonzero(k)) out.set(k, a[k](r, c));
  }
  return out;
}

/// Series inverse of a square matrix series with invertible constant term.
inline TaylorMatrix inverse(const TaylorMatrix& a) {
  const auto& sp = *a.space();
  const ComplexMatrix a0 = a.value();
  Eigen::PartialPivLU<ComplexMatrix> lu(a0);
  if (std::abs(lu.determinant()) < 1e-300) {
    throw DegenerateFrameError("Taylor inverse: singular constant term");
  }
  const ComplexMatrix inv0 = lu.inverse();
  TaylorMatrix out(a.space(), a0);
  out.set(0, inv0);
  ComplexMatrix acc(a0.rows(), a0.cols());
  for (int k = 1; k < sp.size(); ++k) {
    bool any = false;
    acc.setZero();
    for (int idx = sp.product_begin(k); idx < sp.product_end(k); ++idx) {
      const auto& p = sp.products()[idx];
      if (p.lhs == 0) continue;
      if (!a.nonzero(p.lhs) || !out.nonzero(p.rhs)) continue;
      acc.noalias() += a[p.lhs] * out[p.rhs];
      any = true;
    }
    if (any) out.set(k, ComplexMatrix(-inv0 * acc));
  }
  return out;
}

inline TaylorScalar inverse(const TaylorScalar& a) {
  const auto& sp = *a.space();
  if (std::abs(a.value()) < 1e-300) {
    throw DegenerateFrameError("Taylor inverse: zero constant term");
  }
  const cplx inv0 = 1.0 / a.value();
  TaylorScalar out(a.space(), cplx(0.0));
  out.set(0, inv0);
  for (int k = 1; k < sp.size(); ++k) {
    bool any = false;
    cplx acc(0.0);
    for (int idx = sp.product_begin(k); idx < sp.product_end(k); ++idx) {
      const auto& p = sp.products()[idx];
      if (p.lhs == 0 || !a.nonzero(p.lhs) || !out.nonzero(p.rhs)) continue;
      acc += a[p.lhs] * out[p.rhs];
      any = true;
    }
    if (any) out.set(k, -inv0 * acc);
  }
  return out;
}

}  // namespace grasspinch
