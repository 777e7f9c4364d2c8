#pragma once

// First-order forward-mode differentiation over complex holomorphic inputs.

#include "grasspinch/linalg.hpp"

namespace grasspinch {

class JetScalar {
 public:
  JetScalar() = default;
  JetScalar(cplx value, Eigen::Index nvars)  // NOLINT(google-explicit-constructor)
      : value_(value), partials_(ComplexVector::Zero(nvars)) {}
  JetScalar(cplx value, ComplexVector partials)
      : value_(value), partials_(std::move(partials)) {}

  /// The independent variable number `index` among `nvars`, valued `value`.
  static JetScalar variable(cplx value, Eigen::Index index, Eigen::Index nvars) {
    JetScalar j(value, nvars);
    j.partials_(index) = 1.0;
    return j;
  }

  cplx value() const { return value_; }
  const ComplexVector& partials() const { return partials_; }
  cplx partial(Eigen::Index i) const { return partials_(i); }
  Eigen::Index nvars() const { return partials_.size(); }

  JetScalar& operator+=(const JetScalar& o) {
    value_ += o.value_;
    partials_ += o.partials_;
    return *this;
  }
  JetScalar& operator-=(const JetScalar& o) {
    value_ -= o.value_;
    partials_ -= o.partials_;
    return *this;
  }
  JetScalar& operator*=(const JetScalar& o) {
    partials_ = value_ * o.partials_ + o.value_ * partials_;
    value_ *= o.value_;
    return *this;
  }
  JetScalar& operator/=(const JetScalar& o) {
    const cplx inv = 1.0 / o.value_;
    partials_ = (partials_ - value_ * inv * o.partials_) * inv;
    value_ *= inv;
    return *this;
  }
  JetScalar& operator*=(cplx s) {
    value_ *= s;
    partials_ *= s;
    return *this;
  }

  friend JetScalar operator+(JetScalar a, const JetScalar& b) { return a += b; }
  friend JetScalar operator-(JetScalar a, const JetScalar& b) { return a -= b; }
  friend JetScalar operator*(JetScalar a, const JetScalar& b) { return a *= b; }
  friend JetScalar operator/(JetScalar a, const JetScalar& b) { return a /= b; }
  friend JetScalar operator*(JetScalar a, cplx s) { return a *= s; }
  friend JetScalar operator*(cplx s, JetScalar a) { return a *= s; }
  friend JetScalar operator+(JetScalar a, cplx s) {
    a.value_ += s;
    return a;
  }
  friend JetScalar operator-(JetScalar a) {
    a.value_ = -a.value_;
    a.partials_ = -a.partials_;
    return a;
  }

 private:
  cplx value_{0.0};
  ComplexVector partials_;
};

inline JetScalar pow(const JetScalar& x, int k) {
  JetScalar out(1.0, x.nvars());
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

}  // namespace grasspinch
