#pragma once

// Matrix-valued polynomials in m complex variables: sum_k C_k z^alpha_k.

#include "grasspinch/jet.hpp"
#include "grasspinch/taylor.hpp"

#include <vector>

namespace grasspinch {

struct Monomial {
  ComplexMatrix coeff;
  std::vector<int> exponent;
};

class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols, int nvars) : rows_(rows), cols_(cols), nvars_(nvars) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nvars() const { return nvars_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  void add_term(ComplexMatrix coeff, std::vector<int> exponent) {
    require_dims(coeff.rows() == rows_ && coeff.cols() == cols_, "monomial coefficient shape");
    require_dims(int(exponent.size()) == nvars_, "monomial exponent length");
    for (int e : exponent) {
      if (e < 0) throw DimensionError("monomial exponent must be nonnegative");
    }
    for (auto& t : terms_) {
      if (t.exponent == exponent) {
        t.coeff += coeff;
        return;
      }
    }
    terms_.push_back({std::move(coeff), std::move(exponent)});
  }

  /// Adds c * z^exponent to entry (r, col).
  void add_entry(int r, int col, cplx c, std::vector<int> exponent) {
    ComplexMatrix m = ComplexMatrix::Zero(rows_, cols_);
    m(r, col) = c;
    add_term(std::move(m), std::move(exponent));
  }

  ComplexMatrix evaluate(const ComplexVector& z) const {
    require_dims(z.size() == nvars_, "polynomial argument length");
    ComplexMatrix out = ComplexMatrix::Zero(rows_, cols_);
    for (const auto& t : terms_) {
      cplx mono(1.0);
      for (int i = 0; i < nvars_; ++i) {
        for (int k = 0; k < t.exponent[i]; ++k) mono *= z(i);
      }
      out += mono * t.coeff;
    }
    return out;
  }

  PolyMatrix partial(int var) const {
    PolyMatrix out(rows_, cols_, nvars_);
    for (const auto& t : terms_) {
      if (t.exponent[var] == 0) continue;
      std::vector<int> e = t.exponent;
      const double f = e[var];
      --e[var];
      out.add_term(f * t.coeff, std::move(e));
    }
    return out;
  }

  /// Directional derivative sum_i u_i d/dz_i.
  PolyMatrix directional(const ComplexVector& u) const {
    PolyMatrix out(rows_, cols_, nvars_);
    for (int i = 0; i < nvars_; ++i) {
      if (u(i) == cplx(0.0)) continue;
      for (const auto& t : partial(i).terms_) out.add_term(u(i) * t.coeff, t.exponent);
    }
    return out;
  }

  /// g * P for a constant matrix g (used for atlas rotations).
  PolyMatrix left_multiplied(const ComplexMatrix& g) const {
    require_dims(g.cols() == rows_, "rotation shape");
    PolyMatrix out(int(g.rows()), cols_, nvars_);
    for (const auto& t : terms_) out.add_term(g * t.coeff, t.exponent);
    return out;
  }

  /// Value and all first partials at z via forward-mode jets.
  std::vector<ComplexMatrix> value_and_partials(const ComplexVector& z) const {
    require_dims(z.size() == nvars_, "polynomial argument length");
    std::vector<JetScalar> vars;
    for (int i = 0; i < nvars_; ++i) vars.push_back(JetScalar::variable(z(i), i, nvars_));
    std::vector<ComplexMatrix> out(nvars_ + 1, ComplexMatrix::Zero(rows_, cols_));
    for (const auto& t : terms_) {
      JetScalar mono(1.0, nvars_);
      for (int i = 0; i < nvars_; ++i) mono *= pow(vars[i], t.exponent[i]);
      out[0] += mono.value() * t.coeff;
      for (int i = 0; i < nvars_; ++i) out[i + 1] += mono.partial(i) * t.coeff;
    }
    return out;
  }

  /// Holomorphic Taylor series at z0 with one direction per coordinate axis.
  TaylorMatrix taylor(const TaylorSpacePtr& space, const ComplexVector& z0) const {
    require_dims(space->directions() == nvars_, "Taylor space must have one direction per variable");
    TaylorMatrix out(space, ComplexMatrix::Zero(rows_, cols_));
    for (int k = 0; k < space->size(); ++k) {
      const auto& beta = space->exponent(k);
      bool holo = true;
      for (int i = 0; i < nvars_; ++i) holo = holo && beta[nvars_ + i] == 0;
      if (!holo) continue;
      ComplexMatrix acc = ComplexMatrix::Zero(rows_, cols_);
      bool any = false;
      for (const auto& t : terms_) {
        cplx c(1.0);
        bool ok = true;
        for (int i = 0; i < nvars_ && ok; ++i) {
          if (beta[i] > t.exponent[i]) {
            ok = false;
            break;
          }
          c *= binomial(t.exponent[i], beta[i]);
          for (int r = 0; r < t.exponent[i] - beta[i]; ++r) c *= z0(i);
        }
        if (!ok) continue;
        acc += c * t.coeff;
        any = true;
      }
      if (any) out.set(k, acc);
    }
    return out;
  }

  /// Holomorphic Taylor series of t -> P(z0 + sum_a t_a dirs[a]).
  TaylorMatrix taylor_along(const TaylorSpacePtr& space, const ComplexVector& z0,
                            const std::vector<ComplexVector>& dirs) const {
    require_dims(space->directions() == int(dirs.size()), "one Taylor direction per vector");
    require_dims(z0.size() == nvars_, "polynomial argument length");
    std::vector<std::vector<TaylorScalar>> powers(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      TaylorScalar zi = TaylorScalar::constant(space, z0(i));
      for (int a = 0; a < int(dirs.size()); ++a) {
        require_dims(dirs[a].size() == nvars_, "direction length");
        if (dirs[a](i) != cplx(0.0) && space->order() >= 1) {
          zi.add(space->unit(space->holomorphic_var(a)), dirs[a](i));
        }
      }
      powers[i].push_back(TaylorScalar::constant(space, cplx(1.0)));
      powers[i].push_back(zi);
    }
    const int deg = degree();
    for (int i = 0; i < nvars_; ++i) {
      while (int(powers[i].size()) <= deg) powers[i].push_back(powers[i].back() * powers[i][1]);
    }
    TaylorMatrix out(space, ComplexMatrix::Zero(rows_, cols_));
    for (const auto& t : terms_) {
      TaylorScalar mono = TaylorScalar::constant(space, cplx(1.0));
      for (int i = 0; i < nvars_; ++i) {
        if (t.exponent[i] > 0) mono = mono * powers[i][t.exponent[i]];
      }
      for (int k = 0; k < space->size(); ++k) {
        if (mono.nonzero(k)) out.add(k, ComplexMatrix(mono[k] * t.coeff));
      }
    }
    return out;
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int s = 0;
      for (int e : t.exponent) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  static double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  int nvars_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace grasspinch
