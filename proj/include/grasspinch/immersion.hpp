#pragma once

// Holomorphic immersions M -> Gr_p(C^n) given by polynomial chart maps.
//
// A chart map z -> F(z) is an n x p matrix polynomial whose columns span f(z).
// Charts of the atlas are unitary rotations g F(z) of the base chart; a chart
// claims a point when its designated p x p minor of the S-frame is the
// largest one (lowest chart index on ties), which partitions M.
// The metric on M is, by definition, the one induced from Gr_p(C^n).

#include "grasspinch/grassmannian.hpp"
#include "grasspinch/polynomial.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace grasspinch {

class CatalogError : public Error {
 public:
  using Error::Error;
};

struct DifferentiationConfig {
  enum class Mode { ForwardJets, CentralDifferences };
  Mode mode = Mode::ForwardJets;
  double step = 1e-5;
  double secondOrderStep = 1e-4;

  void validate() const {
    auto ok = [](double h) { return h >= 1e-8 && h <= 1e-2; };
    if (!ok(step) || !ok(secondOrderStep)) {
      throw DifferentiationError("differentiation step must lie in [1e-8, 1e-2]");
    }
  }
};

struct AtlasChart {
  ComplexMatrix rotation;         // n x n unitary
  std::vector<int> selectorRows;  // rows of the designated p x p minor
};

struct ExpectedProperties {
  bool known = false;
  bool projectivelyFlat = true;
  double minHol = 0.0;
  bool parallel = false;
};

struct ChartPoint {
  int chart = 0;
  ComplexVector z;
};

class Immersion {
 public:
  Immersion(std::string id, int m, int n, int p, PolyMatrix chartMap)
      : id_(std::move(id)), m_(m), n_(n), p_(p), base_(std::move(chartMap)) {
    if (m < 1 || p < 1 || p >= n) throw CatalogError("immersion: invalid (m, n, p)");
    require_dims(base_.rows() == n && base_.cols() == p && base_.nvars() == m,
                 "chart map must be an n x p polynomial in m variables");
    std::vector<int> rows(p);
    for (int i = 0; i < p; ++i) rows[i] = i;
    set_atlas({AtlasChart{ComplexMatrix::Identity(n, n), rows}});
  }

  const std::string& id() const { return id_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return n_ - p_; }
  const PolyMatrix& chart_map(int chart = 0) const { return charts_.at(chart); }
  const std::vector<AtlasChart>& atlas() const { return atlas_; }
  int chart_count() const { return int(atlas_.size()); }
  double region_radius() const { return regionRadius_; }
  const ExpectedProperties& expected() const { return expected_; }
  const std::string& description() const { return description_; }

  void set_atlas(std::vector<AtlasChart> atlas) {
    atlas_ = std::move(atlas);
    charts_.clear();
    for (const auto& c : atlas_) {
      require_dims(c.rotation.rows() == n_ && c.rotation.cols() == n_, "atlas rotation shape");
      require_dims(int(c.selectorRows.size()) == p_, "selector rows must number p");
      charts_.push_back(base_.left_multiplied(c.rotation));
    }
  }
  void set_region_radius(double r) { regionRadius_ = r; }
  void set_expected(ExpectedProperties e) { expected_ = e; }
  void set_description(std::string d) { description_ = std::move(d); }
  void set_inverse_chart(std::function<std::optional<ComplexVector>(const ComplexMatrix&)> f) {
    inverse_ = std::move(f);
  }
  bool has_inverse_chart() const { return bool(inverse_); }

  /// Base-chart coordinates of the plane spanned by `frameS`, if it lies in
  /// the base chart's domain.
  std::optional<ComplexVector> base_coordinates(const ComplexMatrix& frameS) const {
    if (!inverse_) return std::nullopt;
    return inverse_(frameS);
  }

  /// Coordinates of `x` in chart `k`.
  std::optional<ComplexVector> chart_coordinates(const GrassmannPoint& x, int k) const {
    return base_coordinates(atlas_.at(k).rotation.adjoint() * x.frameS());
  }

  /// Chart claiming the point: largest designated minor, lowest index on ties.
  int select_chart(const GrassmannPoint& x) const {
    int best = 0;
    double bestVal = -1.0;
    for (int k = 0; k < chart_count(); ++k) {
      ComplexMatrix minor(p_, p_);
      for (int i = 0; i < p_; ++i) minor.row(i) = x.frameS().row(atlas_[k].selectorRows[i]);
      const double v = std::abs(minor.determinant());
      if (v > bestVal * (1.0 + 1e-12) + 1e-300) {
        best = k;
        bestVal = v;
      }
    }
    return best;
  }

 private:
  std::string id_;
  int m_, n_, p_;
  PolyMatrix base_;
  std::vector<AtlasChart> atlas_;
  std::vector<PolyMatrix> charts_;
  double regionRadius_ = 1.0;
  ExpectedProperties expected_;
  std::string description_;
  std::function<std::optional<ComplexVector>(const ComplexMatrix&)> inverse_;
};

inline GrassmannPoint evaluate(const Immersion& f, const ChartPoint& cp) {
  require_dims(cp.z.size() == f.m(), "chart point dimension");
  return GrassmannPoint::from_span(f.chart_map(cp.chart).evaluate(cp.z));
}

/// Images of the chart basis vectors d/dz_i as ambient tangents.
struct Pushforward {
  std::shared_ptr<const GrassmannPoint> point;
  std::vector<ComplexMatrix> basis;  // q x p matrices, one per chart coordinate

  AmbientTangent apply(const ComplexVector& u) const {
    ComplexMatrix m = ComplexMatrix::Zero(point->q(), point->p());
    for (int i = 0; i < int(basis.size()); ++i) m += u(i) * basis[i];
    return AmbientTangent(point, std::move(m));
  }
};

inline Pushforward pushforward_basis(const Immersion& f, const ChartPoint& cp,
                                     const DifferentiationConfig& cfg = {}) {
  cfg.validate();
  const PolyMatrix& F = f.chart_map(cp.chart);
  std::vector<ComplexMatrix> d(f.m() + 1);
  if (cfg.mode == DifferentiationConfig::Mode::ForwardJets) {
    d = F.value_and_partials(cp.z);
  } else {
    d[0] = F.evaluate(cp.z);
    for (int i = 0; i < f.m(); ++i) {
      ComplexVector zp = cp.z, zm = cp.z;
      zp(i) += cfg.step;
      zm(i) -= cfg.step;
      d[i + 1] = (F.evaluate(zp) - F.evaluate(zm)) / (2.0 * cfg.step);
    }
  }
  auto point = std::make_shared<const GrassmannPoint>(GrassmannPoint::from_span(d[0]));
  const ComplexMatrix coeff = point->frameS().adjoint() * d[0];
  // X * coeff^{-1}, solved through the transpose.
  const Eigen::PartialPivLU<ComplexMatrix> lu(coeff.transpose());
  Pushforward out{point, {}};
  for (int i = 0; i < f.m(); ++i) {
    const ComplexMatrix x = point->frameQ().adjoint() * d[i + 1];
    out.basis.push_back(lu.solve(x.transpose()).transpose());
  }
  return out;
}

/// frameQ^* (d_u F)(frameS^* F)^{-1}: the (1,0) image of chart vector u.
inline AmbientTangent pushforward(const Immersion& f, const ChartPoint& cp,
                                  const ComplexVector& u, const DifferentiationConfig& cfg = {}) {
  require_dims(u.size() == f.m(), "chart tangent dimension");
  return pushforward_basis(f, cp, cfg).apply(u);
}

/// Gram matrix G(i, j) = h(d/dz_i, d/dz_j); h(u, v) = u^T G conj(v).
inline ComplexMatrix induced_metric(const Pushforward& pf) {
  const int m = int(pf.basis.size());
  ComplexMatrix g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = hdot(pf.basis[i], pf.basis[j]);
  }
  return g;
}

inline ComplexMatrix induced_metric(const Immersion& f, const ChartPoint& cp,
                                    const DifferentiationConfig& cfg = {}) {
  ComplexMatrix g = induced_metric(pushforward_basis(f, cp, cfg));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
  if (es.eigenvalues()(0) <= 1e-12) {
    throw DegenerateFrameError("induced metric is degenerate (not an immersion here)");
  }
  return g;
}

inline cplx induced_inner(const ComplexMatrix& g, const ComplexVector& u,
                          const ComplexVector& v) {
  return (u.transpose() * g * v.conjugate())(0, 0);
}

/// Largest Hom(S,Q) component of the antiholomorphic derivative of the
/// projector onto f(z), measured by central differences.
inline double holomorphy_residual(const Immersion& f, const ChartPoint& cp,
                                  const DifferentiationConfig& cfg = {}) {
  cfg.validate();
  const GrassmannPoint x = evaluate(f, cp);
  double worst = 0.0;
  const double h = cfg.step;
  for (int i = 0; i < f.m(); ++i) {
    auto proj = [&](cplx dz) {
      ChartPoint c = cp;
      c.z(i) += dz;
      return evaluate(f, c).projectorS();
    };
    const ComplexMatrix dx = (proj(h) - proj(-h)) / (2.0 * h);
    const ComplexMatrix dy = (proj(cplx(0, h)) - proj(cplx(0, -h))) / (2.0 * h);
    const ComplexMatrix dbar = 0.5 * (dx + kI * dy);
    const ComplexMatrix block = x.frameQ().adjoint() * dbar * x.frameS();
    worst = std::max(worst, block.norm());
  }
  return worst;
}

struct ImmersionValidation {
  double maxHolomorphyResidual = 0.0;
  double minMetricEigenvalue = 1e300;
  int points = 0;
  bool ok = false;
};

/// Rank and holomorphy checks on a small grid of base-chart points.
inline ImmersionValidation validate_immersion(const Immersion& f, int perAxis = 3,
                                              const DifferentiationConfig& cfg = {}) {
  ImmersionValidation v;
  const int total = int(std::pow(perAxis, f.m()));
  for (int idx = 0; idx < total; ++idx) {
    ComplexVector z(f.m());
    int r = idx;
    for (int i = 0; i < f.m(); ++i) {
      const int k = r % perAxis;
      r /= perAxis;
      const double t = perAxis == 1 ? 0.0 : -0.5 + double(k) / (perAxis - 1);
      z(i) = cplx(t, 0.37 * t + 0.11 * i);
    }
    ChartPoint cp{0, z};
    ComplexMatrix g = induced_metric(pushforward_basis(f, cp, cfg));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
    v.minMetricEigenvalue = std::min(v.minMetricEigenvalue, es.eigenvalues()(0));
    DifferentiationConfig fd = cfg;
    fd.step = 1e-6;
    v.maxHolomorphyResidual = std::max(v.maxHolomorphyResidual, holomorphy_residual(f, cp, fd));
    ++v.points;
  }
  v.ok = v.minMetricEigenvalue > 1e-10 && v.maxHolomorphyResidual < 1e-6;
  return v;
}

namespace detail {
inline cplx json_complex(const nlohmann::json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return cplx(j[0].get<double>(), j[1].get<double>());
  }
  throw CatalogError("immersion JSON: complex entries are numbers or [re, im]");
}
}  // namespace detail

/**
 * Immersion from a JSON description
 *   {"n": N, "p": P, "m": M, "name": "...",
 *    "monomial_frame": [[coefficient, [e_1, ..., e_M]], ...]}
 * where each coefficient is an N x P nested array of numbers or [re, im]
 * pairs. The map is validated (rank and holomorphy) before it is returned.
 */
inline Immersion immersion_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> allowed = {"n", "p", "m", "name", "monomial_frame"};
  if (!j.is_object()) throw CatalogError("immersion JSON must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw CatalogError("immersion JSON: unknown key '" + it.key() + "'");
    }
  }
  for (const char* k : {"n", "p", "m", "monomial_frame"}) {
    if (!j.contains(k)) throw CatalogError(std::string("immersion JSON: missing key '") + k + "'");
  }
  const int n = j.at("n").get<int>();
  const int p = j.at("p").get<int>();
  const int m = j.at("m").get<int>();
  if (m < 1 || p < 1 || p >= n) throw CatalogError("immersion JSON: need m >= 1, 0 < p < n");
  PolyMatrix poly(n, p, m);
  for (const auto& term : j.at("monomial_frame")) {
    if (!term.is_array() || term.size() != 2) {
      throw CatalogError("immersion JSON: each term is [coefficient, exponent]");
    }
    const auto& c = term[0];
    if (!c.is_array() || int(c.size()) != n) throw CatalogError("immersion JSON: coefficient must have n rows");
    ComplexMatrix coeff(n, p);
    for (int r = 0; r < n; ++r) {
      if (!c[r].is_array() || int(c[r].size()) != p) {
        throw CatalogError("immersion JSON: coefficient rows must have p entries");
      }
      for (int col = 0; col < p; ++col) coeff(r, col) = detail::json_complex(c[r][col]);
    }
    const auto exps = term[1].get<std::vector<int>>();
    if (int(exps.size()) != m) throw CatalogError("immersion JSON: exponent length must be m");
    poly.add_term(coeff, exps);
  }
  Immersion f(j.value("name", std::string("user")), m, n, p, std::move(poly));
  f.set_description("user-supplied polynomial chart map");
  ImmersionValidation v;
  try {
    v = validate_immersion(f);
  } catch (const Error& e) {
    throw CatalogError(std::string("immersion JSON failed validation: ") + e.what());
  }
  if (!v.ok) throw CatalogError("immersion JSON failed rank/holomorphy validation");
  return f;
}

inline Immersion immersion_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open immersion file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("immersion file is not valid JSON: ") + e.what());
  }
  return immersion_from_json(j);
}

}  // namespace grasspinch
