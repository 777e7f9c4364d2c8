#pragma once

// The projective-flatness hypothesis R^{f*Q}(U, conj V) = (1/q) h_M(U, V) Id
// and the statements that depend on it.

#include "grasspinch/sampling.hpp"
#include "grasspinch/submanifold.hpp"

#include <optional>

namespace grasspinch {

struct FlatnessPlan {
  int grid = 3;
  int directions = 3;
  std::uint64_t seed = 1;
  double gate = 1e-6;
};

struct FlatnessReport {
  double maxResidual = 0.0;
  ComplexMatrix alphaForm;  // h_M / q at the first sample point
  bool flat = false;
  bool rankCheckPassed = true;
  double traceConsistency = 0.0;
  std::optional<double> holGrDeviation;  // empty when skipped (not flat)
  double compositionMaxNorm = 0.0;
  int points = 0;
  int samples = 0;
};

/// -H_U K_{conj V} = U V^* on the pulled-back quotient bundle.
inline ComplexMatrix pullback_Q_curvature(const Immersion& f, const ChartPoint& cp,
                                          const ComplexVector& u, const ComplexVector& v) {
  const Pushforward pf = pushforward_basis(f, cp);
  return curvature_Q(pf.apply(u), pf.apply(v));
}

namespace detail {
inline double flatness_defect(const FundamentalFormData& d, const ComplexVector& u,
                              const ComplexVector& v) {
  const ComplexMatrix r = curvature_Q(d.tangent(u), d.tangent(v));
  const ComplexMatrix target =
      d.inner(u, v) / double(d.q) * ComplexMatrix::Identity(d.q, d.q);
  return (r - target).norm();
}

/// ||H_{sigma(u,u)} K_{conj u}|| as an operator on Q.
inline double composition_norm(const FundamentalFormData& d, const ComplexVector& u) {
  const ComplexMatrix comp = d.sigma_mat(u, u) * second_ff_K(d.tangent(u)).mat;
  if (comp.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(comp);
  return svd.singularValues()(0);
}
}  // namespace detail

inline FlatnessReport flatness_residual(const Immersion& f, const FlatnessPlan& plan = {}) {
  const auto points = base_points(f, plan.grid);
  if (points.empty() || plan.directions < 1) throw DimensionError("flatness: empty sample plan");
  struct Local {
    double residual = 0, trace = 0, hol = 0, l36 = 0;
    ComplexMatrix metric;
  };
  const double q = f.q();
  const auto locals = parallel_map<Local>(int(points.size()), [&](int i) {
    const FundamentalFormData d = fundamental_form_data(f, points[i]);
    const ComplexMatrix c = orthonormal_chart_basis(d.metric);
    std::mt19937_64 rng(mix_seed(plan.seed, i));
    Local l;
    l.metric = d.metric;
    for (int k = 0; k < plan.directions; ++k) {
      const ComplexVector u = c * random_unit_vector(rng, f.m());
      const ComplexVector v = c * random_unit_vector(rng, f.m());
      l.residual = std::max(l.residual, detail::flatness_defect(d, u, v));
      const cplx tr = curvature_Q(d.tangent(u), d.tangent(u)).trace();
      l.trace = std::max(l.trace, std::abs(tr - d.inner(u, u)));
      l.hol = std::max(l.hol, std::abs(hol_sectional(d.tangent(u), 1e-8) - 2.0 / q));
      l.l36 = std::max(l.l36, detail::composition_norm(d, u));
    }
    return l;
  });
  FlatnessReport r;
  r.points = int(points.size());
  r.samples = r.points * plan.directions;
  r.alphaForm = locals.front().metric / q;
  double hol = 0.0;
  for (const auto& l : locals) {
    r.maxResidual = std::max(r.maxResidual, l.residual);
    r.traceConsistency = std::max(r.traceConsistency, l.trace);
    hol = std::max(hol, l.hol);
    r.compositionMaxNorm = std::max(r.compositionMaxNorm, l.l36);
  }
  r.flat = r.maxResidual < plan.gate;
  r.rankCheckPassed = !r.flat || f.p() >= f.q();
  if (r.flat) r.holGrDeviation = hol;
  return r;
}

/// max |Hol^Gr(f_* u) - 2/q| over unit samples; empty when f is not flat.
inline std::optional<double> hol_gr_check(const Immersion& f, const FlatnessPlan& plan = {}) {
  return flatness_residual(f, plan).holGrDeviation;
}

/// max ||H_{sigma(u,u)} K_{conj u}|| over unit samples.
inline double composition_check(const Immersion& f, const FlatnessPlan& plan = {}) {
  return flatness_residual(f, plan).compositionMaxNorm;
}

}  // namespace grasspinch
