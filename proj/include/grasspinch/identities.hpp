#pragma once

// Residual batteries: the ambient identities of Gr_p(C^n) at random points,
// and the submanifold identities of an immersion at random (point, frame)
// draws. Each entry records the largest residual seen.

#include "grasspinch/sampling.hpp"
#include "grasspinch/submanifold.hpp"

#include <map>
#include <string>

namespace grasspinch {

struct ResidualEntry {
  double value = 0.0;
  double tolerance = 0.0;
  bool passed() const { return value < tolerance; }
};

using ResidualTable = std::map<std::string, ResidualEntry>;

inline void record(ResidualTable& t, const std::string& key, double v, double tol) {
  auto& e = t[key];
  e.tolerance = tol;
  e.value = std::max(e.value, v);
}

inline bool all_passed(const ResidualTable& t) {
  for (const auto& [k, e] : t) {
    if (!e.passed()) return false;
  }
  return true;
}

/// Central-difference derivative at t = 0 of the projector onto span(S + t Q U),
/// the real curve with velocity U + conj(U).
inline ComplexMatrix projector_velocity(const GrassmannPoint& x, const ComplexMatrix& u,
                                        double h = 1e-5) {
  auto proj = [&](double t) {
    const ComplexMatrix s = orthonormalize(x.frameS() + t * x.frameQ() * u);
    return ComplexMatrix(s * s.adjoint());
  };
  return (proj(h) - proj(-h)) / (2.0 * h);
}

/**
 * Ambient battery on Gr_p(C^n) at `draws` random points: adjoint relation of
 * H and K, metric by three formulas, symmetry of R^Gr, curvature traces, the
 * derivative of projected sections along a frame curve (finite differences),
 * and Hol = 2 on every hyperplane Grassmannian Gr_{k-1}(C^k), k = 2..6.
 */
inline ResidualTable ambient_identities(int n, int p, int draws, std::uint64_t seed) {
  ResidualTable t;
  const double alg = 1e-10, fd = 1e-6;
  for (int d = 0; d < draws; ++d) {
    const std::uint64_t s = mix_seed(seed, d);
    auto x = std::make_shared<const GrassmannPoint>(random_point(n, p, s));
    std::mt19937_64 rng(s);
    const AmbientTangent u = random_tangent(x, s + 1, false);
    const AmbientTangent v = random_tangent(x, s + 2, false);
    const AmbientTangent z = random_tangent(x, s + 3, false);
    const AmbientTangent w = random_tangent(x, s + 4, false);
    const ComplexVector sv = random_gaussian(rng, p, 1);
    const ComplexVector tv = random_gaussian(rng, n - p, 1);
    const ComplexVector amb = random_gaussian(rng, n, 1);

    const cplx hq = tv.dot(second_ff_H(u).apply(sv));
    const cplx hs = (second_ff_K(u).apply(tv)).dot(sv);
    record(t, "adjointHK", std::abs(hq + hs), alg);

    const cplx frame = metric(u, v);
    record(t, "metricTraceFormula", std::abs(metric_trace_formula(u, v) - frame), alg);
    record(t, "metricSectionSum", std::abs(metric_section_sum(u, v) - frame), alg);
    record(t, "metricHermitian", std::abs(frame - std::conj(metric(v, u))), alg);

    const AmbientTangent r1 = curvature_Gr(u, v, z), r2 = curvature_Gr(z, v, u);
    record(t, "curvatureSymmetry", (r1.mat - r2.mat).norm(), alg);
    record(t, "curvatureBianchi", std::abs(metric(r1, w) - metric(r2, w)), alg);
    const ComplexMatrix rs = curvature_S(u, v), rsSwap = curvature_S(v, u);
    record(t, "curvatureSHermitian", (rs.adjoint() - rsSwap).norm(), alg);
    record(t, "curvatureSTrace", std::abs(curvature_S(u, u).trace() + metric(u, u)), alg);
    record(t, "curvatureQTrace", std::abs(curvature_Q(u, v).trace() - metric(u, v)), alg);

    const ComplexVector ps = project_S(*x, amb), pq = project_Q(*x, amb);
    record(t, "pythagoras", std::abs(ps.squaredNorm() + pq.squaredNorm() - amb.squaredNorm()), alg);
    record(t, "splitting", (inject_S(*x, ps) + inject_Q(*x, pq) - amb).norm(), alg);

    const ComplexMatrix dp = projector_velocity(*x, u.mat);
    const ComplexVector nablaS = x->frameS().adjoint() * dp * amb;
    record(t, "sectionDerivativeS", (nablaS + second_ff_K(u).apply(pq)).norm(), fd);
    const ComplexVector nablaQ = x->frameQ().adjoint() * dp * inject_S(*x, ps);
    record(t, "sectionDerivativeQ", (nablaQ - second_ff_H(u).apply(ps)).norm(), fd);
  }
  for (int k = 2; k <= 6; ++k) {
    for (int d = 0; d < draws; ++d) {
      const std::uint64_t s = mix_seed(seed ^ 0x77ULL, 100 * k + d);
      auto x = std::make_shared<const GrassmannPoint>(random_point(k, k - 1, s));
      const AmbientTangent u = random_tangent(x, s, true);
      record(t, "hyperplaneHol" + std::to_string(k), std::abs(hol_sectional(u) - 2.0), alg);
    }
  }
  return t;
}

struct SubmanifoldSuitePlan {
  int samples = 50;
  int grid = 4;
  std::uint64_t seed = 1;
  bool flat = true;  // gate the entries that need the flatness hypothesis
};

/// Normal vector drawn from the normal frame, or empty when N = 0.
inline std::optional<AmbientTangent> random_normal(const FundamentalFormData& d,
                                                   std::mt19937_64& rng) {
  if (d.normalFrame.empty()) return std::nullopt;
  const ComplexVector c = random_unit_vector(rng, int(d.normalFrame.size()));
  ComplexMatrix mat = ComplexMatrix::Zero(d.base->q(), d.base->p());
  for (int a = 0; a < c.size(); ++a) mat += c(a) * d.normalFrame[a].mat;
  return AmbientTangent(d.base, mat);
}

inline ResidualTable submanifold_identities(const Immersion& f, const SubmanifoldSuitePlan& plan) {
  const auto points = base_points(f, plan.grid);
  if (points.empty()) throw DimensionError("submanifold suite: empty base grid");
  const int m = f.m();
  const auto tables = parallel_map<ResidualTable>(plan.samples, [&](int i) {
    ResidualTable t;
    std::mt19937_64 rng(mix_seed(plan.seed, i));
    const ChartPoint cp = points[std::uniform_int_distribution<size_t>(0, points.size() - 1)(rng)];
    const FundamentalFormData d = fundamental_form_data(f, cp);
    const ComplexMatrix c = orthonormal_chart_basis(d.metric);
    auto draw = [&] { return ComplexVector(c * random_unit_vector(rng, m)); };
    const ComplexVector u = draw(), v = draw(), z = draw(), w = draw();

    record(t, "sigmaSymmetry", (d.sigma_mat(u, v) - d.sigma_mat(v, u)).norm(), 1e-8);
    record(t, "sigmaMixed", sigma_mixed(f, cp, u, v).mat.norm(), 1e-6);
    const double th = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
    const cplx ph = std::polar(1.0, th);
    const LocalGeometry gp(f, cp, {ComplexVector(ph * u)}, 1);
    const ComplexMatrix sp =
        gp.local(gp.normal(gp.connection(gp.tangent_field(ph * u), 0, false)).value());
    record(t, "sigmaPhase", (sp - ph * ph * d.sigma_mat(u, u)).norm(), 1e-8);
    record(t, "codazzi",
           (nabla_sigma(f, cp, w, u, z).mat - nabla_sigma(f, cp, u, w, z).mat).norm(), 1e-4);
    record(t, "gauss", gauss_equation_residual(f, cp, u, v, z, w), 1e-4);
    const HolM hm = hol_M(f, cp, u);
    record(t, "holTwoWay", std::abs(hm.intrinsic - hm.extrinsic), 1e-4);
    const AmbientTangent nb = nabla_bar_sigma(f, cp, v, u, z);
    record(t, "nablaBarCurvature", (nb.mat - curvature_normal_part(d, u, v, z).mat).norm(), 1e-4);
    if (plan.flat) {
      record(t, "nablaBarSigma", nb.mat.norm(), 1e-4);
      const ComplexMatrix comp = d.sigma_mat(u, u) * second_ff_K(d.tangent(u)).mat;
      record(t, "sigmaKComposition", comp.norm(), 1e-5);
    }

    const auto xi = random_normal(d, rng), eta = random_normal(d, rng);
    if (xi && eta) {
      const cplx lhs = hdot(d.sigma_mat(u, v), xi->mat);
      const cplx rhs = d.inner(v, d.shape_coords(xi->mat, u));
      record(t, "sigmaShapeDuality", std::abs(lhs - rhs), 1e-6);
      record(t, "shapeHolomorphic", shape_operator_holomorphic(f, cp, *xi, u).mat.norm(), 1e-6);
      record(t, "ricci", ricci_equation_residual(f, cp, u, v, *xi, *eta), 1e-3);
    }
    return t;
  });
  ResidualTable out;
  for (const auto& t : tables) {
    for (const auto& [k, e] : t) record(out, k, e.value, e.tolerance);
  }
  return out;
}

}  // namespace grasspinch
