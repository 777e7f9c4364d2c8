#pragma once

// Integration over the unit tangent sphere bundle UM.
//
// The base measure is the Riemannian volume of the induced metric,
// 2^m det(h_ij) dx dy in each chart, and the fiber measure is the round
// measure of the unit sphere of T_{1,0}M, of total mass 2 pi^m / (m-1)!.
// Charts are weighted by the hard selector partition of the atlas. For m = 1
// every integrand used here is phase invariant, so each fiber circle is
// represented by one vector carrying the full fiber mass; this is checked at
// run time. For m >= 2 the base is sampled by Monte Carlo in the polydisc.

#include "grasspinch/pinching.hpp"

#include <functional>

namespace grasspinch {

class AtlasError : public Error {
 public:
  using Error::Error;
};
class PhaseInvarianceError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kJackknifeGroups = 16;

struct UMSample {
  int chartId = 0;
  ComplexVector z;
  ComplexVector u;
  double weight = 0.0;
  double baseWeight = 0.0;  // Riemannian area element times the selector
  int group = 0;
};

struct UMPlan {
  std::vector<UMSample> samples;
  bool monteCarlo = false;
  bool coverageVerified = false;  // every chart's claimed region lies in its sampled domain
  double fiberMass = 0.0;
  int baseGrid = 0;
  int fiberSamples = 0;
  std::uint64_t seed = 0;
};

/// Gauss-Legendre nodes and weights on [0, 1].
inline std::vector<std::pair<double, double>> gauss_legendre01(int n) {
  std::vector<std::pair<double, double>> out;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    out.emplace_back(0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp));
  }
  return out;
}

inline double sphere_mass(int m) {
  double f = 1.0;
  for (int k = 2; k < m; ++k) f *= k;
  return 2.0 * std::pow(kPi, m) / f;
}

struct Estimate {
  cplx value;
  double standardError = 0.0;
};

/// Weighted sum with a delete-one-group jackknife standard error.
inline Estimate jackknife(const std::vector<UMSample>& samples, const std::vector<cplx>& values,
                          bool useBaseWeight = false) {
  const int g = kJackknifeGroups;
  std::vector<cplx> part(g, cplx(0.0));
  cplx total(0.0);
  for (size_t i = 0; i < samples.size(); ++i) {
    const double w = useBaseWeight ? samples[i].baseWeight : samples[i].weight;
    part[samples[i].group] += w * values[i];
    total += w * values[i];
  }
  std::vector<cplx> loo(g);
  cplx mean(0.0);
  for (int k = 0; k < g; ++k) {
    loo[k] = (total - part[k]) * (double(g) / (g - 1));
    mean += loo[k] / double(g);
  }
  double var = 0.0;
  for (int k = 0; k < g; ++k) var += std::norm(loo[k] - mean);
  var *= double(g - 1) / g;
  return {total, std::sqrt(var)};
}

/**
 * Samples of UM. For m = 1 each chart disc |z| <= R is covered by a polar
 * product rule: g Gauss-Legendre radial nodes times a midpoint rule with a
 * multiple of 16 angular cells (about 4g).
 * For m >= 2, 16 g^2 uniform polydisc points per chart are drawn, each with
 * `fiberSamples` uniform unit directions.
 */
inline UMPlan build_um_plan(const Immersion& f, int baseGrid, int fiberSamples,
                            std::uint64_t seed) {
  if (baseGrid < 1 || fiberSamples < 1) throw DimensionError("UM plan: density must be positive");
  const int m = f.m();
  const double radius = f.region_radius();
  UMPlan plan;
  plan.monteCarlo = m > 1;
  plan.baseGrid = baseGrid;
  plan.fiberSamples = m == 1 ? 1 : fiberSamples;
  plan.seed = seed;
  plan.fiberMass = sphere_mass(m);

  std::vector<UMSample> cands;
  if (m == 1) {
    const int nr = baseGrid;
    const int nt = kJackknifeGroups * ((4 * baseGrid + kJackknifeGroups - 1) / kJackknifeGroups);
    const double dt = 2.0 * kPi / nt;
    const auto radial = gauss_legendre01(nr);
    for (int k = 0; k < f.chart_count(); ++k) {
      for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
          const double r = radius * radial[i].first, t = (j + 0.5) * dt;
          UMSample s;
          s.chartId = k;
          s.z = ComplexVector::Constant(1, std::polar(r, t));
          s.baseWeight = r * radius * radial[i].second * dt;
          s.group = j % kJackknifeGroups;
          cands.push_back(std::move(s));
        }
      }
    }
  } else {
    const int nb = kJackknifeGroups * baseGrid * baseGrid;
    const double area = std::pow(kPi * radius * radius, m) / nb;
    for (int k = 0; k < f.chart_count(); ++k) {
      std::mt19937_64 rng(mix_seed(seed, 1000003ULL * (k + 1)));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      for (int i = 0; i < nb; ++i) {
        UMSample s;
        s.chartId = k;
        s.z.resize(m);
        for (int a = 0; a < m; ++a) {
          const double r = radius * std::sqrt(uni(rng));
          const double t = 2.0 * kPi * uni(rng);
          s.z(a) = std::polar(r, t);
        }
        s.baseWeight = area;
        s.group = i % kJackknifeGroups;
        cands.push_back(std::move(s));
      }
    }
  }

  struct Claimed {
    bool keep = false;
    double density = 0.0;
    ComplexMatrix basis;
    bool covered = true;
  };
  const auto claimed = parallel_map<Claimed>(int(cands.size()), [&](int i) {
    Claimed c;
    const ChartPoint cp{cands[i].chartId, cands[i].z};
    const GrassmannPoint x = evaluate(f, cp);
    const int owner = f.chart_count() == 1 ? 0 : f.select_chart(x);
    c.keep = owner == cp.chart;
    if (!c.keep) {
      // The owning chart must see this point inside its own sampled domain.
      if (f.has_inverse_chart()) {
        const auto zc = f.chart_coordinates(x, owner);
        c.covered = zc && zc->cwiseAbs().maxCoeff() <= radius * (1.0 + 1e-9);
      }
      return c;
    }
    const ComplexMatrix h = induced_metric(f, cp);
    c.density = std::pow(2.0, m) * std::real(h.determinant());
    c.basis = orthonormal_chart_basis(h);
    return c;
  });

  plan.coverageVerified = f.chart_count() > 1 && f.has_inverse_chart();
  for (size_t i = 0; i < cands.size(); ++i) {
    if (!claimed[i].covered) {
      throw AtlasError("UM plan: atlas charts do not cover the immersed manifold");
    }
    if (!claimed[i].keep) continue;
    std::mt19937_64 rng(mix_seed(seed ^ 0x2545f4914f6cdd1dULL, i));
    for (int s = 0; s < plan.fiberSamples; ++s) {
      UMSample u = cands[i];
      u.baseWeight *= claimed[i].density;
      const ComplexVector w = m == 1 ? ComplexVector::Ones(1) : random_unit_vector(rng, m);
      u.u = claimed[i].basis * w;
      u.weight = u.baseWeight * plan.fiberMass / plan.fiberSamples;
      if (s > 0) u.baseWeight = 0.0;  // count each base point's area once
      plan.samples.push_back(std::move(u));
    }
  }
  return plan;
}

/// Riemannian volume of M with its jackknife standard error.
inline Estimate volume(const UMPlan& plan) {
  std::vector<cplx> ones(plan.samples.size(), cplx(1.0));
  return jackknife(plan.samples, ones, true);
}

using UMIntegrand = std::function<cplx(const Immersion&, const ChartPoint&, const ComplexVector&)>;

struct BundleIntegral {
  cplx estimate;
  double standardError = 0.0;
  double totalWeight = 0.0;
  double floor = 0.0;  // absolute numerical floor added to the 3-sigma band
  bool withinBand = false;
  double phaseDefect = 0.0;
};

/// (nabla^2 T)(conj U, U; U, U, conj U, conj U) for T(U,V,Z,W) = h(sigma(U,V), sigma(Z,W)).
inline cplx second_variation_integrand(const Immersion& f, const ChartPoint& cp,
                                       const ComplexVector& u) {
  return second_variation(f, cp, u).lhs;
}

/// (nabla T)(conj U; U, U, conj U, conj U); not phase invariant.
inline cplx first_variation_integrand(const Immersion& f, const ChartPoint& cp,
                                      const ComplexVector& u) {
  return second_variation(f, cp, u).firstDerivative;
}

/// Largest change of the integrand under 5 random phase rotations at a few
/// samples, relative to max(1, |value|).
inline double phase_defect(const Immersion& f, const UMPlan& plan, const UMIntegrand& fn) {
  double worst = 0.0;
  const size_t n = plan.samples.size();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(mix_seed(plan.seed, 77));
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int k = 0; k < 3; ++k) {
    const UMSample& s = plan.samples[(k * n) / 3];
    const ChartPoint cp{s.chartId, s.z};
    const cplx base = fn(f, cp, s.u);
    for (int r = 0; r < 5; ++r) {
      const cplx rotated = fn(f, cp, std::polar(1.0, ang(rng)) * s.u);
      worst = std::max(worst, std::abs(rotated - base) / std::max(1.0, std::abs(base)));
    }
  }
  return worst;
}

/// Vanishing test on integrand values already evaluated at the plan samples.
inline BundleIntegral sphere_bundle_from_values(const UMPlan& plan, const std::vector<cplx>& vals,
                                   double phaseDefect, double floorScale = 1e-9) {
  BundleIntegral r;
  r.phaseDefect = phaseDefect;
  const Estimate e = jackknife(plan.samples, vals);
  r.estimate = e.value;
  r.standardError = e.standardError;
  for (const auto& s : plan.samples) r.totalWeight += s.weight;
  r.floor = floorScale * r.totalWeight;
  r.withinBand = std::abs(r.estimate) <= 3.0 * r.standardError + r.floor;
  return r;
}

/**
 * Integral of a phase-invariant integrand over UM. The vanishing test accepts
 * |estimate| <= 3 SE + floor, where floor = floorScale * total weight absorbs
 * rounding in integrands that vanish pointwise.
 */
inline BundleIntegral sphere_bundle_integral(const Immersion& f, const UMIntegrand& fn, const UMPlan& plan,
                                double floorScale = 1e-9) {
  if (plan.samples.empty()) throw DimensionError("sphere_bundle_integral: empty plan");
  const double defect = phase_defect(f, plan, fn);
  if (defect > 1e-8) {
    throw PhaseInvarianceError("sphere_bundle_integral: integrand is not phase invariant");
  }
  const auto vals = parallel_map<cplx>(int(plan.samples.size()), [&](int i) {
    const auto& s = plan.samples[i];
    return fn(f, {s.chartId, s.z}, s.u);
  });
  return sphere_bundle_from_values(plan, vals, defect, floorScale);
}

struct TermBalance {
  double curvatureTerm = 0.0;      // (3/q) int (|sigma|^2 - q |A_sigma conj U|^2)
  double curvatureSE = 0.0;
  double nablaSigmaTerm = 0.0;     // int |nabla sigma(U,U,U)|^2
  double nablaSigmaSE = 0.0;
  double balanceResidual = 0.0;    // |sum| / max(|terms|)
  bool trivial = false;            // both terms negligible (parallel member)
  bool inconclusive = false;       // a nonzero term has SE above 10% of its size
};

/// Balance from second-variation data evaluated at the plan samples.
inline TermBalance term_balance_from_variations(const UMPlan& plan, const std::vector<SecondVariation>& svs,
                                          int q) {
  std::vector<cplx> a, b;
  double total = 0.0;
  for (size_t i = 0; i < svs.size(); ++i) {
    a.emplace_back(3.0 / q * (svs[i].sigmaNormSq - double(q) * svs[i].shapeNormSq));
    b.emplace_back(svs[i].nablaSigmaNormSq);
    total += plan.samples[i].weight;
  }
  const Estimate ea = jackknife(plan.samples, a), eb = jackknife(plan.samples, b);
  TermBalance r;
  r.curvatureTerm = ea.value.real();
  r.curvatureSE = ea.standardError;
  r.nablaSigmaTerm = eb.value.real();
  r.nablaSigmaSE = eb.standardError;
  const double big = std::max(std::abs(r.curvatureTerm), std::abs(r.nablaSigmaTerm));
  if (big <= 1e-6 * std::max(1.0, total)) {
    r.trivial = true;
    r.balanceResidual = 0.0;
    return r;
  }
  r.balanceResidual = std::abs(r.curvatureTerm + r.nablaSigmaTerm) / big;
  r.inconclusive = r.curvatureSE > 0.1 * std::abs(r.curvatureTerm) ||
                   r.nablaSigmaSE > 0.1 * std::abs(r.nablaSigmaTerm);
  return r;
}

inline TermBalance term_balance(const Immersion& f, const UMPlan& plan) {
  if (plan.samples.empty()) throw DimensionError("term_balance: empty plan");
  const auto svs = parallel_map<SecondVariation>(int(plan.samples.size()), [&](int i) {
    const auto& s = plan.samples[i];
    return second_variation(f, {s.chartId, s.z}, s.u);
  });
  return term_balance_from_variations(plan, svs, f.q());
}

}  // namespace grasspinch
