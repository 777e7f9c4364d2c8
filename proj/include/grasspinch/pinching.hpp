#pragma once

// Holomorphic pinching versus parallel second fundamental form: the sampled
// minimum of Hol^M, the size of nabla sigma, the pointwise identities used
// along the way, and the combined verdict.

#include "grasspinch/flatness.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace grasspinch {

struct SearchPlan {
  int grid = 8;               // base grid density g
  int fiberSamples = 24;      // directions per base point when m >= 2
  int refineCandidates = 10;
  int refineIterations = 2000;  // base-point evaluations per candidate
  std::uint64_t seed = 1;
};

struct HolSample {
  int chart = 0;
  ComplexVector z;
  ComplexVector u;
  std::vector<double> fiber;  // real and imaginary parts of the unit fiber vector
  double hol = 0.0;
};

struct MinHolResult {
  double minHol = 0.0;
  ChartPoint argmin;
  ComplexVector argminDirection;
  double gridMin = 0.0;
  double samplingGap = 0.0;  // grid minimum minus refined minimum
  bool budgetExhausted = false;
  int points = 0;
  std::vector<HolSample> samples;
};

namespace detail {

inline std::vector<double> split(const ComplexVector& v) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i).real());
    out.push_back(v(i).imag());
  }
  return out;
}

}  // namespace detail

/**
 * Sampled minimum of Hol^M over the unit sphere bundle. Every base point of
 * the nested grid is scored (for m = 1 the fiber reduces to one phase
 * representative; for m >= 2 a fixed number of random fiber directions), and
 * the best candidates are refined by a compass search in z around a fiber search. The result
 * is an attained value, hence an upper bound on the true minimum.
 */
inline MinHolResult min_hol(const Immersion& f, const SearchPlan& plan = {}) {
  if (plan.grid < 1 || plan.fiberSamples < 1 || plan.refineIterations < 1) {
    throw DimensionError("min_hol: search budget must be positive");
  }
  const int m = f.m();
  const auto points = base_points(f, plan.grid);
  if (points.empty()) throw DimensionError("min_hol: empty base grid");
  const int fiber = m == 1 ? 1 : plan.fiberSamples;
  MinHolResult out;
  out.points = int(points.size());
  out.samples = parallel_map<HolSample>(int(points.size()), [&](int i) {
    std::mt19937_64 rng(mix_seed(plan.seed, i));
    HolSample best;
    best.hol = std::numeric_limits<double>::infinity();
    const FundamentalFormData d = fundamental_form_data(f, points[i]);
    const ComplexMatrix c = orthonormal_chart_basis(d.metric);
    for (int k = 0; k < fiber; ++k) {
      const ComplexVector w = m == 1 ? ComplexVector::Ones(1) : random_unit_vector(rng, m);
      const ComplexVector u = c * w;
      const double h = hol_M_extrinsic(d, u);
      if (h < best.hol) best = {points[i].chart, points[i].z, u, detail::split(w), h};
    }
    return best;
  });

  std::vector<int> order(out.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.samples[a].hol < out.samples[b].hol; });
  out.gridMin = out.samples[order[0]].hol;

  struct Refined {
    double hol;
    ComplexVector z, u;
    bool exhausted;
  };
  const int nc = std::min<int>(plan.refineCandidates, int(order.size()));
  const auto refined = parallel_map<Refined>(nc, [&](int c) {
    const HolSample& s = out.samples[order[c]];
    ComplexVector w = ComplexVector::Ones(m);
    if (m > 1) {
      for (int i = 0; i < m; ++i) w(i) = cplx(s.fiber[2 * i], s.fiber[2 * i + 1]);
    }
    // Hol at z, minimized over the fiber by a compass search that reuses the
    // first-order data at z; w is updated in place.
    auto objective = [&](const ComplexVector& z, ComplexVector& wz, ComplexVector* uOut) {
      FundamentalFormData d;
      ComplexMatrix basis;
      try {
        d = fundamental_form_data(f, {s.chart, z});
        basis = orthonormal_chart_basis(d.metric);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
      auto hol = [&](const ComplexVector& v) {
        const double nv = v.norm();
        if (nv < 1e-8) return std::numeric_limits<double>::infinity();
        return hol_M_extrinsic(d, basis * (v / nv));
      };
      double fw = hol(wz);
      if (m > 1) {
        double step = 0.05;
        while (step > 1e-7) {
          bool improved = false;
          for (int k = 0; k < 2 * m; ++k) {
            for (double sgn : {1.0, -1.0}) {
              ComplexVector y = wz;
              y(k / 2) += (k % 2 == 0 ? cplx(sgn * step, 0.0) : cplx(0.0, sgn * step));
              const double fy = hol(y);
              if (fy < fw) {
                wz = y / y.norm();
                fw = fy;
                improved = true;
                break;
              }
            }
          }
          if (!improved) step *= 0.5;
        }
      }
      if (uOut) *uOut = basis * (wz / wz.norm());
      return fw;
    };
    ComplexVector z = s.z;
    double fx = objective(z, w, nullptr);
    double step = 0.05;
    int evals = 1;
    while (step > 1e-6 && evals < plan.refineIterations) {
      bool improved = false;
      for (int k = 0; k < 2 * m && evals < plan.refineIterations; ++k) {
        for (double sgn : {1.0, -1.0}) {
          ComplexVector y = z;
          y(k / 2) += (k % 2 == 0 ? cplx(sgn * step, 0.0) : cplx(0.0, sgn * step));
          ComplexVector wy = w;
          const double fy = objective(y, wy, nullptr);
          ++evals;
          if (fy < fx) {
            z = y;
            w = wy;
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    ComplexVector u;
    objective(z, w, &u);
    return Refined{fx, z, u, step > 1e-6};
  });

  const HolSample& g0 = out.samples[order[0]];
  out.minHol = out.gridMin;
  out.argmin = {g0.chart, g0.z};
  out.argminDirection = g0.u;
  for (const auto& r : refined) {
    out.budgetExhausted = out.budgetExhausted || r.exhausted;
  }
  for (int c = 0; c < nc; ++c) {
    if (refined[c].hol < out.minHol) {
      out.minHol = refined[c].hol;
      out.argmin = {out.samples[order[c]].chart, refined[c].z};
      out.argminDirection = refined[c].u;
    }
  }
  out.samplingGap = out.gridMin - out.minHol;
  return out;
}

struct ParallelismReport {
  double maxNablaSigma = 0.0;     // max |nabla sigma(u,u,u)| over unit samples
  double polarizationBound = 0.0;  // bound on the full trilinear norm
  int samples = 0;
};

/// Polarization constant n^n / n! for symmetric trilinear forms.
inline constexpr double kCubicPolarization = 27.0 / 6.0;

inline ParallelismReport parallelism_norm(const Immersion& f, const SearchPlan& plan = {}) {
  const auto points = base_points(f, plan.grid);
  const int fiber = f.m() == 1 ? 1 : plan.fiberSamples;
  const auto vals = parallel_map<double>(int(points.size()), [&](int i) {
    std::mt19937_64 rng(mix_seed(plan.seed ^ 0x5bd1e995ULL, i));
    double best = 0.0;
    for (int k = 0; k < fiber; ++k) {
      const ComplexVector u =
          f.m() == 1 ? ComplexVector::Ones(1) : random_unit_vector(rng, f.m());
      best = std::max(best, nabla_sigma_cubic_norm(f, points[i], u));
    }
    return best;
  });
  ParallelismReport r;
  r.samples = int(points.size()) * fiber;
  for (double v : vals) r.maxNablaSigma = std::max(r.maxNablaSigma, v);
  r.polarizationBound = kCubicPolarization * r.maxNablaSigma;
  return r;
}

inline double second_variation_residual(const Immersion& f, const ChartPoint& cp, const ComplexVector& u) {
  const SecondVariation sv = second_variation(f, cp, u);
  return std::abs(sv.lhs - sv.rhs);
}

struct ShapeIdentityReport {
  double residual = 0.0;     // | |sigma(u,u)|^2 - q |A_{sigma(u,u)} conj u|^2 |
  double sigmaNormSq = 0.0;
  double boundSlack = 0.0;   // 1/q - |sigma(u,u)|^2
};

inline ShapeIdentityReport shape_identity_residual(const Immersion& f, const ChartPoint& cp,
                                  const ComplexVector& u) {
  const ComplexVector e = normalize_chart(f, cp, u);
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const ComplexMatrix s = d.sigma_mat(e, e);
  const ComplexVector a = d.shape_coords(s, e);
  ShapeIdentityReport r;
  const double q = f.q();
  r.sigmaNormSq = s.squaredNorm();
  r.residual = std::abs(r.sigmaNormSq - q * std::real(d.inner(a, a)));
  r.boundSlack = 1.0 / q - r.sigmaNormSq;
  return r;
}

struct LambdaChain {
  bool vacuous = false;  // sigma(u,u) vanishes
  double lambda = 0.0;
  ComplexVector e;
  double sigmaEE = 0.0;     // |sigma(e,e)|
  double shapeNorm = 0.0;   // |A_xi conj u|
  double slackCauchySchwarz = 0.0;  // |sigma(e,e)| - lambda
  double slackShape = 0.0;          // lambda^2 - |A_xi conj u|^2
  double slackEigen = 0.0;          // |sigma(e,e)|^2 - lambda^2
  double slackPinching = 0.0;       // 1/q - |sigma(e,e)|^2
  double worstSlack = 0.0;
};

/**
 * Eigenvalue chain for B = A_xi o tau with xi = sigma(u,u)/|sigma(u,u)|.
 * B is real-linear on T_{1,0}M and symmetric for Re h; it is represented in
 * the real orthonormal basis {c_k, i c_k} built from a metric-orthonormal
 * complex basis c_k.
 */
inline LambdaChain lambda_chain(const Immersion& f, const ChartPoint& cp, const ComplexVector& u0) {
  const ComplexVector u = normalize_chart(f, cp, u0);
  const FundamentalFormData d = fundamental_form_data(f, cp);
  const int m = f.m();
  LambdaChain r;
  const ComplexMatrix s = d.sigma_mat(u, u);
  const double sn = s.norm();
  if (sn < 1e-10) {
    r.vacuous = true;
    return r;
  }
  const ComplexMatrix xi = s / sn;
  const ComplexMatrix c = orthonormal_chart_basis(d.metric);
  std::vector<ComplexVector> basis;
  for (int k = 0; k < m; ++k) {
    basis.push_back(c.col(k));
    basis.push_back(kI * c.col(k));
  }
  RealMatrix b(2 * m, 2 * m);
  for (int j = 0; j < 2 * m; ++j) {
    const ComplexVector bj = d.shape_coords(xi, basis[j]);
    for (int i = 0; i < 2 * m; ++i) b(i, j) = std::real(d.inner(bj, basis[i]));
  }
  const auto ep = max_hermitian_eigenpair(b, 1e-8);
  r.lambda = ep.value;
  r.e = ComplexVector::Zero(m);
  for (int k = 0; k < 2 * m; ++k) r.e += ep.vector(k) * basis[k];
  r.sigmaEE = d.sigma_mat(r.e, r.e).norm();
  const ComplexVector a = d.shape_coords(xi, u);
  r.shapeNorm = d.norm(a);
  r.slackCauchySchwarz = r.sigmaEE - r.lambda;
  r.slackShape = r.lambda * r.lambda - r.shapeNorm * r.shapeNorm;
  r.slackEigen = r.sigmaEE * r.sigmaEE - r.lambda * r.lambda;
  r.slackPinching = 1.0 / f.q() - r.sigmaEE * r.sigmaEE;
  r.worstSlack = std::min({r.slackCauchySchwarz, r.slackShape, r.slackEigen, r.slackPinching});
  return r;
}

enum class Status { Pass, Fail, HypothesisNotMet, Inconclusive };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::HypothesisNotMet: return "hypothesis-not-met";
    case Status::Inconclusive: return "inconclusive";
  }
  return "fail";
}

inline int exit_code(Status s) {
  switch (s) {
    case Status::Pass: return 0;
    case Status::Fail: return 1;
    case Status::HypothesisNotMet: return 2;
    case Status::Inconclusive: return 3;
  }
  return 1;
}

struct VerdictPlan {
  SearchPlan search;
  FlatnessPlan flatness;
  int identitySamples = 20;
  double pinchTol = 1e-3;
  double parTol = 1e-3;
  double secondVariationTol = 1e-3;
  double shapeIdentityTol = 1e-4;
  double slackTol = 1e-6;
};

struct PinchingVerdict {
  Status status = Status::Fail;
  FlatnessReport flatness;
  double threshold = 0.0;  // 1/q
  MinHolResult minHol;
  ParallelismReport parallelism;
  bool pinchedFlag = false;
  bool parallelFlag = false;
  bool biconditionalAgrees = false;
  double secondVariationMaxResidual = 0.0;
  double shapeIdentityMaxResidual = 0.0;
  double maxSigmaNormSq = 0.0;
  double lambdaChainWorstSlack = 0.0;
  bool lambdaChainVacuous = true;
  std::vector<std::string> failures;
};

/// Random (chart point, unit direction) pairs drawn from the base grid.
inline std::vector<std::pair<ChartPoint, ComplexVector>> identity_samples(const Immersion& f,
                                                                          int count, int grid,
                                                                          std::uint64_t seed) {
  const auto points = base_points(f, grid);
  if (points.empty()) throw DimensionError("empty base grid");
  std::mt19937_64 rng(mix_seed(seed, 0xabcdef));
  std::uniform_int_distribution<size_t> pick(0, points.size() - 1);
  std::vector<std::pair<ChartPoint, ComplexVector>> out;
  for (int i = 0; i < count; ++i) {
    const ChartPoint& cp = points[pick(rng)];
    out.emplace_back(cp, random_unit_vector(rng, f.m()));
  }
  return out;
}

/// Runs the pipeline flatness -> pinching -> parallelism -> pointwise identities.
inline PinchingVerdict pinching_verdict(const Immersion& f, const VerdictPlan& plan = {}) {
  PinchingVerdict v;
  v.threshold = 1.0 / f.q();
  v.flatness = flatness_residual(f, plan.flatness);
  if (!v.flatness.flat) {
    v.status = Status::HypothesisNotMet;
    return v;
  }
  if (!v.flatness.rankCheckPassed) v.failures.push_back("flat pullback with p < q");
  v.minHol = min_hol(f, plan.search);
  v.parallelism = parallelism_norm(f, plan.search);
  v.pinchedFlag = v.minHol.minHol >= v.threshold - plan.pinchTol;
  v.parallelFlag = v.parallelism.maxNablaSigma <= plan.parTol;
  v.biconditionalAgrees = v.pinchedFlag == v.parallelFlag;
  if (!v.biconditionalAgrees) v.failures.push_back("pinched and parallel flags disagree");

  const auto samples = identity_samples(f, plan.identitySamples, plan.search.grid, plan.search.seed);
  struct Point {
    double e313, e315, s2, slack;
    bool vacuous;
  };
  const auto pts = parallel_map<Point>(int(samples.size()), [&](int i) {
    const auto& [cp, u] = samples[i];
    const ShapeIdentityReport e = shape_identity_residual(f, cp, u);
    const LambdaChain lc = lambda_chain(f, cp, u);
    return Point{second_variation_residual(f, cp, u), e.residual, e.sigmaNormSq,
                 lc.vacuous ? 0.0 : lc.worstSlack, lc.vacuous};
  });
  v.lambdaChainWorstSlack = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    v.secondVariationMaxResidual = std::max(v.secondVariationMaxResidual, p.e313);
    v.shapeIdentityMaxResidual = std::max(v.shapeIdentityMaxResidual, p.e315);
    v.maxSigmaNormSq = std::max(v.maxSigmaNormSq, p.s2);
    if (!p.vacuous) {
      v.lambdaChainVacuous = false;
      v.lambdaChainWorstSlack = std::min(v.lambdaChainWorstSlack, p.slack);
    }
  }
  if (v.lambdaChainVacuous) v.lambdaChainWorstSlack = 0.0;
  if (v.secondVariationMaxResidual >= plan.secondVariationTol) v.failures.push_back("second-variation identity residual");
  if (v.parallelFlag && v.shapeIdentityMaxResidual >= plan.shapeIdentityTol) {
    v.failures.push_back("parallel member violates the shape-operator identity");
  }
  if (v.pinchedFlag && !v.lambdaChainVacuous && v.lambdaChainWorstSlack < -plan.slackTol) {
    v.failures.push_back("eigenvalue chain violated on a pinched member");
  }
  v.status = v.failures.empty() ? Status::Pass : Status::Fail;
  return v;
}

}  // namespace grasspinch
