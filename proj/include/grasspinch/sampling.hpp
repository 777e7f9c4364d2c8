#pragma once

// Deterministic sample plans over an immersion's atlas.

#include "grasspinch/immersion.hpp"
#include "grasspinch/parallel.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace grasspinch {

/// Radical inverse of i in base b.
inline double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * double(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline int nth_prime(int k) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (k < 0 || k >= int(std::size(primes))) throw DimensionError("Halton: too many dimensions");
  return primes[k];
}

/// Candidate chart coordinates: a square grid x = -1 + 2i/g in each real
/// coordinate for m = 1, and the first (g+1)^2 Halton points of [-1,1]^{2m}
/// for m >= 2. Doubling g refines the m = 1 grid and extends the Halton prefix,
/// so coarse samples are always contained in finer ones.
inline std::vector<ComplexVector> chart_grid(int m, int g, double radius) {
  std::vector<ComplexVector> out;
  if (g < 1) throw DimensionError("grid density must be positive");
  if (m == 1) {
    for (int i = 0; i <= g; ++i) {
      for (int j = 0; j <= g; ++j) {
        ComplexVector z(1);
        z(0) = radius * cplx(-1.0 + 2.0 * i / g, -1.0 + 2.0 * j / g);
        out.push_back(z);
      }
    }
    return out;
  }
  const int count = (g + 1) * (g + 1);
  for (int k = 0; k < count; ++k) {
    ComplexVector z(m);
    for (int i = 0; i < m; ++i) {
      const double re = radical_inverse(k, nth_prime(2 * i));
      const double im = radical_inverse(k, nth_prime(2 * i + 1));
      z(i) = radius * cplx(2.0 * re - 1.0, 2.0 * im - 1.0);
    }
    out.push_back(z);
  }
  return out;
}

/// Grid points inside the polydisc of each chart that the chart claims.
/// Order: chart index, then grid index.
inline std::vector<ChartPoint> base_points(const Immersion& f, int g) {
  const auto grid = chart_grid(f.m(), g, f.region_radius());
  std::vector<ChartPoint> cands;
  for (int k = 0; k < f.chart_count(); ++k) {
    for (const auto& z : grid) {
      if (z.cwiseAbs().maxCoeff() <= f.region_radius() + 1e-12) cands.push_back({k, z});
    }
  }
  const auto keep = parallel_map<char>(int(cands.size()), [&](int i) -> char {
    if (f.chart_count() == 1) return 1;
    try {
      return f.select_chart(evaluate(f, cands[i])) == cands[i].chart;
    } catch (const DegenerateFrameError&) {
      return 0;
    }
  });
  std::vector<ChartPoint> out;
  for (size_t i = 0; i < cands.size(); ++i) {
    if (keep[i]) out.push_back(cands[i]);
  }
  return out;
}

/// C with C^T G conj(C) = I, so u = C w is unit for unit w.
inline ComplexMatrix orthonormal_chart_basis(const ComplexMatrix& metric) {
  const ComplexMatrix k = metric.transpose();
  Eigen::LLT<ComplexMatrix> llt(k);
  if (llt.info() != Eigen::Success) throw DegenerateFrameError("metric is not positive definite");
  const ComplexMatrix l = llt.matrixL();
  return l.adjoint().triangularView<Eigen::Upper>().solve(
      ComplexMatrix::Identity(metric.rows(), metric.cols()));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform unit vector of C^m.
inline ComplexVector random_unit_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector w(m);
  for (int i = 0; i < m; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    w(i) = cplx(re, im);
  }
  return w / w.norm();
}

}  // namespace grasspinch
