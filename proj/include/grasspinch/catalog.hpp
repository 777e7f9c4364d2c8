#pragma once

// Built-in holomorphic immersions with known ground truth.
//
// Rank-one quotient examples use the hyperplane model: a holomorphic curve
// v(z) in C^{n} gives the plane {w : sum_k v_k(z) w_k = 0} in Gr_{n-1}(C^n).
// The kernel of the bilinear pairing varies holomorphically, while the
// Hermitian-orthogonal complement of v(z) would not. With v_0 = 1 the columns
// e_k - v_k(z) e_0 (k >= 1) span the plane.

#include "grasspinch/immersion.hpp"

#include <map>
#include <sstream>

namespace grasspinch {

/// A scalar polynomial: list of (coefficient, exponent) pairs.
using ScalarPoly = std::vector<std::pair<cplx, std::vector<int>>>;

namespace detail {

inline PolyMatrix hyperplane_frame(const std::vector<ScalarPoly>& v, int nvars) {
  const int n = int(v.size());
  PolyMatrix F(n, n - 1, nvars);
  for (int k = 1; k < n; ++k) {
    F.add_entry(k, k - 1, 1.0, std::vector<int>(nvars, 0));
    for (const auto& [c, e] : v[k]) F.add_entry(0, k - 1, -c, e);
  }
  return F;
}

inline std::vector<int> all_rows_but(int n, int omit) {
  std::vector<int> r;
  for (int i = 0; i < n; ++i) {
    if (i != omit) r.push_back(i);
  }
  return r;
}

/// Hyperplane-model atlas: chart k is `rotations[k]`, claiming the points
/// whose normal covector is dominated by the coordinate rotations[k] e_0.
inline std::vector<AtlasChart> hyperplane_atlas(const std::vector<ComplexMatrix>& rotations) {
  std::vector<AtlasChart> atlas;
  for (const auto& g : rotations) {
    Eigen::Index lead = 0;
    g.col(0).cwiseAbs().maxCoeff(&lead);
    atlas.push_back({g, all_rows_but(int(g.rows()), int(lead))});
  }
  return atlas;
}

/// Normal covector of a hyperplane S scaled so that v_0 = 1.
inline std::optional<ComplexVector> hyperplane_covector(const ComplexMatrix& frameS) {
  const ComplexMatrix q = orthonormal_complement(frameS);
  ComplexVector v = q.col(0).conjugate();
  if (std::abs(v(0)) < 1e-9) return std::nullopt;
  return ComplexVector(v / v(0));
}

inline ComplexMatrix permutation(const std::vector<int>& image) {
  const int n = int(image.size());
  ComplexMatrix g = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) g(image[i], i) = 1.0;
  return g;
}

inline ComplexMatrix reversal(int n) {
  std::vector<int> img(n);
  for (int i = 0; i < n; ++i) img[i] = n - 1 - i;
  return permutation(img);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Plane coordinates Z = F_low F_top^{-1} for frames normalized on `top` rows.
inline std::optional<ComplexMatrix> normalized_lower(const ComplexMatrix& frameS,
                                                     const std::vector<int>& top) {
  const int p = int(frameS.cols());
  ComplexMatrix t(p, p);
  for (int i = 0; i < p; ++i) t.row(i) = frameS.row(top[i]);
  if (std::abs(t.determinant()) < 1e-9) return std::nullopt;
  return ComplexMatrix(frameS * t.inverse());
}

}  // namespace detail

/// Rational normal curve of degree d in the hyperplane model of CP^d.
inline Immersion veronese(int d) {
  if (d < 1) throw CatalogError("veronese: degree must be >= 1");
  std::vector<ScalarPoly> v(d + 1);
  for (int k = 0; k <= d; ++k) {
    v[k] = {{std::sqrt(PolyMatrix::binomial(d, k)), std::vector<int>{k}}};
  }
  Immersion f("veronese:" + std::to_string(d), 1, d + 1, d, detail::hyperplane_frame(v, 1));
  f.set_atlas(detail::hyperplane_atlas({ComplexMatrix::Identity(d + 1, d + 1), detail::reversal(d + 1)}));
  f.set_expected({true, true, 2.0 / d, d <= 2});
  f.set_description("degree-" + std::to_string(d) + " rational normal curve CP^1 -> CP^" +
                    std::to_string(d));
  const double scale = std::sqrt(double(d));
  f.set_inverse_chart([scale](const ComplexMatrix& s) -> std::optional<ComplexVector> {
    auto v = detail::hyperplane_covector(s);
    if (!v) return std::nullopt;
    ComplexVector z(1);
    z(0) = (*v)(1) / scale;
    return z;
  });
  return f;
}

/// Totally geodesic CP^m inside the hyperplane model of CP^n.
inline Immersion linear(int m, int n) {
  if (m < 1 || n < m) throw CatalogError("linear: need 1 <= m <= n");
  std::vector<ScalarPoly> v(n + 1);
  v[0] = {{1.0, std::vector<int>(m, 0)}};
  for (int i = 1; i <= m; ++i) {
    std::vector<int> e(m, 0);
    e[i - 1] = 1;
    v[i] = {{1.0, e}};
  }
  Immersion f("linear:" + std::to_string(m) + "," + std::to_string(n), m, n + 1, n,
              detail::hyperplane_frame(v, m));
  std::vector<ComplexMatrix> rots;
  for (int k = 0; k <= m; ++k) {
    std::vector<int> img(n + 1);
    for (int i = 0; i <= n; ++i) img[i] = i;
    std::swap(img[0], img[k]);
    rots.push_back(detail::permutation(img));
  }
  f.set_atlas(detail::hyperplane_atlas(rots));
  f.set_expected({true, true, 2.0, true});
  f.set_description("linear CP^" + std::to_string(m) + " in CP^" + std::to_string(n));
  f.set_inverse_chart([m](const ComplexMatrix& s) -> std::optional<ComplexVector> {
    auto v = detail::hyperplane_covector(s);
    if (!v) return std::nullopt;
    return ComplexVector(v->segment(1, m));
  });
  return f;
}

/// CP^1 x CP^1 -> CP^3 through (1, z) (x) (1, w).
inline Immersion segre() {
  // Kronecker order: (1, w, z, zw).
  std::vector<ScalarPoly> v = {{{1.0, {0, 0}}}, {{1.0, {0, 1}}}, {{1.0, {1, 0}}}, {{1.0, {1, 1}}}};
  Immersion f("segre", 2, 4, 3, detail::hyperplane_frame(v, 2));
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix r2 = detail::reversal(2);
  f.set_atlas(detail::hyperplane_atlas({detail::kron(id2, id2), detail::kron(r2, id2),
                                        detail::kron(id2, r2), detail::kron(r2, r2)}));
  f.set_expected({true, true, 1.0, true});
  f.set_description("Segre embedding CP^1 x CP^1 -> CP^3");
  f.set_inverse_chart([](const ComplexMatrix& s) -> std::optional<ComplexVector> {
    auto v = detail::hyperplane_covector(s);
    if (!v) return std::nullopt;
    ComplexVector z(2);
    z << (*v)(2), (*v)(1);
    return z;
  });
  return f;
}

namespace detail {
inline std::vector<std::pair<int, int>> pairs_of_four() {
  return {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
}
/// Second exterior power of a 4 x 4 matrix in the lexicographic pair basis.
inline ComplexMatrix wedge2(const ComplexMatrix& g) {
  const auto pairs = pairs_of_four();
  ComplexMatrix out(6, 6);
  for (int I = 0; I < 6; ++I) {
    for (int J = 0; J < 6; ++J) {
      const auto [a, b] = pairs[I];
      const auto [c, d] = pairs[J];
      out(I, J) = g(a, c) * g(b, d) - g(a, d) * g(b, c);
    }
  }
  return out;
}
}  // namespace detail

/// Gr_2(C^4) -> CP^5 through decomposable 2-vectors, hyperplane model.
inline Immersion pluecker() {
  // Plane spanned by e1 + z11 e3 + z12 e4 and e2 + z21 e3 + z22 e4, variables
  // (z11, z12, z21, z22); coordinates p12, p13, p14, p23, p24, p34.
  std::vector<ScalarPoly> v = {
      {{1.0, {0, 0, 0, 0}}},  {{1.0, {0, 0, 1, 0}}},  {{1.0, {0, 0, 0, 1}}},
      {{-1.0, {1, 0, 0, 0}}}, {{-1.0, {0, 1, 0, 0}}},
      {{1.0, {1, 0, 0, 1}}, {-1.0, {0, 1, 1, 0}}}};
  Immersion f("pluecker", 4, 6, 5, detail::hyperplane_frame(v, 4));
  std::vector<ComplexMatrix> rots;
  for (const auto& [i, j] : detail::pairs_of_four()) {
    std::vector<int> img = {i, j};
    for (int k = 0; k < 4; ++k) {
      if (k != i && k != j) img.push_back(k);
    }
    rots.push_back(detail::wedge2(detail::permutation(img)));
  }
  f.set_atlas(detail::hyperplane_atlas(rots));
  f.set_expected({true, true, 1.0, true});
  f.set_description("Pluecker embedding Gr_2(C^4) -> CP^5");
  f.set_inverse_chart([](const ComplexMatrix& s) -> std::optional<ComplexVector> {
    auto v = detail::hyperplane_covector(s);
    if (!v) return std::nullopt;
    ComplexVector z(4);
    z << -(*v)(3), -(*v)(4), (*v)(1), (*v)(2);
    return z;
  });
  return f;
}

/// CP^1 -> Gr_q(C^{2q}), l -> l (x) C^q. Quotient bundle of rank q.
inline Immersion tensor_embedding(int q) {
  if (q < 1) throw CatalogError("tensor_embedding: q must be >= 1");
  PolyMatrix F(2 * q, q, 1);
  const ComplexMatrix id = ComplexMatrix::Identity(q, q);
  ComplexMatrix top = ComplexMatrix::Zero(2 * q, q), low = ComplexMatrix::Zero(2 * q, q);
  top.topRows(q) = id;
  low.bottomRows(q) = id;
  F.add_term(top, {0});
  F.add_term(low, {1});
  Immersion f("tensor_embedding:" + std::to_string(q), 1, 2 * q, q, std::move(F));
  std::vector<int> upper(q), lower(q);
  for (int i = 0; i < q; ++i) {
    upper[i] = i;
    lower[i] = q + i;
  }
  f.set_atlas({{ComplexMatrix::Identity(2 * q, 2 * q), upper},
               {detail::kron(detail::reversal(2), id), lower}});
  f.set_expected({true, true, 2.0 / q, true});
  f.set_description("CP^1 -> Gr_" + std::to_string(q) + "(C^" + std::to_string(2 * q) +
                    "), l -> l (x) C^" + std::to_string(q));
  f.set_inverse_chart([upper, q](const ComplexMatrix& s) -> std::optional<ComplexVector> {
    auto w = detail::normalized_lower(s, upper);
    if (!w) return std::nullopt;
    ComplexVector z(1);
    z(0) = (*w)(q, 0);
    return z;
  });
  return f;
}

/// Gr_p(C^n) into itself through the affine chart [I_p; Z].
inline Immersion identity_grassmannian(int p, int n) {
  if (p < 1 || p >= n) throw CatalogError("identity_grassmannian: need 0 < p < n");
  const int q = n - p;
  const int m = p * q;
  PolyMatrix F(n, p, m);
  ComplexMatrix top = ComplexMatrix::Zero(n, p);
  top.topRows(p) = ComplexMatrix::Identity(p, p);
  F.add_term(top, std::vector<int>(m, 0));
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < p; ++j) {
      std::vector<int> e(m, 0);
      e[i * p + j] = 1;
      F.add_entry(p + i, j, 1.0, e);
    }
  }
  Immersion f("identity:p=" + std::to_string(p) + ",n=" + std::to_string(n), m, n, p,
              std::move(F));
  // One chart per p-subset of coordinate rows.
  std::vector<AtlasChart> atlas;
  std::vector<int> sel(n, 0);
  std::fill(sel.begin(), sel.begin() + p, 1);
  do {
    std::vector<int> rows, rest;
    for (int i = 0; i < n; ++i) (sel[i] ? rows : rest).push_back(i);
    std::vector<int> img = rows;
    img.insert(img.end(), rest.begin(), rest.end());
    atlas.push_back({detail::permutation(img), rows});
  } while (std::prev_permutation(sel.begin(), sel.end()));
  f.set_atlas(std::move(atlas));
  const bool flat = (q == 1);
  f.set_expected({true, flat, flat ? 2.0 : 1.0, true});
  f.set_description("identity of Gr_" + std::to_string(p) + "(C^" + std::to_string(n) + ")");
  std::vector<int> upper(p);
  for (int i = 0; i < p; ++i) upper[i] = i;
  f.set_inverse_chart([upper, p, q](const ComplexMatrix& s) -> std::optional<ComplexVector> {
    auto w = detail::normalized_lower(s, upper);
    if (!w) return std::nullopt;
    ComplexVector z(p * q);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < p; ++j) z(i * p + j) = (*w)(p + i, j);
    }
    return z;
  });
  return f;
}

/// Negative control: a generic holomorphic surface in Gr_2(C^4) whose pulled
/// back quotient bundle is not projectively flat.
inline Immersion perturbed_fixture() {
  PolyMatrix F(4, 2, 2);
  ComplexMatrix top = ComplexMatrix::Zero(4, 2);
  top.topRows(2) = ComplexMatrix::Identity(2, 2);
  F.add_term(top, {0, 0});
  F.add_entry(2, 0, 1.0, {1, 0});          // z
  F.add_entry(2, 1, 1.0, {0, 1});          // w
  F.add_entry(3, 0, 1.0, {1, 1});          // z w
  F.add_entry(3, 1, 1.0, {2, 0});          // z^2
  F.add_entry(3, 1, cplx(0.5, 0.25), {0, 1});
  Immersion f("perturbed", 2, 4, 2, std::move(F));
  f.set_expected({true, false, 0.0, false});
  f.set_description("generic surface in Gr_2(C^4) (non-flat negative control)");
  return f;
}

struct CatalogEntry {
  std::string id;
  std::string usage;
};

inline std::vector<CatalogEntry> catalog_listing() {
  return {{"veronese", "veronese:d"},
          {"linear", "linear:m,n"},
          {"segre", "segre"},
          {"pluecker", "pluecker"},
          {"tensor_embedding", "tensor_embedding:q"},
          {"identity", "identity:p=P,n=N"},
          {"perturbed", "perturbed"}};
}

/// Parses "name", "name:3", "name:1,3" or "name:p=2,n=4".
inline Immersion make_immersion(const std::string& id) {
  const auto colon = id.find(':');
  const std::string name = id.substr(0, colon);
  std::vector<int> positional;
  std::map<std::string, int> named;
  if (colon != std::string::npos) {
    std::stringstream ss(id.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) throw CatalogError("empty parameter in '" + id + "'");
      const auto eq = tok.find('=');
      try {
        size_t used = 0;
        if (eq == std::string::npos) {
          positional.push_back(std::stoi(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } else {
          const std::string v = tok.substr(eq + 1);
          named[tok.substr(0, eq)] = std::stoi(v, &used);
          if (used != v.size()) throw std::invalid_argument(tok);
        }
      } catch (const std::logic_error&) {
        throw CatalogError("bad parameter '" + tok + "' in '" + id + "'");
      }
    }
  }
  auto param = [&](const std::string& key, size_t pos) -> int {
    if (named.count(key)) return named.at(key);
    if (pos < positional.size()) return positional[pos];
    throw CatalogError("missing parameter '" + key + "' for " + name);
  };
  if (name == "veronese") return veronese(param("d", 0));
  if (name == "linear") return linear(param("m", 0), param("n", 1));
  if (name == "segre") return segre();
  if (name == "pluecker") return pluecker();
  if (name == "tensor_embedding") return tensor_embedding(param("q", 0));
  if (name == "identity") return identity_grassmannian(param("p", 0), param("n", 1));
  if (name == "perturbed") return perturbed_fixture();
  throw CatalogError("unknown catalog member '" + name + "'");
}

}  // namespace grasspinch
