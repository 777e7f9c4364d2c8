#include "grasspinch/grasspinch.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace grasspinch;

namespace {

ComplexMatrix gaussian(std::mt19937_64& rng, int r, int c) { return random_gaussian(rng, r, c); }

// Projector onto the column span, computed by QR rather than the library path.
ComplexMatrix span_projector(const ComplexMatrix& a) {
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(a.rows(), a.cols());
  return q * q.adjoint();
}

std::shared_ptr<const GrassmannPoint> shared_point(int n, int p, std::uint64_t seed) {
  return std::make_shared<const GrassmannPoint>(random_point(n, p, seed));
}

}  // namespace

// --- linear algebra --------------------------------------------------------

TEST(Orthonormalize, SingleColumn) {
  ComplexMatrix a(2, 1);
  a << 3.0, 4.0;
  const ComplexMatrix b = orthonormalize(a);
  EXPECT_NEAR(std::abs(b(0, 0) - 0.6), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b(1, 0) - 0.8), 0.0, 1e-15);
}

TEST(Orthonormalize, UnitarySpanAndPositiveDiagonal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = gaussian(rng, 6, 3);
    const ComplexMatrix b = orthonormalize(a);
    EXPECT_LT((b.adjoint() * b - ComplexMatrix::Identity(3, 3)).norm(), 1e-12);
    EXPECT_LT((span_projector(a) - b * b.adjoint()).norm(), 1e-12);
    const ComplexMatrix r = b.adjoint() * a;
    for (int i = 0; i < 3; ++i) {
      EXPECT_GT(r(i, i).real(), 0.0);
      EXPECT_NEAR(r(i, i).imag(), 0.0, 1e-12);
    }
    EXPECT_EQ(b, orthonormalize(a));
  }
}

TEST(Orthonormalize, RankDeficientThrows) {
  ComplexMatrix a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  EXPECT_THROW(orthonormalize(a), DegenerateFrameError);
}

TEST(OrthonormalComplement, CompletesToUnitary) {
  std::mt19937_64 rng(5);
  const ComplexMatrix s = orthonormalize(gaussian(rng, 5, 2));
  const ComplexMatrix q = orthonormal_complement(s);
  ASSERT_EQ(q.cols(), 3);
  ComplexMatrix u(5, 5);
  u << s, q;
  EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(Eigenpair, DiagonalAndSymmetryCheck) {
  RealMatrix b = RealMatrix::Zero(3, 3);
  b.diagonal() << 1.0, 5.0, -2.0;
  const auto ep = max_hermitian_eigenpair(b);
  EXPECT_DOUBLE_EQ(ep.value, 5.0);
  EXPECT_NEAR(ep.vector(1), 1.0, 1e-12);
  b(0, 1) = 1.0;
  EXPECT_THROW(max_hermitian_eigenpair(b), ConventionError);
}

TEST(Hdot, TraceForm) {
  std::mt19937_64 rng(7);
  const ComplexMatrix a = gaussian(rng, 3, 2), b = gaussian(rng, 3, 2);
  EXPECT_LT(std::abs(hdot(a, b) - (b.adjoint() * a).trace()), 1e-13);
}

// --- jets and series -------------------------------------------------------

TEST(JetScalar, MatchesCentralDifferences) {
  const cplx z0(0.3, -0.7), w0(-1.1, 0.4);
  auto f = [](auto z, auto w) { return pow(z, 3) * w + z * cplx(2.0, 1.0) / (w + cplx(3.0)); };
  const JetScalar j = f(JetScalar::variable(z0, 0, 2), JetScalar::variable(w0, 1, 2));
  auto fc = [](cplx z, cplx w) { return z * z * z * w + z * cplx(2.0, 1.0) / (w + cplx(3.0)); };
  const double h = 1e-6;
  const cplx dz = (fc(z0 + h, w0) - fc(z0 - h, w0)) / (2 * h);
  const cplx dw = (fc(z0, w0 + h) - fc(z0, w0 - h)) / (2 * h);
  EXPECT_LT(std::abs(j.value() - fc(z0, w0)), 1e-14);
  EXPECT_LT(std::abs(j.partial(0) - dz), 1e-8);
  EXPECT_LT(std::abs(j.partial(1) - dw), 1e-8);
}

TEST(TaylorSeries, PolynomialAlongDirection) {
  // P(z) = z^3 along z0 + t u: coefficients are binomial expansions.
  PolyMatrix p(1, 1, 1);
  p.add_entry(0, 0, 1.0, {3});
  const auto sp = taylor_space(1, 3);
  ComplexVector z0(1), u(1);
  z0 << cplx(0.5, 0.2);
  u << cplx(-0.3, 0.9);
  const TaylorMatrix s = p.taylor_along(sp, z0, {u});
  const int t = sp->holomorphic_var(0);
  const cplx a = z0(0), b = u(0);
  EXPECT_LT(std::abs(s.value()(0, 0) - a * a * a), 1e-14);
  EXPECT_LT(std::abs(s.derivative(t).value()(0, 0) - 3.0 * a * a * b), 1e-14);
  EXPECT_LT(std::abs(s.derivative(t).derivative(t).value()(0, 0) - 6.0 * a * b * b), 1e-14);
  EXPECT_LT(std::abs(s.derivative(t).derivative(t).derivative(t).value()(0, 0) - 6.0 * b * b * b),
            1e-14);
  EXPECT_LT(std::abs(s.derivative(sp->antiholomorphic_var(0)).value()(0, 0)), 1e-15);
}

TEST(TaylorSeries, AdjointIsAntiholomorphicAndInverseIsExact) {
  PolyMatrix p(2, 2, 1);
  p.add_term(ComplexMatrix::Identity(2, 2), {0});
  p.add_entry(0, 1, cplx(1.0, 2.0), {1});
  p.add_entry(1, 0, 0.5, {2});
  const auto sp = taylor_space(1, 3);
  ComplexVector z0(1), u(1);
  z0 << cplx(0.1, 0.3);
  u << 1.0;
  const TaylorMatrix a = p.taylor_along(sp, z0, {u});
  const TaylorMatrix adj = a.adjoint();
  const int dz = sp->holomorphic_var(0), dzb = sp->antiholomorphic_var(0);
  EXPECT_LT((adj.derivative(dz).value()).norm(), 1e-15);
  EXPECT_LT((adj.derivative(dzb).value() - a.derivative(dz).value().adjoint()).norm(), 1e-14);
  const TaylorMatrix prod = inverse(a) * a;
  EXPECT_LT((prod.value() - ComplexMatrix::Identity(2, 2)).norm(), 1e-13);
  EXPECT_LT(prod.derivative(dz).value().norm(), 1e-13);
  EXPECT_LT(prod.derivative(dz).derivative(dz).derivative(dz).value().norm(), 1e-12);
}

TEST(Polynomial, PartialsMatchFiniteDifferences) {
  const Immersion f = segre();
  const PolyMatrix& F = f.chart_map(0);
  ComplexVector z(2);
  z << cplx(0.2, -0.4), cplx(0.7, 0.1);
  const auto d = F.value_and_partials(z);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    ComplexVector zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    const ComplexMatrix fd = (F.evaluate(zp) - F.evaluate(zm)) / (2 * h);
    EXPECT_LT((d[i + 1] - fd).norm(), 1e-8);
    EXPECT_LT((F.partial(i).evaluate(z) - d[i + 1]).norm(), 1e-13);
  }
}

// --- ambient Grassmannian --------------------------------------------------

TEST(Grassmannian, MetricFormulasAgree) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto x = shared_point(5, 2, s);
    const AmbientTangent u = random_tangent(x, s + 100, false), v = random_tangent(x, s + 200, false);
    const cplx frame = (v.mat.adjoint() * u.mat).trace();
    EXPECT_LT(std::abs(metric(u, v) - frame), 1e-12);
    EXPECT_LT(std::abs(metric_trace_formula(u, v) - frame), 1e-12);
    EXPECT_LT(std::abs(metric_section_sum(u, v) - frame), 1e-12);
    // Ambient representatives carry the same inner product.
    EXPECT_LT(std::abs((v.ambient().adjoint() * u.ambient()).trace() - frame), 1e-12);
  }
}

TEST(Grassmannian, HolOnProjectiveSpaceIsTwo) {
  for (int n = 2; n <= 6; ++n) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      auto x = shared_point(n, n - 1, 31 * s + n);
      EXPECT_NEAR(hol_sectional(random_tangent(x, s, true)), 2.0, 1e-12);
    }
  }
}

TEST(Grassmannian, HolFromSingularValues) {
  // Hol(U) = 2 sum s_i^4 / (sum s_i^2)^2 over singular values of U.
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto x = shared_point(5, 2, s);
    const AmbientTangent u = random_tangent(x, s + 7, true);
    Eigen::JacobiSVD<ComplexMatrix> svd(u.mat);
    const RealVector sv = svd.singularValues();
    const double expected = 2.0 * sv.array().pow(4).sum() / std::pow(sv.squaredNorm(), 2);
    EXPECT_NEAR(hol_sectional(u), expected, 1e-12);
    EXPECT_GE(hol_sectional(u), 2.0 / std::min(x->p(), x->q()) - 1e-12);
    EXPECT_NEAR(hol_sectional(u.scaled(std::polar(1.0, 0.37 * s))), hol_sectional(u), 1e-12);
  }
}

TEST(Grassmannian, HolRejectsNonUnit) {
  auto x = shared_point(4, 2, 1);
  EXPECT_THROW(hol_sectional(random_tangent(x, 2, false).scaled(3.0)), NonUnitError);
}

TEST(Grassmannian, GaugeInvariance) {
  std::mt19937_64 rng(11);
  auto x = shared_point(5, 3, 4);
  const ComplexMatrix a = random_unitary(rng, 3), b = random_unitary(rng, 2);
  auto y = std::make_shared<const GrassmannPoint>(x->regauged(a, b));
  const AmbientTangent u = random_tangent(x, 5, true), v = random_tangent(x, 6, false);
  // Same ambient vectors expressed in the rotated frames.
  const AmbientTangent uy(y, b.adjoint() * u.mat * a), vy(y, b.adjoint() * v.mat * a);
  EXPECT_LT((uy.ambient() - u.ambient()).norm(), 1e-12);
  EXPECT_LT(std::abs(metric(uy, vy) - metric(u, v)), 1e-12);
  EXPECT_NEAR(hol_sectional(uy), hol_sectional(u), 1e-12);
}

TEST(Grassmannian, CurvatureAmbientFormMatchesFrameForm) {
  auto x = shared_point(5, 2, 9);
  const AmbientTangent u = random_tangent(x, 1, false), v = random_tangent(x, 2, false),
                       z = random_tangent(x, 3, false);
  const ComplexMatrix amb = curvature_Gr_ambient(u.ambient(), v.ambient(), z.ambient());
  // Only the Hom(S, Q) block is the tangent part.
  const ComplexMatrix block = x->frameQ().adjoint() * amb * x->frameS();
  EXPECT_LT((block - curvature_Gr(u, v, z).mat).norm(), 1e-12);
}

TEST(Grassmannian, SectionDerivativeByFiniteDifferences) {
  // Independent oracle: frame curve from QR, sections projected by hand.
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto x = shared_point(5, 2, s + 50);
    const AmbientTangent u = random_tangent(x, s, false);
    std::mt19937_64 rng(s);
    const ComplexVector w = gaussian(rng, 5, 1);
    const double h = 1e-5;
    auto proj = [&](double t) { return span_projector(x->frameS() + t * x->frameQ() * u.mat); };
    const ComplexMatrix dp = (proj(h) - proj(-h)) / (2 * h);
    // d/dt of pi_S(w) restricted to S^perp components gives H; of pi_Q(w) in S gives K.
    const ComplexVector ws = x->frameS().adjoint() * w, wq = x->frameQ().adjoint() * w;
    const ComplexVector dS = x->frameQ().adjoint() * dp * (x->frameS() * ws);
    const ComplexVector dQ = x->frameS().adjoint() * (-dp) * (x->frameQ() * wq);
    EXPECT_LT((dS - (u.mat * ws)).norm(), 1e-6);
    // The real curve has velocity U + conj(U); its Q -> S block is -U^* = K.
    EXPECT_LT((dQ - second_ff_K(u).mat * wq).norm(), 1e-6);
  }
}

// --- immersions and catalog ------------------------------------------------

TEST(Immersion, PushforwardMatchesProjectorDerivative) {
  for (const char* id : {"veronese:3", "segre", "tensor_embedding:2", "perturbed"}) {
    const Immersion f = make_immersion(id);
    ComplexVector z = ComplexVector::Constant(f.m(), cplx(0.2, -0.1));
    std::mt19937_64 rng(1);
    const ComplexVector u = gaussian(rng, f.m(), 1);
    const AmbientTangent t = pushforward(f, {0, z}, u);
    const double h = 1e-6;
    auto proj = [&](double s) { return span_projector(f.chart_map(0).evaluate(z + s * u)); };
    const ComplexMatrix fd = (proj(h) - proj(-h)) / (2 * h);
    const ComplexMatrix x = t.ambient();
    EXPECT_LT((fd - (x + x.adjoint())).norm(), 1e-7) << id;
  }
}

TEST(Immersion, CentralDifferenceModeAgreesWithJets) {
  const Immersion f = veronese(3);
  ComplexVector z(1);
  z << cplx(0.4, 0.2);
  DifferentiationConfig fd;
  fd.mode = DifferentiationConfig::Mode::CentralDifferences;
  const ComplexMatrix g1 = induced_metric(f, {0, z});
  const ComplexMatrix g2 = induced_metric(f, {0, z}, fd);
  EXPECT_LT((g1 - g2).norm(), 1e-6);
  fd.step = 1.0;
  EXPECT_THROW(induced_metric(f, {0, z}, fd), DifferentiationError);
}

TEST(Immersion, CatalogMembersValidate) {
  for (const char* id : {"veronese:1", "veronese:4", "linear:2,4", "segre", "pluecker",
                         "tensor_embedding:3", "identity:p=2,n=4", "perturbed"}) {
    const Immersion f = make_immersion(id);
    const ImmersionValidation v = validate_immersion(f);
    EXPECT_TRUE(v.ok) << id;
    EXPECT_LT(v.maxHolomorphyResidual, 1e-6) << id;
  }
}

TEST(Immersion, InverseChartRoundTrip) {
  for (const char* id : {"veronese:3", "segre", "pluecker", "tensor_embedding:2", "linear:2,3",
                         "identity:p=2,n=4"}) {
    const Immersion f = make_immersion(id);
    std::mt19937_64 rng(4);
    for (int k = 0; k < f.chart_count(); ++k) {
      const ComplexVector z = 0.5 * gaussian(rng, f.m(), 1);
      const GrassmannPoint x = evaluate(f, {k, z});
      const auto back = f.chart_coordinates(x, k);
      ASSERT_TRUE(back.has_value()) << id;
      EXPECT_LT((*back - z).norm(), 1e-10) << id << " chart " << k;
    }
  }
}

TEST(Immersion, SelectorPartitionsAtlas) {
  const Immersion f = veronese(2);
  ComplexVector z(1);
  z << cplx(0.3, 0.1);
  EXPECT_EQ(f.select_chart(evaluate(f, {0, z})), 0);
  z << cplx(3.0, 0.0);
  EXPECT_EQ(f.select_chart(evaluate(f, {0, z})), 1);
}

TEST(ImmersionJson, ConicFromSamples) {
  const Immersion f = immersion_from_file("samples/conic.json");
  EXPECT_EQ(f.id(), "conic");
  EXPECT_EQ(f.n(), 3);
  EXPECT_EQ(f.m(), 1);
  const Immersion v = veronese(2);
  ComplexVector z(1);
  z << cplx(0.25, 0.5);
  EXPECT_NEAR(hol_M(f, {0, z}, ComplexVector::Ones(1)).intrinsic, 1.0, 1e-8);
  EXPECT_TRUE(evaluate(f, {0, z}).same_plane(evaluate(v, {0, z})));
}

TEST(ImmersionJson, RejectsMalformedInput) {
  using nlohmann::json;
  EXPECT_THROW(immersion_from_json(json{{"n", 3}, {"p", 2}, {"m", 1}, {"monomial_frame", json::array()}, {"extra", 1}}),
               CatalogError);
  EXPECT_THROW(immersion_from_json(json{{"n", 3}, {"p", 2}, {"m", 1}}), CatalogError);
  // Rank-deficient (all zero) frame.
  EXPECT_THROW(immersion_from_json(json{{"n", 2}, {"p", 1}, {"m", 1}, {"monomial_frame", json::array()}}),
               CatalogError);
  const json badRows = json::parse(R"({"n":2,"p":1,"m":1,"monomial_frame":[[[[1]],[0]]]})");
  EXPECT_THROW(immersion_from_json(badRows), CatalogError);
  EXPECT_THROW(immersion_from_file("samples/does_not_exist.json"), CatalogError);
}

TEST(Catalog, ParsesSpecs) {
  EXPECT_EQ(make_immersion("veronese:3").n(), 4);
  EXPECT_EQ(make_immersion("linear:2,5").m(), 2);
  EXPECT_EQ(make_immersion("identity:p=2,n=5").q(), 3);
  EXPECT_EQ(make_immersion("tensor_embedding:q=3").q(), 3);
  EXPECT_THROW(make_immersion("nosuch"), CatalogError);
  EXPECT_THROW(make_immersion("veronese:x"), CatalogError);
  EXPECT_THROW(make_immersion("veronese"), CatalogError);
  EXPECT_THROW(make_immersion("veronese:0"), CatalogError);
}

TEST(Catalog, ExpectedMetadata) {
  for (int d = 1; d <= 4; ++d) {
    const auto e = veronese(d).expected();
    EXPECT_DOUBLE_EQ(e.minHol, 2.0 / d);
    EXPECT_EQ(e.parallel, d <= 2);
  }
  for (int q = 1; q <= 3; ++q) EXPECT_DOUBLE_EQ(tensor_embedding(q).expected().minHol, 2.0 / q);
  EXPECT_FALSE(identity_grassmannian(2, 4).expected().projectivelyFlat);
  EXPECT_TRUE(identity_grassmannian(3, 4).expected().projectivelyFlat);
  EXPECT_FALSE(perturbed_fixture().expected().projectivelyFlat);
}
