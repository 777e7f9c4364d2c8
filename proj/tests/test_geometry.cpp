#include "grasspinch/grasspinch.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace grasspinch;

namespace {

// Gaussian curvature of a conformal metric g |dz|^2 by a five-point Laplacian:
// K = -Laplacian(log g) / (4 g). Equals Hol for complex curves.
double fd_gauss_curvature(const Immersion& f, cplx z0, double h = 1e-3) {
  auto g = [&](cplx z) {
    return std::real(induced_metric(f, {0, ComplexVector::Constant(1, z)})(0, 0));
  };
  const double c = std::log(g(z0));
  const double lap = (std::log(g(z0 + h)) + std::log(g(z0 - h)) + std::log(g(z0 + cplx(0, h))) +
                      std::log(g(z0 - cplx(0, h))) - 4.0 * c) /
                     (h * h);
  return -lap / (4.0 * g(z0));
}

ChartPoint at(cplx a) { return {0, ComplexVector::Constant(1, a)}; }

ChartPoint at(cplx a, cplx b) {
  ComplexVector z(2);
  z << a, b;
  return {0, z};
}

SearchPlan small_search() {
  SearchPlan s;
  s.grid = 4;
  s.fiberSamples = 8;
  s.refineCandidates = 4;
  return s;
}

}  // namespace

// --- holomorphic sectional curvature ---------------------------------------

TEST(HolOracle, CurvesMatchGaussianCurvature) {
  for (int d = 1; d <= 4; ++d) {
    const Immersion f = veronese(d);
    for (cplx z : {cplx(0.0), cplx(0.3, 0.4), cplx(-0.6, 0.1)}) {
      const double k = fd_gauss_curvature(f, z);
      const HolM hm = hol_M(f, at(z), ComplexVector::Ones(1));
      EXPECT_NEAR(hm.intrinsic, k, 1e-5) << "d=" << d;
      EXPECT_NEAR(hm.intrinsic, 2.0 / d, 1e-8) << "d=" << d;
    }
  }
  const Immersion conic = immersion_from_file("samples/conic.json");
  EXPECT_NEAR(hol_M(conic, at(cplx(0.2, 0.7)), ComplexVector::Ones(1)).intrinsic,
              fd_gauss_curvature(conic, cplx(0.2, 0.7)), 1e-5);
}

TEST(HolOracle, SegreProductFormula) {
  // Product metric: Hol = 2(|a|^4 + |b|^4) in orthonormal factor components.
  const Immersion f = segre();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const ChartPoint cp = at(cplx(0.3 * k / 10.0, -0.2), cplx(-0.5, 0.05 * k));
    const ComplexMatrix h = induced_metric(f, cp);
    ASSERT_LT(std::abs(h(0, 1)), 1e-12);
    ComplexVector u = random_unit_vector(rng, 2);
    u(0) /= std::sqrt(h(0, 0).real());
    u(1) /= std::sqrt(h(1, 1).real());
    const double a = std::norm(u(0)) * h(0, 0).real(), b = std::norm(u(1)) * h(1, 1).real();
    EXPECT_NEAR(hol_M(f, cp, u).intrinsic, 2.0 * (a * a + b * b), 1e-8);
    EXPECT_NEAR(hol_M(f, cp, u).extrinsic, 2.0 * (a * a + b * b), 1e-8);
  }
}

TEST(SecondFundamentalForm, VeroneseCubicNorm) {
  const Immersion f = veronese(3);
  for (cplx z : {cplx(0.0), cplx(0.5, -0.5)}) {
    const FundamentalFormData d = fundamental_form_data(f, at(z));
    const ComplexVector e = normalize_chart(f, at(z), ComplexVector::Ones(1));
    EXPECT_NEAR(d.sigma_mat(e, e).squaredNorm(), 4.0 / 3.0, 1e-10);
  }
  const FundamentalFormData lin = fundamental_form_data(linear(1, 3), at(cplx(0.2, 0.1)));
  EXPECT_LT(lin.sigma_mat(ComplexVector::Ones(1), ComplexVector::Ones(1)).norm(), 1e-12);
}

// --- submanifold identities ------------------------------------------------

TEST(SubmanifoldSuite, FlatMembersPassAllEntries) {
  SubmanifoldSuitePlan plan;
  plan.samples = 20;
  plan.grid = 2;
  for (const char* id : {"veronese:2", "veronese:3", "segre", "tensor_embedding:2", "linear:1,3"}) {
    const ResidualTable t = submanifold_identities(make_immersion(id), plan);
    for (const auto& [k, e] : t) EXPECT_TRUE(e.passed()) << id << " " << k << " " << e.value;
    EXPECT_TRUE(t.count("nablaBarSigma")) << id;
    EXPECT_TRUE(t.count("sigmaKComposition")) << id;
  }
}

TEST(SubmanifoldSuite, NonFlatMemberHasCurvatureTerm) {
  const Immersion f = perturbed_fixture();
  SubmanifoldSuitePlan plan;
  plan.samples = 10;
  plan.grid = 2;
  plan.flat = false;
  const ResidualTable t = submanifold_identities(f, plan);
  EXPECT_TRUE(all_passed(t));
  EXPECT_FALSE(t.count("nablaBarSigma"));
  const ChartPoint cp = at(cplx(0.1, 0.2), cplx(-0.3, 0.1));
  const FundamentalFormData d = fundamental_form_data(f, cp);
  ComplexVector u(2), v(2), z(2);
  u << 1.0, 0.5;
  v << cplx(0.0, 1.0), 1.0;
  z << 0.3, -1.0;
  const AmbientTangent nb = nabla_bar_sigma(f, cp, v, u, z);
  EXPECT_GT(nb.mat.norm(), 1e-2);
  EXPECT_LT((nb.mat - curvature_normal_part(d, u, v, z).mat).norm(), 1e-6);
}

TEST(CompositionNorm, VanishesOnFlatAndExactlyOnTotallyGeodesic) {
  EXPECT_LE(composition_check(linear(1, 3)), 1e-12);
  EXPECT_LE(composition_check(linear(2, 4)), 1e-12);
  EXPECT_LT(composition_check(veronese(3)), 1e-5);
  EXPECT_LT(composition_check(segre()), 1e-5);
}

// --- flatness --------------------------------------------------------------

TEST(Flatness, TensorEmbeddingHolIsTwoOverQ) {
  for (int q = 1; q <= 3; ++q) {
    const Immersion f = tensor_embedding(q);
    const FlatnessReport r = flatness_residual(f);
    EXPECT_TRUE(r.flat);
    EXPECT_LT(r.maxResidual, 1e-8);
    ASSERT_TRUE(r.holGrDeviation.has_value());
    EXPECT_LT(*r.holGrDeviation, 1e-8);
    EXPECT_TRUE(r.rankCheckPassed);
    // Operator form: -H_U K_conj(U) = U U^* = (1/q) Id for unit U.
    const FundamentalFormData d = fundamental_form_data(f, at(cplx(0.4, -0.3)));
    const ComplexVector e = normalize_chart(f, d.point, ComplexVector::Ones(1));
    const ComplexMatrix op = -(second_ff_H(d.tangent(e)).mat * second_ff_K(d.tangent(e)).mat);
    EXPECT_LT((op - ComplexMatrix::Identity(q, q) / double(q)).norm(), 1e-8);
  }
}

TEST(Flatness, NegativeControls) {
  for (const char* id : {"identity:p=2,n=4", "perturbed"}) {
    const FlatnessReport r = flatness_residual(make_immersion(id));
    EXPECT_FALSE(r.flat) << id;
    EXPECT_GT(r.maxResidual, 0.01) << id;
    EXPECT_FALSE(r.holGrDeviation.has_value()) << id;
  }
  EXPECT_TRUE(flatness_residual(identity_grassmannian(3, 4)).flat);
}

// --- pinching and parallelism ----------------------------------------------

TEST(MinHol, CatalogValues) {
  const SearchPlan s = small_search();
  EXPECT_NEAR(min_hol(veronese(2), s).minHol, 1.0, 1e-3);
  EXPECT_NEAR(min_hol(veronese(3), s).minHol, 2.0 / 3.0, 1e-3);
  EXPECT_NEAR(min_hol(veronese(4), s).minHol, 0.5, 1e-3);
  EXPECT_NEAR(min_hol(linear(1, 3), s).minHol, 2.0, 1e-3);
  EXPECT_NEAR(min_hol(tensor_embedding(3), s).minHol, 2.0 / 3.0, 1e-3);
  EXPECT_NEAR(min_hol(segre(), s).minHol, 1.0, 1e-3);
}

TEST(MinHol, GridDoublingIsStable) {
  SearchPlan a = small_search(), b = small_search();
  b.grid = 2 * a.grid;
  for (const char* id : {"veronese:3", "tensor_embedding:2"}) {
    const Immersion f = make_immersion(id);
    EXPECT_LT(std::abs(min_hol(f, a).minHol - min_hol(f, b).minHol), 1e-4) << id;
  }
}

TEST(MinHol, IndependentOfWorkerCount) {
  const SearchPlan s = small_search();
  ::setenv("GRASSPINCH_THREADS", "1", 1);
  const MinHolResult one = min_hol(segre(), s);
  ::setenv("GRASSPINCH_THREADS", "3", 1);
  const MinHolResult three = min_hol(segre(), s);
  ::unsetenv("GRASSPINCH_THREADS");
  EXPECT_EQ(one.minHol, three.minHol);
  ASSERT_EQ(one.samples.size(), three.samples.size());
  for (size_t i = 0; i < one.samples.size(); ++i) EXPECT_EQ(one.samples[i].hol, three.samples[i].hol);
}

TEST(Parallelism, VeroneseFamily) {
  const SearchPlan s = small_search();
  EXPECT_LT(parallelism_norm(veronese(2), s).maxNablaSigma, 1e-6);
  EXPECT_GT(parallelism_norm(veronese(3), s).maxNablaSigma, 0.1);
  EXPECT_GT(parallelism_norm(veronese(4), s).maxNablaSigma, 0.1);
  EXPECT_LT(parallelism_norm(tensor_embedding(2), s).maxNablaSigma, 1e-6);
}

TEST(Verdict, BiconditionalOnVeronese) {
  VerdictPlan plan;
  plan.search = small_search();
  plan.identitySamples = 6;
  const PinchingVerdict v2 = pinching_verdict(veronese(2), plan);
  EXPECT_EQ(v2.status, Status::Pass);
  EXPECT_TRUE(v2.pinchedFlag);
  EXPECT_TRUE(v2.parallelFlag);
  EXPECT_LT(v2.shapeIdentityMaxResidual, 1e-4);
  const PinchingVerdict v3 = pinching_verdict(veronese(3), plan);
  EXPECT_EQ(v3.status, Status::Pass);
  EXPECT_FALSE(v3.pinchedFlag);
  EXPECT_FALSE(v3.parallelFlag);
  EXPECT_TRUE(v3.biconditionalAgrees);
  EXPECT_GT(v3.shapeIdentityMaxResidual, 0.1);
  const PinchingVerdict bad = pinching_verdict(identity_grassmannian(2, 4), plan);
  EXPECT_EQ(bad.status, Status::HypothesisNotMet);
}

TEST(LambdaChain, VeroneseConicHitsBoundary) {
  const Immersion f = veronese(2);
  const LambdaChain c = lambda_chain(f, at(cplx(0.3, 0.2)), ComplexVector::Ones(1));
  EXPECT_FALSE(c.vacuous);
  EXPECT_GE(c.worstSlack, -1e-6);
  EXPECT_NEAR(c.slackPinching, 0.0, 1e-3);
  EXPECT_TRUE(lambda_chain(linear(1, 3), at(cplx(0.1)), ComplexVector::Ones(1)).vacuous);
}

TEST(SecondVariation, AssembledMatchesDirect) {
  for (const char* id : {"veronese:3", "veronese:4", "segre", "tensor_embedding:2"}) {
    const Immersion f = make_immersion(id);
    for (const auto& [cp, u] : identity_samples(f, 5, 2, 9)) {
      EXPECT_LT(second_variation_residual(f, cp, u), 1e-3) << id;
    }
  }
}

// --- integration -----------------------------------------------------------

TEST(Quadrature, GaussLegendreAndSphereMass) {
  for (int n = 1; n <= 8; ++n) {
    const auto rule = gauss_legendre01(n);
    double s = 0.0;
    for (const auto& [x, w] : rule) s += w * std::pow(x, 2 * n - 1);
    EXPECT_NEAR(s, 1.0 / (2 * n), 1e-14);
  }
  EXPECT_NEAR(sphere_mass(1), 2.0 * kPi, 1e-14);
  EXPECT_NEAR(sphere_mass(2), 2.0 * kPi * kPi, 1e-13);
  EXPECT_NEAR(sphere_mass(3), kPi * kPi * kPi, 1e-12);
}

TEST(Integration, CurveVolumesAreTwoPiD) {
  for (int d = 1; d <= 3; ++d) {
    const UMPlan plan = build_um_plan(veronese(d), 16, 1, 1);
    EXPECT_NEAR(volume(plan).value.real() / (2.0 * kPi * d), 1.0, 1e-3) << d;
  }
  const UMPlan coarse = build_um_plan(veronese(2), 8, 1, 1);
  const UMPlan fine = build_um_plan(veronese(2), 16, 1, 1);
  EXPECT_LT(std::abs(volume(fine).value.real() - 4.0 * kPi),
            std::abs(volume(coarse).value.real() - 4.0 * kPi) + 1e-12);
}

TEST(Integration, PlansAreDeterministic) {
  const UMPlan a = build_um_plan(segre(), 2, 2, 5), b = build_um_plan(segre(), 2, 2, 5);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].z, b.samples[i].z);
    EXPECT_EQ(a.samples[i].u, b.samples[i].u);
    EXPECT_EQ(a.samples[i].weight, b.samples[i].weight);
  }
}

TEST(Integration, MisconfiguredAtlasIsRejected) {
  // Swapped selector rows make each chart claim points only the other chart samples.
  Immersion f = veronese(2);
  auto atlas = f.atlas();
  std::swap(atlas[0].selectorRows, atlas[1].selectorRows);
  f.set_atlas(atlas);
  EXPECT_THROW(build_um_plan(f, 8, 1, 1), AtlasError);
}

TEST(Integration, FirstVariationIsNotPhaseInvariant) {
  const Immersion f = perturbed_fixture();
  const UMPlan plan = build_um_plan(f, 1, 2, 1);
  EXPECT_THROW(sphere_bundle_integral(f, first_variation_integrand, plan), PhaseInvarianceError);
  EXPECT_NO_THROW(sphere_bundle_integral(f, second_variation_integrand, plan));
}

TEST(Integration, SecondVariationIntegralVanishes) {
  for (const char* id : {"veronese:2", "veronese:3", "tensor_embedding:2"}) {
    const Immersion f = make_immersion(id);
    const BundleIntegral r = sphere_bundle_integral(f, second_variation_integrand, build_um_plan(f, 12, 1, 1));
    EXPECT_TRUE(r.withinBand) << id << " " << r.estimate;
  }
}

TEST(Integration, CurvatureAndDerivativeTermsBalance) {
  for (int d : {3, 4}) {
    const Immersion f = veronese(d);
    const TermBalance b = term_balance(f, build_um_plan(f, 12, 1, 1));
    EXPECT_FALSE(b.trivial);
    EXPECT_FALSE(b.inconclusive);
    EXPECT_LT(b.balanceResidual, 0.02) << d;
    EXPECT_LT(b.curvatureTerm, 0.0);
    EXPECT_GT(b.nablaSigmaTerm, 0.0);
    EXPECT_GT(std::abs(b.curvatureTerm), 10.0 * b.curvatureSE);
    EXPECT_GT(b.nablaSigmaTerm, 10.0 * b.nablaSigmaSE);
  }
  const TermBalance par = term_balance(veronese(2), build_um_plan(veronese(2), 8, 1, 1));
  EXPECT_TRUE(par.trivial);
}

// --- ambient battery -------------------------------------------------------

TEST(AmbientBattery, AllEntriesPass) {
  for (const auto& [n, p] : std::vector<std::pair<int, int>>{{4, 2}, {5, 2}, {6, 3}, {3, 1}}) {
    const ResidualTable t = ambient_identities(n, p, 20, 1);
    for (const auto& [k, e] : t) EXPECT_TRUE(e.passed()) << n << "," << p << " " << k;
    EXPECT_TRUE(t.count("hyperplaneHol6"));
  }
}
