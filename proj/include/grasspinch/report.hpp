#pragma once

// Run configuration, pipelines and the versioned JSON report.

#include "grasspinch/catalog.hpp"
#include "grasspinch/identities.hpp"
#include "grasspinch/integration.hpp"
#include "grasspinch/pinching.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#ifndef GRASSPINCH_VERSION
#define GRASSPINCH_VERSION "0.0.0"
#endif

namespace grasspinch {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = GRASSPINCH_VERSION;

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command = "verify";
  std::string immersion = "veronese:2";
  std::string immersionFile;
  std::uint64_t seed = 1;
  int grid = 8;
  int fiberSamples = 24;
  int flatnessGrid = 3;
  int flatnessDirections = 3;
  int identitySamples = 20;
  int submanifoldSamples = 50;
  int integrationGrid = 0;  // 0 selects 16, 6 and 4 for m = 1, 2 and higher
  int integrationFiber = 2;
  int ambientN = 4;
  int ambientP = 2;
  int ambientDraws = 100;
  std::string format = "text";
  std::string out;
  VerdictPlan tolerances;
  DifferentiationConfig differentiation;

  int integration_grid(int m) const {
    if (integrationGrid > 0) return integrationGrid;
    return m == 1 ? 16 : m == 2 ? 6 : 4;
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
  }
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

inline void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive");
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  static const std::set<std::string> commands = {"verify", "identities", "catalog", "integrate"};
  static const std::set<std::string> formats = {"json", "csv", "text"};
  if (!commands.count(c.command)) throw ConfigError("unknown command '" + c.command + "'");
  if (!formats.count(c.format)) throw ConfigError("unknown format '" + c.format + "'");
  for (auto [v, n] : {std::pair{c.grid, "grid"}, {c.fiberSamples, "fiber_samples"},
                      {c.flatnessGrid, "flatness_grid"}, {c.flatnessDirections, "flatness_directions"},
                      {c.identitySamples, "identity_samples"},
                      {c.submanifoldSamples, "submanifold_samples"},
                      {c.integrationFiber, "integration_fiber_samples"},
                      {c.ambientDraws, "ambient_draws"}}) {
    detail::require_positive(v, n);
  }
  if (c.integrationGrid < 0) throw ConfigError("integration_grid must be non-negative");
  if (c.ambientP < 1 || c.ambientP >= c.ambientN) throw ConfigError("ambient needs 0 < p < n");
  const VerdictPlan& t = c.tolerances;
  for (auto [v, n] : {std::pair{t.pinchTol, "pinch"}, {t.parTol, "parallel"}, {t.secondVariationTol, "second_variation"},
                      {t.shapeIdentityTol, "shape_identity"}, {t.slackTol, "eigen_chain"},
                      {t.flatness.gate, "flatness"}}) {
    detail::require_positive(v, std::string("tolerance ") + n);
  }
  try {
    c.differentiation.validate();
  } catch (const DifferentiationError& e) {
    throw ConfigError(e.what());
  }
}

/// Overlays the keys of a JSON config object on `base`. Unknown keys are errors.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  detail::reject_unknown(j,
                         {"command", "immersion", "immersion_file", "seed", "grid", "fiber_samples",
                          "flatness_grid", "flatness_directions", "identity_samples",
                          "submanifold_samples", "integration_grid", "integration_fiber_samples",
                          "ambient", "format", "out", "tolerances", "differentiation"},
                         "");
  detail::read_key(j, "command", base.command);
  detail::read_key(j, "immersion", base.immersion);
  detail::read_key(j, "immersion_file", base.immersionFile);
  detail::read_key(j, "seed", base.seed);
  detail::read_key(j, "grid", base.grid);
  detail::read_key(j, "fiber_samples", base.fiberSamples);
  detail::read_key(j, "flatness_grid", base.flatnessGrid);
  detail::read_key(j, "flatness_directions", base.flatnessDirections);
  detail::read_key(j, "identity_samples", base.identitySamples);
  detail::read_key(j, "submanifold_samples", base.submanifoldSamples);
  detail::read_key(j, "integration_grid", base.integrationGrid);
  detail::read_key(j, "integration_fiber_samples", base.integrationFiber);
  detail::read_key(j, "format", base.format);
  detail::read_key(j, "out", base.out);
  if (j.contains("ambient")) {
    const auto& a = j.at("ambient");
    detail::reject_unknown(a, {"n", "p", "draws"}, "ambient.");
    detail::read_key(a, "n", base.ambientN);
    detail::read_key(a, "p", base.ambientP);
    detail::read_key(a, "draws", base.ambientDraws);
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    detail::reject_unknown(t,
                           {"pinch", "parallel", "second_variation", "shape_identity",
                            "eigen_chain", "flatness"},
                           "tolerances.");
    VerdictPlan& v = base.tolerances;
    detail::read_key(t, "pinch", v.pinchTol);
    detail::read_key(t, "parallel", v.parTol);
    detail::read_key(t, "second_variation", v.secondVariationTol);
    detail::read_key(t, "shape_identity", v.shapeIdentityTol);
    detail::read_key(t, "eigen_chain", v.slackTol);
    detail::read_key(t, "flatness", v.flatness.gate);
  }
  if (j.contains("differentiation")) {
    const auto& d = j.at("differentiation");
    detail::reject_unknown(d, {"mode", "step"}, "differentiation.");
    std::string mode = "jets";
    detail::read_key(d, "mode", mode);
    if (mode == "jets") {
      base.differentiation.mode = DifferentiationConfig::Mode::ForwardJets;
    } else if (mode == "central") {
      base.differentiation.mode = DifferentiationConfig::Mode::CentralDifferences;
    } else {
      throw ConfigError("differentiation.mode must be 'jets' or 'central'");
    }
    detail::read_key(d, "step", base.differentiation.step);
  }
  return base;
}

inline RunConfig config_from_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  return config_from_json(j, std::move(base));
}

inline nlohmann::json to_json(const RunConfig& c) {
  const VerdictPlan& t = c.tolerances;
  nlohmann::json j;
  j["command"] = c.command;
  if (c.immersionFile.empty()) {
    j["immersion"] = c.immersion;
  } else {
    j["immersion_file"] = c.immersionFile;
  }
  j["seed"] = c.seed;
  j["grid"] = c.grid;
  j["fiber_samples"] = c.fiberSamples;
  j["flatness_grid"] = c.flatnessGrid;
  j["flatness_directions"] = c.flatnessDirections;
  j["identity_samples"] = c.identitySamples;
  j["submanifold_samples"] = c.submanifoldSamples;
  j["integration_grid"] = c.integrationGrid;
  j["integration_fiber_samples"] = c.integrationFiber;
  j["ambient"] = {{"n", c.ambientN}, {"p", c.ambientP}, {"draws", c.ambientDraws}};
  j["format"] = c.format;
  j["tolerances"] = {{"pinch", t.pinchTol},          {"parallel", t.parTol},
                     {"second_variation", t.secondVariationTol}, {"shape_identity", t.shapeIdentityTol},
                     {"eigen_chain", t.slackTol},     {"flatness", t.flatness.gate}};
  j["differentiation"] = {
      {"mode", c.differentiation.mode == DifferentiationConfig::Mode::ForwardJets ? "jets"
                                                                                 : "central"},
      {"step", c.differentiation.step}};
  return j;
}

/// Catalog member or user JSON file. Bad user files are configuration errors;
/// unknown catalog members propagate as CatalogError.
inline Immersion load_immersion(const RunConfig& c) {
  if (c.immersionFile.empty()) return make_immersion(c.immersion);
  try {
    return immersion_from_file(c.immersionFile);
  } catch (const CatalogError& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Sections

inline nlohmann::json complex_json(const ComplexVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

inline nlohmann::json to_json(const ResidualTable& t) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, e] : t) {
    j[k] = {{"max", e.value}, {"tolerance", e.tolerance}, {"pass", e.passed()}};
  }
  return j;
}

inline nlohmann::json to_json(const FlatnessReport& r) {
  nlohmann::json j;
  j["maxResidual"] = r.maxResidual;
  j["flat"] = r.flat;
  j["rankCheckPassed"] = r.rankCheckPassed;
  j["traceConsistency"] = r.traceConsistency;
  j["holGrDeviation"] = r.holGrDeviation ? nlohmann::json(*r.holGrDeviation)
                                              : nlohmann::json(nullptr);
  j["sigmaKCompositionMax"] = r.compositionMaxNorm;
  j["points"] = r.points;
  j["samples"] = r.samples;
  return j;
}

inline nlohmann::json to_json(const PinchingVerdict& v) {
  nlohmann::json j;
  j["status"] = status_name(v.status);
  j["threshold"] = v.threshold;
  j["minHol"] = v.minHol.minHol;
  j["gridMinHol"] = v.minHol.gridMin;
  j["samplingGap"] = v.minHol.samplingGap;
  j["budgetExhausted"] = v.minHol.budgetExhausted;
  j["argmin"] = {{"chart", v.minHol.argmin.chart},
                 {"z", complex_json(v.minHol.argmin.z)},
                 {"u", complex_json(v.minHol.argminDirection)}};
  j["basePoints"] = v.minHol.points;
  j["maxNablaSigma"] = v.parallelism.maxNablaSigma;
  j["nablaSigmaPolarizationBound"] = v.parallelism.polarizationBound;
  j["pinched"] = v.pinchedFlag;
  j["parallel"] = v.parallelFlag;
  j["biconditionalAgrees"] = v.biconditionalAgrees;
  j["secondVariationMaxResidual"] = v.secondVariationMaxResidual;
  j["shapeIdentityMaxResidual"] = v.shapeIdentityMaxResidual;
  j["maxSigmaNormSq"] = v.maxSigmaNormSq;
  j["eigenChainWorstSlack"] = v.lambdaChainWorstSlack;
  j["eigenChainVacuous"] = v.lambdaChainVacuous;
  j["failures"] = v.failures;
  return j;
}

struct IntegrationResult {
  bool skipped = false;
  std::string skipReason;
  UMPlan plan;
  Estimate volume;
  BundleIntegral integral;
  TermBalance balance;
  std::vector<cplx> values;  // second-variation integrand at each sample
  Status status = Status::Pass;
  std::vector<std::string> failures;
};

/// Volume, vanishing of the second-variation integral and the balance of its
/// two curvature terms over UM.
inline IntegrationResult run_integration(const Immersion& f, const RunConfig& c) {
  IntegrationResult r;
  if (f.chart_count() == 1 && !f.has_inverse_chart()) {
    r.skipped = true;
    r.skipReason = "single chart without inverse: compact coverage cannot be verified";
    r.status = Status::Inconclusive;
    return r;
  }
  r.plan = build_um_plan(f, c.integration_grid(f.m()), c.integrationFiber, c.seed);
  r.volume = volume(r.plan);
  const double defect = phase_defect(f, r.plan, second_variation_integrand);
  if (defect > 1e-8) throw PhaseInvarianceError("second-variation integrand is not phase invariant");
  const auto svs = parallel_map<SecondVariation>(int(r.plan.samples.size()), [&](int i) {
    const auto& s = r.plan.samples[i];
    return second_variation(f, {s.chartId, s.z}, s.u);
  });
  for (const auto& sv : svs) r.values.push_back(sv.lhs);
  r.integral = sphere_bundle_from_values(r.plan, r.values, defect);
  r.balance = term_balance_from_variations(r.plan, svs, f.q());
  if (!r.integral.withinBand) r.failures.push_back("second-variation integral is not zero");
  if (!r.balance.trivial) {
    if (r.balance.inconclusive) {
      r.status = Status::Inconclusive;
    } else if (r.balance.balanceResidual >= 0.02) {
      r.failures.push_back("curvature and nabla sigma integrals do not balance");
    }
  }
  if (!r.failures.empty()) r.status = Status::Fail;
  return r;
}

inline nlohmann::json to_json(const IntegrationResult& r) {
  nlohmann::json j;
  j["status"] = status_name(r.status);
  if (r.skipped) {
    j["skipped"] = true;
    j["reason"] = r.skipReason;
    return j;
  }
  j["skipped"] = false;
  j["plan"] = {{"samples", r.plan.samples.size()},     {"baseGrid", r.plan.baseGrid},
               {"fiberSamples", r.plan.fiberSamples}, {"monteCarlo", r.plan.monteCarlo},
               {"coverageVerified", r.plan.coverageVerified},
               {"fiberMass", r.plan.fiberMass},      {"seed", r.plan.seed}};
  j["volume"] = {{"estimate", r.volume.value.real()}, {"standardError", r.volume.standardError}};
  j["secondVariationIntegral"] = {{"re", r.integral.estimate.real()},
                                  {"im", r.integral.estimate.imag()},
                                  {"standardError", r.integral.standardError},
                                  {"floor", r.integral.floor},
                                  {"phaseDefect", r.integral.phaseDefect},
                                  {"withinBand", r.integral.withinBand}};
  j["balance"] = {{"curvatureTerm", r.balance.curvatureTerm},
                  {"curvatureStandardError", r.balance.curvatureSE},
                  {"nablaSigmaTerm", r.balance.nablaSigmaTerm},
                  {"nablaSigmaStandardError", r.balance.nablaSigmaSE},
                  {"residual", r.balance.balanceResidual},
                  {"trivial", r.balance.trivial},
                  {"inconclusive", r.balance.inconclusive}};
  j["failures"] = r.failures;
  return j;
}

inline nlohmann::json immersion_json(const Immersion& f, const ImmersionValidation& v) {
  nlohmann::json j;
  j["id"] = f.id();
  j["n"] = f.n();
  j["p"] = f.p();
  j["q"] = f.q();
  j["m"] = f.m();
  j["charts"] = f.chart_count();
  j["maxHolomorphyResidual"] = v.maxHolomorphyResidual;
  j["minMetricEigenvalue"] = v.minMetricEigenvalue;
  j["valid"] = v.ok;
  if (f.expected().known) {
    j["expected"] = {{"projectivelyFlat", f.expected().projectivelyFlat},
                     {"minHol", f.expected().minHol},
                     {"parallel", f.expected().parallel}};
  }
  return j;
}

inline Status combine(Status a, Status b) {
  auto rank = [](Status s) {
    switch (s) {
      case Status::Fail: return 3;
      case Status::HypothesisNotMet: return 2;
      case Status::Inconclusive: return 1;
      case Status::Pass: return 0;
    }
    return 3;
  };
  return rank(a) >= rank(b) ? a : b;
}

// ---------------------------------------------------------------------------
// Pipelines

struct Report {
  nlohmann::json json;  // {schemaVersion, toolVersion, config, sections, status}
  Status status = Status::Pass;
  std::string summary;  // text form, verdict line first
  std::string csv;
};

inline nlohmann::json envelope(const RunConfig& c, nlohmann::json sections, Status s) {
  nlohmann::json j;
  j["schemaVersion"] = kSchemaVersion;
  j["toolVersion"] = kToolVersion;
  j["config"] = to_json(c);
  j["sections"] = std::move(sections);
  j["status"] = status_name(s);
  return j;
}

inline std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

inline std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(3);
  os << v;
  return os.str();
}

inline std::string pad(const std::string& s, size_t width) {
  return s.size() < width ? s + std::string(width - s.size(), ' ') : s + ' ';
}

inline void table_text(std::ostream& os, const std::string& title, const ResidualTable& t) {
  os << title << "\n";
  for (const auto& [k, e] : t) {
    os << "  " << pad(k, 28) << sci(e.value)
       << "  < " << sci(e.tolerance) << (e.passed() ? "  ok" : "  FAIL") << "\n";
  }
}

inline std::string hol_samples_csv(const MinHolResult& r, int m) {
  std::ostringstream os;
  os.precision(17);
  os << "chartId";
  for (int i = 1; i <= m; ++i) os << ",re_z" << i << ",im_z" << i;
  for (int i = 1; i <= m; ++i) os << ",re_w" << i << ",im_w" << i;
  os << ",hol\n";
  for (const auto& s : r.samples) {
    os << s.chart;
    for (Eigen::Index i = 0; i < s.z.size(); ++i) os << ',' << s.z(i).real() << ',' << s.z(i).imag();
    for (int i = 0; i < 2 * m; ++i) os << ',' << (i < int(s.fiber.size()) ? s.fiber[i] : 0.0);
    os << ',' << s.hol << "\n";
  }
  return os.str();
}

inline std::string um_samples_csv(const UMPlan& plan, const std::vector<cplx>& vals, int m) {
  std::ostringstream os;
  os.precision(17);
  os << "chartId";
  for (int i = 1; i <= m; ++i) os << ",re_z" << i << ",im_z" << i;
  for (int i = 1; i <= m; ++i) os << ",re_u" << i << ",im_u" << i;
  os << ",weight,group,re_integrand,im_integrand\n";
  for (size_t k = 0; k < plan.samples.size(); ++k) {
    const auto& s = plan.samples[k];
    os << s.chartId;
    for (int i = 0; i < m; ++i) os << ',' << s.z(i).real() << ',' << s.z(i).imag();
    for (int i = 0; i < m; ++i) os << ',' << s.u(i).real() << ',' << s.u(i).imag();
    os << ',' << s.weight << ',' << s.group << ',' << vals[k].real() << ',' << vals[k].imag()
       << "\n";
  }
  return os.str();
}

inline VerdictPlan verdict_plan(const RunConfig& c) {
  VerdictPlan p = c.tolerances;
  p.search.grid = c.grid;
  p.search.fiberSamples = c.fiberSamples;
  p.search.seed = c.seed;
  p.flatness.grid = c.flatnessGrid;
  p.flatness.directions = c.flatnessDirections;
  p.flatness.seed = c.seed;
  p.identitySamples = c.identitySamples;
  return p;
}

/// Flatness, submanifold residuals, pinching verdict and integration.
inline Report run_verify(const RunConfig& c) {
  const Immersion f = load_immersion(c);
  Report rep;
  nlohmann::json sections;
  std::ostringstream body;

  const ImmersionValidation val = validate_immersion(f, 3, c.differentiation);
  sections["immersion"] = immersion_json(f, val);
  Status status = val.ok ? Status::Pass : Status::Fail;

  const VerdictPlan vp = verdict_plan(c);
  const FlatnessReport flat = flatness_residual(f, vp.flatness);
  sections["flatness"] = to_json(flat);
  body << "flatness: residual " << sci(flat.maxResidual) << (flat.flat ? " (flat)" : " (not flat)")
       << ", rank check p >= q " << (flat.rankCheckPassed ? "ok" : "FAIL") << "\n";

  SubmanifoldSuitePlan sp;
  sp.samples = c.submanifoldSamples;
  sp.grid = std::max(2, c.flatnessGrid);
  sp.seed = c.seed;
  sp.flat = flat.flat;
  const ResidualTable sub = submanifold_identities(f, sp);
  sections["submanifold"] = to_json(sub);
  table_text(body, "submanifold residuals:", sub);

  std::string headline;
  if (!flat.flat) {
    status = combine(status, Status::HypothesisNotMet);
    headline = "pulled-back quotient bundle is not projectively flat (residual " +
               sci(flat.maxResidual) + ")";
  } else {
    if (!all_passed(sub)) status = combine(status, Status::Fail);
    const PinchingVerdict v = pinching_verdict(f, vp);
    sections["pinching"] = to_json(v);
    status = combine(status, v.status);
    headline = std::string("pinched ") + (v.pinchedFlag ? "yes" : "no") + " (minHol " +
               fmt(v.minHol.minHol) + ", threshold 1/q = " + fmt(v.threshold) + "), parallel " +
               (v.parallelFlag ? "yes" : "no") + " (max |nabla sigma(u,u,u)| " +
               fmt(v.parallelism.maxNablaSigma) + "), biconditional " +
               (v.biconditionalAgrees ? "agrees" : "DISAGREES");
    body << "pinching: second-variation residual " << sci(v.secondVariationMaxResidual)
         << ", shape identity residual " << sci(v.shapeIdentityMaxResidual) << ", eigen-chain slack "
         << sci(v.lambdaChainWorstSlack) << "\n";
    for (const auto& s : v.failures) body << "  failure: " << s << "\n";

    const IntegrationResult ir = run_integration(f, c);
    sections["integration"] = to_json(ir);
    if (ir.skipped) {
      body << "integration: skipped (" << ir.skipReason << ")\n";
    } else {
      status = combine(status, ir.status);
      body << "integration: volume " << fmt(ir.volume.value.real()) << " +- "
           << sci(ir.volume.standardError) << ", second-variation integral "
           << sci(std::abs(ir.integral.estimate)) << " (SE " << sci(ir.integral.standardError)
           << "), balance " << (ir.balance.trivial ? "trivial" : sci(ir.balance.balanceResidual))
           << "\n";
    }
    rep.csv = hol_samples_csv(v.minHol, f.m());
  }
  rep.status = status;
  rep.json = envelope(c, std::move(sections), status);
  rep.summary = "verdict " + f.id() + ": " + status_name(status) + ": " + headline + "\n" +
                body.str();
  return rep;
}

inline Report run_identities(const RunConfig& c) {
  int n = c.ambientN, p = c.ambientP;
  if (c.immersionFile.empty() && c.immersion.rfind("identity", 0) == 0) {
    const Immersion g = make_immersion(c.immersion);
    n = g.n();
    p = g.p();
  }
  const ResidualTable t = ambient_identities(n, p, c.ambientDraws, c.seed);
  Report rep;
  rep.status = all_passed(t) ? Status::Pass : Status::Fail;
  nlohmann::json sections;
  sections["ambient"] = {{"n", n}, {"p", p}, {"draws", c.ambientDraws}, {"residuals", to_json(t)}};
  rep.json = envelope(c, std::move(sections), rep.status);
  std::ostringstream os;
  os << "identities Gr_" << p << "(C^" << n << "): " << status_name(rep.status) << "\n";
  table_text(os, "residuals:", t);
  rep.summary = os.str();
  std::ostringstream csv;
  csv.precision(17);
  csv << "name,max,tolerance,pass\n";
  for (const auto& [k, e] : t) csv << k << ',' << e.value << ',' << e.tolerance << ',' << e.passed() << "\n";
  rep.csv = csv.str();
  return rep;
}

inline Report run_integrate(const RunConfig& c) {
  const Immersion f = load_immersion(c);
  const IntegrationResult ir = run_integration(f, c);
  Report rep;
  rep.status = ir.status;
  nlohmann::json sections;
  sections["integration"] = to_json(ir);
  rep.json = envelope(c, std::move(sections), rep.status);
  std::ostringstream os;
  os << "integrate " << f.id() << ": " << status_name(rep.status) << "\n";
  if (ir.skipped) {
    os << "  skipped: " << ir.skipReason << "\n";
  } else {
    os << "  samples " << ir.plan.samples.size() << "\n"
       << "  volume " << fmt(ir.volume.value.real()) << " +- " << sci(ir.volume.standardError)
       << "\n"
       << "  second-variation integral " << sci(std::abs(ir.integral.estimate)) << " (SE "
       << sci(ir.integral.standardError) << ", floor " << sci(ir.integral.floor) << ")\n"
       << "  curvature term " << fmt(ir.balance.curvatureTerm) << " +- "
       << sci(ir.balance.curvatureSE) << "\n"
       << "  nabla sigma term " << fmt(ir.balance.nablaSigmaTerm) << " +- "
       << sci(ir.balance.nablaSigmaSE) << "\n"
       << "  balance " << (ir.balance.trivial ? "trivial" : sci(ir.balance.balanceResidual))
       << "\n";
    rep.csv = um_samples_csv(ir.plan, ir.values, f.m());
  }
  rep.summary = os.str();
  return rep;
}

/// Representative catalog instances with computed flatness.
inline Report run_catalog(const RunConfig& c) {
  static const std::vector<std::pair<std::string, std::string>> families = {
      {"veronese:d", "2/d"},         {"linear:m,n", "2"},
      {"segre", "1"},                {"pluecker", "1"},
      {"tensor_embedding:q", "2/q"}, {"identity:p=P,n=N", "none (flat iff q = 1)"},
      {"perturbed", "none (not flat)"}};
  static const std::vector<std::string> instances = {
      "veronese:1",         "veronese:2",         "veronese:3",         "veronese:4",
      "linear:1,3",         "linear:2,4",         "segre",              "pluecker",
      "tensor_embedding:1", "tensor_embedding:2", "tensor_embedding:3", "identity:p=2,n=4",
      "perturbed"};
  nlohmann::json fam = nlohmann::json::array();
  for (const auto& [u, h] : families) fam.push_back({{"usage", u}, {"expectedMinHol", h}});
  nlohmann::json members = nlohmann::json::array();
  std::ostringstream os, csv;
  os << pad("family", 23) << "expected minHol\n";
  for (const auto& [u, h] : families) os << pad(u, 23) << h << "\n";
  os << "\n" << pad("member", 23) << "n  p  q  m  threshold  expected minHol  parallel  flat\n";
  csv.precision(17);
  csv << "id,n,p,q,m,threshold,expectedMinHol,expectedParallel,flat,flatnessResidual\n";
  FlatnessPlan fp;
  fp.seed = c.seed;
  for (const auto& id : instances) {
    const Immersion f = make_immersion(id);
    const FlatnessReport fr = flatness_residual(f, fp);
    const auto& e = f.expected();
    nlohmann::json j = {{"id", id},
                        {"n", f.n()},
                        {"p", f.p()},
                        {"q", f.q()},
                        {"m", f.m()},
                        {"threshold", 1.0 / f.q()},
                        {"flat", fr.flat},
                        {"flatnessResidual", fr.maxResidual},
                        {"description", f.description()}};
    if (e.projectivelyFlat) {
      j["expectedMinHol"] = e.minHol;
      j["expectedParallel"] = e.parallel;
    } else {
      j["expectedMinHol"] = nullptr;
      j["expectedParallel"] = nullptr;
    }
    members.push_back(j);
    os << pad(id, 23) << pad(std::to_string(f.n()), 3) << pad(std::to_string(f.p()), 3)
       << pad(std::to_string(f.q()), 3) << pad(std::to_string(f.m()), 3)
       << pad(fmt(1.0 / f.q(), 4), 11) << pad(e.projectivelyFlat ? fmt(e.minHol, 4) : "-", 17)
       << pad(e.projectivelyFlat ? (e.parallel ? "yes" : "no") : "-", 10)
       << (fr.flat ? "yes" : "no") << "\n";
    csv << id << ',' << f.n() << ',' << f.p() << ',' << f.q() << ',' << f.m() << ','
        << 1.0 / f.q() << ',' << (e.projectivelyFlat ? std::to_string(e.minHol) : "") << ','
        << (e.projectivelyFlat ? (e.parallel ? "1" : "0") : "") << ',' << fr.flat << ','
        << fr.maxResidual << "\n";
  }
  Report rep;
  rep.status = Status::Pass;
  rep.json = envelope(c, {{"catalog", {{"families", fam}, {"members", members}}}}, rep.status);
  rep.summary = os.str();
  rep.csv = csv.str();
  return rep;
}

inline Report run(const RunConfig& c) {
  validate(c);
  if (c.command == "verify") return run_verify(c);
  if (c.command == "identities") return run_identities(c);
  if (c.command == "integrate") return run_integrate(c);
  return run_catalog(c);
}

}  // namespace grasspinch
