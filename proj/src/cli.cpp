#include "fgforge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fgforge/boundary.hpp"
#include "fgforge/coeff_io.hpp"
#include "fgforge/ellipticity.hpp"
#include "fgforge/errors.hpp"
#include "fgforge/expansion.hpp"
#include "fgforge/references.hpp"
#include "fgforge/rng.hpp"

namespace fgforge {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ParseError(msg); }

void check_object(const Json& j, const char* where) {
  if (!j.is_object()) bad(std::string(where) + " must be a JSON object");
}

void check_allowed(const Json& j, const char* where,
                   std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) bad("unknown field \"" + it.key() + "\" in " + where);
  }
}

int read_int_field(const Json& j, const char* key, int def) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) bad(std::string(key) + " must be an integer");
  return v.get<int>();
}

std::uint64_t read_u64_field(const Json& j, const char* key,
                             std::uint64_t def) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    bad(std::string(key) + " must be an integer");
  }
  if (v.is_number_integer() && v.get<long long>() < 0) {
    bad(std::string(key) + " must be nonnegative");
  }
  return v.get<std::uint64_t>();
}

double read_num_field(const Json& j, const char* key, double def) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_number()) bad(std::string(key) + " must be a number");
  return v.get<double>();
}

bool read_bool_field(const Json& j, const char* key, bool def) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_boolean()) bad(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

std::string read_str_field(const Json& j, const char* key,
                           const std::string& def) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_string()) bad(std::string(key) + " must be a string");
  return v.get<std::string>();
}

void parse_boundary_block(const Json& j, const char* where,
                          std::array<double, 6>& constant,
                          std::vector<std::pair<int, FourierMode>>& modes) {
  check_object(j, where);
  check_allowed(j, where, {"constant", "modes"});
  if (j.contains("constant")) {
    const Json& c = j.at("constant");
    check_object(c, (std::string(where) + ".constant").c_str());
    for (auto it = c.begin(); it != c.end(); ++it) {
      int slot = metric_component_slot(it.key());
      if (!it.value().is_number()) {
        bad("constant part of component " + it.key() + " must be a number");
      }
      constant[static_cast<std::size_t>(slot)] = it.value().get<double>();
    }
  }
  if (j.contains("modes")) {
    const Json& arr = j.at("modes");
    if (!arr.is_array()) bad(std::string(where) + ".modes must be an array");
    for (const Json& m : arr) {
      check_object(m, "mode entry");
      check_allowed(m, "mode entry",
                    {"component", "wavevector", "amplitude_cos",
                     "amplitude_sin"});
      if (!m.contains("component") || !m.contains("wavevector")) {
        bad("mode entries need \"component\" and \"wavevector\"");
      }
      int slot = metric_component_slot(read_str_field(m, "component", ""));
      const Json& wv = m.at("wavevector");
      if (!wv.is_array() || wv.size() != 3) {
        bad("wavevector must be an array of three integers");
      }
      FourierMode mode;
      for (int d = 0; d < 3; ++d) {
        const Json& v = wv.at(static_cast<std::size_t>(d));
        if (!v.is_number_integer()) {
          bad("wavevector must be an array of three integers");
        }
        mode.k[static_cast<std::size_t>(d)] = v.get<int>();
      }
      mode.amp_cos = read_num_field(m, "amplitude_cos", 0.0);
      mode.amp_sin = read_num_field(m, "amplitude_sin", 0.0);
      modes.emplace_back(slot, mode);
    }
  }
}

// Builds a symmetric boundary tensor from per-component constants and
// Fourier mode lists.
SymForm build_boundary_tensor(
    GridSpec grid, const std::array<double, 6>& constant,
    const std::vector<std::pair<int, FourierMode>>& modes) {
  std::array<std::vector<FourierMode>, 6> per_slot;
  for (const auto& [slot, mode] : modes) {
    per_slot[static_cast<std::size_t>(slot)].push_back(mode);
  }
  SymForm out(grid);
  for (int c = 0; c < 6; ++c) {
    out.c[static_cast<std::size_t>(c)] =
        sample_modes(grid, per_slot[static_cast<std::size_t>(c)],
                     constant[static_cast<std::size_t>(c)]);
  }
  return out;
}

void check_band_limit(const JobSpec& spec) {
  int limit = spec.grid / 4;
  auto check = [&](const std::vector<std::pair<int, FourierMode>>& modes,
                   const char* which) {
    for (const auto& [slot, mode] : modes) {
      (void)slot;
      int sup = std::max({std::abs(mode.k[0]), std::abs(mode.k[1]),
                          std::abs(mode.k[2])});
      if (sup > limit) {
        throw ConstraintViolation(
            std::string(which) + " mode wavevector exceeds the band limit " +
                std::to_string(limit) + " for grid " +
                std::to_string(spec.grid),
            static_cast<double>(sup));
      }
    }
  };
  check(spec.gamma_modes, "gamma");
  check(spec.sigma_modes, "sigma");
}

Json fit_value(double v) {
  if (std::isinf(v)) return Json("infinite");
  return Json(v);
}

Json g2_json(const G2Resolution& g2) {
  return Json{{"selected", g2.selected},
              {"ricci_minus_quarter_scalar_sup", g2.full_reading_sup},
              {"half_ricci_minus_eighth_scalar_sup", g2.half_reading_sup}};
}

Json parameters_json(const JobSpec& spec) {
  Json p;
  p["grid"] = spec.grid;
  p["order"] = spec.order;
  p["eps"] = spec.eps;
  p["seed"] = spec.seed;
  p["samples"] = spec.samples;
  p["degenerate"] = spec.degenerate;
  p["tolerances"] = Json{{"tt", spec.tt_tol},
                         {"residual", spec.residual_tol},
                         {"rank", spec.rank_threshold},
                         {"laurent", spec.laurent_tol}};
  if (!spec.reference_name.empty()) {
    p["reference"] =
        Json{{"name", spec.reference_name}, {"mass", spec.reference_mass}};
  }
  if (!spec.input_path.empty()) p["input"] = spec.input_path;
  if (!spec.output_path.empty()) p["output"] = spec.output_path;
  return p;
}

Json work_json(const BulkMetric& bm) {
  int stored = bm.g.stored_top() - bm.g.floor() + 1;
  return Json{{"grid_points", bm.grid().points()},
              {"stored_orders", stored},
              {"scalar_fields", 6 * stored}};
}

Json summaries_json(const BulkMetric& bm) {
  Json arr = Json::array();
  for (const BlockSummary& s : summarize_metric(bm)) {
    Json modes = Json::array();
    for (const ModeSample& m : s.modes) {
      modes.push_back(Json{{"k", {m.k[0], m.k[1], m.k[2]}},
                           {"cos", m.amp_cos},
                           {"sin", m.amp_sin}});
    }
    arr.push_back(Json{{"order", s.order},
                       {"component", s.component},
                       {"sup", s.sup},
                       {"modes", modes}});
  }
  return arr;
}

int effective_order(const BulkMetric& bm) {
  return bm.g.trusted_ceil() >= kExactCeil ? bm.g.stored_top()
                                           : bm.g.trusted_ceil();
}

std::string constraint_label(const std::string& msg) {
  if (msg.find("trace") != std::string::npos) return "trace constraint";
  if (msg.find("divergence") != std::string::npos) {
    return "divergence constraint";
  }
  return "constraint";
}

G2Resolution file_g2(const BulkMetric& bm) {
  return resolve_g2(bm.g.at(0), bm.g.at(2));
}

// Recomputed integrity audits shared by verify and wick.
struct AuditOutcome {
  bool pass = true;
  Json json;
};

AuditOutcome run_audits(const BulkMetric& bm, const JobSpec& spec,
                        std::ostream& log) {
  AuditOutcome out;
  int keff = effective_order(bm);
  double tol = std::max(1e-8, 10.0 * spec.residual_tol);

  double rfit = residual_order_fit(bm, {0.1, 0.05, 0.025});
  double required = keff - 2.5;
  bool r_ok = std::isinf(rfit) || rfit >= required;
  out.json["residual_order"] = Json{{"fitted", fit_value(rfit)},
                                    {"required", required},
                                    {"pass", r_ok}};
  log << "audit residual_order: fitted "
      << (std::isinf(rfit) ? std::string("infinite") : std::to_string(rfit))
      << " required " << required << "\n";
  out.pass = out.pass && r_ok;

  CurvatureBundle cb = curvature4(bm);
  std::array<SF, 10> bach = bach_tensor(cb);
  int btop = keff;
  for (const SF& c : bach) {
    int ceil = c.trusted_ceil() >= kExactCeil ? keff : c.trusted_ceil();
    btop = std::min(btop, ceil);
  }
  Json bach_sups = Json::array();
  bool b_ok = true;
  for (int m = 0; m <= btop; ++m) {
    double sup = 0.0;
    for (const SF& c : bach) sup = std::max(sup, c.at(m).sup_norm());
    bach_sups.push_back(sup);
    b_ok = b_ok && sup <= tol;
  }
  out.json["bach_flatness"] = Json{{"orders_checked", btop + 1},
                                   {"per_order_sup", bach_sups},
                                   {"tolerance", tol},
                                   {"pass", b_ok}};
  out.pass = out.pass && b_ok;

  out.json["engine_self_checks"] =
      Json{{"first_bianchi_sup", cb.first_bianchi_sup},
           {"weyl_trace_sup", cb.weyl_trace_sup},
           {"ricci_consistency_sup", cb.ricci_consistency_sup}};

  if (bm.eps == 1) {
    BoundaryIdentityReport bi = boundary_identities_check(bm);
    bool i_ok = bi.tangential_sup <= tol && bi.mixed_sup <= tol &&
                bi.normal_sup <= tol && bi.mean_curvature_sup <= tol;
    out.json["boundary_identities"] =
        Json{{"tangential_sup", bi.tangential_sup},
             {"tangential_variant_sup", bi.tangential_variant_sup},
             {"mixed_sup", bi.mixed_sup},
             {"normal_sup", bi.normal_sup},
             {"mean_curvature_sup", bi.mean_curvature_sup},
             {"tolerance", tol},
             {"pass", i_ok}};
    out.pass = out.pass && i_ok;

    double sfit = sectional_decay_fit(bm, {0.1, 0.05});
    bool s_ok = std::isinf(sfit) || sfit >= 2.0;
    out.json["sectional_decay"] = Json{{"fitted", fit_value(sfit)},
                                       {"required", 2.0},
                                       {"pass", s_ok}};
    out.pass = out.pass && s_ok;
  } else {
    out.json["boundary_identities"] = Json{{"skipped", "lorentzian input"}};
    out.json["sectional_decay"] = Json{{"skipped", "lorentzian input"}};
  }

  if (bm.g.stored_top() >= 3) {
    Boundary3Curvature bc = boundary_curvature(bm.g.at(0));
    const SymForm& sigma = bm.g.at(3);
    double tr_sup = trace3(bc, sigma).sup_norm();
    double div_sup = 0.0;
    for (const ScalarField& f : divergence3(bc, sigma)) {
      div_sup = std::max(div_sup, f.sup_norm());
    }
    out.json["constraints"] =
        Json{{"trace_sup", tr_sup}, {"divergence_sup", div_sup}};
  }
  return out;
}

int cmd_expand(const JobSpec& spec, Json& report, std::ostream& log) {
  GridSpec grid = GridSpec::make(spec.grid);
  check_band_limit(spec);

  BoundaryData bd;
  bd.order = spec.order;
  bd.tt_tol = spec.tt_tol;
  if (!spec.reference_name.empty()) {
    if (spec.reference_name == "cusp") {
      bd.gamma = SymForm::delta(grid);
      bd.sigma = SymForm(grid);
    } else if (spec.reference_name == "ads_schwarzschild") {
      bd.gamma = SymForm::delta(grid);
      bd.sigma = ads_schwarzschild_sigma(grid, spec.reference_mass);
    } else {
      throw ConstraintViolation("reference \"" + spec.reference_name +
                                "\" cannot seed the expansion solver");
    }
    log << "expand: boundary data from reference " << spec.reference_name
        << "\n";
  } else {
    bd.gamma = build_boundary_tensor(grid, spec.gamma_constant,
                                     spec.gamma_modes);
    bd.sigma = build_boundary_tensor(grid, spec.sigma_constant,
                                     spec.sigma_modes);
  }

  ExpandOptions opt;
  opt.eps = spec.eps;
  opt.residual_tol = spec.residual_tol;
  opt.rank_threshold = spec.rank_threshold;
  opt.laurent_tol = spec.laurent_tol;
  FGExpansion fg = expand(bd, opt);

  report["g2_formula_resolution"] = g2_json(fg.g2);
  {
    Boundary3Curvature bc = boundary_curvature(bd.gamma);
    double tr_sup = trace3(bc, bd.sigma).sup_norm();
    double div_sup = 0.0;
    for (const ScalarField& f : divergence3(bc, bd.sigma)) {
      div_sup = std::max(div_sup, f.sup_norm());
    }
    report["boundary_constraints"] =
        Json{{"trace_sup", tr_sup}, {"divergence_sup", div_sup}};
  }
  Json steps = Json::array();
  for (const SolveStep& s : fg.steps) {
    steps.push_back(Json{{"order", s.order},
                         {"affinity_error", s.affinity_error},
                         {"min_singular_ratio", s.min_singular_ratio},
                         {"obstruction_norm", s.obstruction_norm},
                         {"coefficient_sup", s.coefficient_sup},
                         {"residual_sup_after", s.residual_sup_after}});
  }
  report["steps"] = steps;
  report["residual"] = Json{{"sup", fg.residual_sup},
                            {"checked_through", fg.residual_checked_through}};
  report["coefficients"] = summaries_json(fg.metric);
  report["work"] = work_json(fg.metric);
  if (!spec.output_path.empty()) {
    write_coefficient_file(spec.output_path, fg.metric);
    report["output"] = spec.output_path;
    log << "expand: wrote " << spec.output_path << "\n";
  }
  return 0;
}

int cmd_verify(const JobSpec& spec, Json& report, std::ostream& log) {
  if (spec.input_path.empty()) {
    bad("verify needs an input coefficient file (\"input\" or positional)");
  }
  BulkMetric bm = read_coefficient_file(spec.input_path);
  log << "verify: " << spec.input_path << " grid " << bm.grid().n
      << " stored through order " << bm.g.stored_top() << "\n";
  if (bm.g.trusted_ceil() >= 2) {
    report["g2_formula_resolution"] = g2_json(file_g2(bm));
  }
  AuditOutcome audits = run_audits(bm, spec, log);
  report["audits"] = audits.json;
  report["coefficients"] = summaries_json(bm);
  report["work"] = work_json(bm);
  return audits.pass ? 0 : 3;
}

int cmd_wick(const JobSpec& spec, Json& report, std::ostream& log) {
  if (spec.input_path.empty()) {
    bad("wick needs an input coefficient file (\"input\" or positional)");
  }
  BulkMetric bm = read_coefficient_file(spec.input_path);
  if (bm.eps != 1) {
    throw ConstraintViolation(
        "wick rotation expects a Riemannian (eps = +1) input");
  }
  if (bm.g.trusted_ceil() >= 2) {
    report["g2_formula_resolution"] = g2_json(file_g2(bm));
  }
  AuditOutcome input_audits = run_audits(bm, spec, log);
  report["input_audits"] = input_audits.json;
  if (!input_audits.pass) {
    report["error"] = Json{{"type", "audit_failure"},
                           {"message", "input failed the verify audits"}};
    return 3;
  }

  BulkMetric lor = wick_rotate(bm);
  Json signs = Json::array();
  for (int k = lor.g.floor(); k <= lor.g.stored_top(); ++k) {
    signs.push_back(((k / 2) % 2 == 0) ? 1 : -1);
  }
  report["signs"] = signs;

  ResidualOptions ropt;
  ropt.laurent_tol = spec.laurent_tol;
  Series<Sym4F> ehat = einstein_residual(lor, ropt);
  int keff = effective_order(lor);
  int mtop = std::min(keff - 3, residual_trusted_order(ehat));
  double tol = std::max(1e-8, 10.0 * spec.residual_tol);
  Json sups = Json::array();
  bool ok = true;
  for (int m = 0; m <= mtop; ++m) {
    double sup = residual_order(ehat, m).sup_norm();
    sups.push_back(sup);
    ok = ok && sup <= tol;
  }
  report["lorentzian_residual"] = Json{{"orders_checked", mtop + 1},
                                       {"per_order_sup", sups},
                                       {"tolerance", tol},
                                       {"pass", ok}};
  report["coefficients"] = summaries_json(lor);
  report["work"] = work_json(lor);
  if (!spec.output_path.empty()) {
    write_coefficient_file(spec.output_path, lor);
    report["output"] = spec.output_path;
    log << "wick: wrote " << spec.output_path << "\n";
  }
  return ok ? 0 : 3;
}

int cmd_ellipticity(const JobSpec& spec, Json& report, std::ostream& log) {
  if (spec.samples < 1) {
    throw ConstraintViolation("ellipticity needs at least one sample");
  }
  Rng rng(spec.seed);
  Json samples = Json::array();
  bool expectation_met = true;
  for (int i = 0; i < spec.samples; ++i) {
    std::array<double, 3> xi{};
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (double& v : xi) {
        v = rng.sym();
      }
      n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    } while (n2 < 0.09);
    double inv = 1.0 / std::sqrt(n2);
    for (double& v : xi) v *= inv;

    CotangentDatum d;
    d.xi = xi;
    SymbolMatrix m = assemble_boundary_symbol(d);
    if (spec.degenerate) m = degenerate_variant(m);
    ComplementingReport rep = complementing_check(m);
    samples.push_back(Json{{"xi", {xi[0], xi[1], xi[2]}},
                           {"pass", rep.pass},
                           {"rank", rep.rank},
                           {"kernel_dim", rep.kernel.size()},
                           {"largest_singular", rep.largest_singular},
                           {"smallest_singular", rep.smallest_singular}});
    if (spec.degenerate) {
      expectation_met =
          expectation_met && !rep.pass && rep.kernel.size() == 4;
    } else {
      expectation_met = expectation_met && rep.pass;
    }
  }
  report["samples"] = samples;

  {
    CotangentDatum d;
    d.xi = {1.0, 0.0, 0.0};
    SymbolMatrix m = assemble_boundary_symbol(d);
    int max_degree = -1;
    double mixed_z2_sup = 0.0;
    for (int r = 0; r < 20; ++r) {
      for (int c = 0; c < 10; ++c) {
        const Poly& p =
            m.entry[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        max_degree = std::max(max_degree, p.degree());
        if (c >= 6) mixed_z2_sup = std::max(mixed_z2_sup,
                                            std::abs(p.coeff(2)));
      }
    }
    report["symbol_invariants"] =
        Json{{"max_entry_degree", max_degree},
             {"mixed_column_z2_coefficient_sup", mixed_z2_sup}};
  }
  report["expectation"] =
      Json{{"mode", spec.degenerate ? "degenerate" : "flat"},
           {"met", expectation_met}};
  log << "ellipticity: " << spec.samples << " samples, expectation "
      << (expectation_met ? "met" : "violated") << "\n";
  return expectation_met ? 0 : 3;
}

int cmd_reference(const JobSpec& spec, Json& report, std::ostream& log) {
  if (spec.reference_name.empty()) {
    bad("reference command needs reference.name in the job file");
  }
  GridSpec grid = GridSpec::make(spec.grid);
  if (spec.order < 0) {
    throw ConstraintViolation("reference order must be nonnegative");
  }
  BulkMetric bm = cusp_metric(grid);
  if (spec.reference_name == "cusp") {
    bm = cusp_metric(grid);
  } else if (spec.reference_name == "cone") {
    bm = cone_metric(grid, std::max(4, spec.order));
  } else if (spec.reference_name == "ads_schwarzschild") {
    AdsSchwarzschildOracle profile =
        ads_schwarzschild_profile(spec.reference_mass, spec.order);
    report["oracle"] = Json{{"mass", profile.m},
                            {"order", profile.order},
                            {"ode_residual_sup", profile.ode_residual_sup},
                            {"g11", profile.g11},
                            {"gperp", profile.gperp}};
    bm = ads_schwarzschild_metric(grid, spec.reference_mass, spec.order);
  } else {
    throw ConstraintViolation("unknown reference \"" + spec.reference_name +
                              "\"");
  }
  if (bm.g.trusted_ceil() >= 2) {
    report["g2_formula_resolution"] = g2_json(file_g2(bm));
  }
  report["coefficients"] = summaries_json(bm);
  report["work"] = work_json(bm);
  if (!spec.output_path.empty()) {
    write_coefficient_file(spec.output_path, bm);
    report["output"] = spec.output_path;
    log << "reference: wrote " << spec.output_path << "\n";
  }
  return 0;
}

}  // namespace

JobSpec parse_job_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("job file is not valid JSON: ") + e.what());
  }
  check_object(j, "job file");
  check_allowed(j, "job file",
                {"command", "grid", "order", "eps", "seed", "samples",
                 "degenerate", "tolerances", "boundary", "reference", "input",
                 "output"});
  JobSpec spec;
  spec.command = read_str_field(j, "command", "");
  spec.grid = read_int_field(j, "grid", spec.grid);
  spec.order = read_int_field(j, "order", spec.order);
  spec.eps = read_int_field(j, "eps", spec.eps);
  if (spec.eps != 1 && spec.eps != -1) bad("eps must be 1 or -1");
  spec.seed = read_u64_field(j, "seed", spec.seed);
  spec.samples = read_int_field(j, "samples", spec.samples);
  spec.degenerate = read_bool_field(j, "degenerate", spec.degenerate);
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    check_object(t, "tolerances");
    check_allowed(t, "tolerances", {"tt", "residual", "rank", "laurent"});
    spec.tt_tol = read_num_field(t, "tt", spec.tt_tol);
    spec.residual_tol = read_num_field(t, "residual", spec.residual_tol);
    spec.rank_threshold = read_num_field(t, "rank", spec.rank_threshold);
    spec.laurent_tol = read_num_field(t, "laurent", spec.laurent_tol);
  }
  if (j.contains("boundary")) {
    const Json& b = j.at("boundary");
    check_object(b, "boundary");
    check_allowed(b, "boundary", {"gamma", "sigma"});
    if (b.contains("gamma")) {
      parse_boundary_block(b.at("gamma"), "boundary.gamma",
                           spec.gamma_constant, spec.gamma_modes);
    }
    if (b.contains("sigma")) {
      parse_boundary_block(b.at("sigma"), "boundary.sigma",
                           spec.sigma_constant, spec.sigma_modes);
    }
  }
  if (j.contains("reference")) {
    const Json& r = j.at("reference");
    check_object(r, "reference");
    check_allowed(r, "reference", {"name", "mass"});
    spec.reference_name = read_str_field(r, "name", "");
    spec.reference_mass = read_num_field(r, "mass", spec.reference_mass);
  }
  spec.input_path = read_str_field(j, "input", "");
  spec.output_path = read_str_field(j, "output", "");
  return spec;
}

JobSpec load_job_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open job file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_job_spec(buf.str());
}

void apply_overrides(JobSpec& spec, const CliOverrides& o) {
  if (o.grid) spec.grid = *o.grid;
  if (o.order) spec.order = *o.order;
  if (o.seed) spec.seed = *o.seed;
  if (o.input) spec.input_path = *o.input;
  if (o.output) spec.output_path = *o.output;
  if (o.degenerate) spec.degenerate = true;
}

int run_command(const JobSpec& spec, std::ostream& data, std::ostream& log) {
  Json report;
  report["tool"] = "fgforge";
  report["format"] = 1;
  report["command"] = spec.command;
  report["status"] = "ok";
  report["exit_code"] = 0;
  report["g2_formula_resolution"] = Json{{"selected", "not_evaluated"}};
  report["parameters"] = parameters_json(spec);

  int code = 0;
  try {
    if (spec.command == "expand") {
      code = cmd_expand(spec, report, log);
    } else if (spec.command == "verify") {
      code = cmd_verify(spec, report, log);
    } else if (spec.command == "wick") {
      code = cmd_wick(spec, report, log);
    } else if (spec.command == "ellipticity") {
      code = cmd_ellipticity(spec, report, log);
    } else if (spec.command == "reference") {
      code = cmd_reference(spec, report, log);
    } else if (spec.command.empty()) {
      bad("no command given");
    } else {
      bad("unknown command \"" + spec.command + "\"");
    }
    if (code != 0) report["status"] = "audit_failed";
  } catch (const ParseError& e) {
    report["status"] = "parse_error";
    report["error"] = Json{{"type", "parse_error"}, {"message", e.what()}};
    log << "error: " << e.what() << "\n";
    code = 1;
  } catch (const ConstraintViolation& e) {
    report["status"] = "constraint_violation";
    Json err{{"type", "constraint_violation"},
             {"constraint", constraint_label(e.what())},
             {"message", e.what()}};
    if (e.norm >= 0.0) err["norm"] = e.norm;
    report["error"] = err;
    log << "error: " << e.what() << "\n";
    code = 2;
  } catch (const CancellationFailure& e) {
    report["status"] = "numerical_failure";
    report["error"] = Json{{"type", "cancellation_failure"},
                           {"order", e.order},
                           {"norm", e.norm},
                           {"message", e.what()}};
    log << "error: " << e.what() << "\n";
    code = 3;
  } catch (const SingularIndicial& e) {
    report["status"] = "numerical_failure";
    report["error"] = Json{{"type", "singular_indicial"},
                           {"order", e.order},
                           {"message", e.what()}};
    log << "error: " << e.what() << "\n";
    code = 3;
  } catch (const Error& e) {
    report["status"] = "numerical_failure";
    report["error"] = Json{{"type", "error"}, {"message", e.what()}};
    log << "error: " << e.what() << "\n";
    code = 3;
  } catch (const std::exception& e) {
    report["status"] = "numerical_failure";
    report["error"] = Json{{"type", "unexpected"}, {"message", e.what()}};
    log << "error: " << e.what() << "\n";
    code = 3;
  }
  report["exit_code"] = code;
  data << report.dump(2) << "\n";
  return code;
}

int run_cli(const std::string& command, const std::string& spec_path,
            const CliOverrides& overrides, std::ostream& data,
            std::ostream& log) {
  JobSpec spec;
  if (!spec_path.empty()) {
    try {
      spec = load_job_spec(spec_path);
    } catch (const ParseError& e) {
      Json report;
      report["tool"] = "fgforge";
      report["format"] = 1;
      report["command"] = command;
      report["status"] = "parse_error";
      report["exit_code"] = 1;
      report["g2_formula_resolution"] = Json{{"selected", "not_evaluated"}};
      report["error"] =
          Json{{"type", "parse_error"}, {"message", e.what()}};
      data << report.dump(2) << "\n";
      log << "error: " << e.what() << "\n";
      return 1;
    }
  }
  if (!command.empty()) spec.command = command;
  apply_overrides(spec, overrides);
  return run_command(spec, data, log);
}

}  // namespace fgforge
