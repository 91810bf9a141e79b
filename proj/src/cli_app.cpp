#include "genflow/cli_app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "genflow/catalog.hpp"

namespace genflow {
namespace {

using nlohmann::json;

json mat_json(const Endomorphism& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json form_json(const KForm& w) {
  json entries = json::array();
  const TupleBasis& basis = tuple_basis(w.dim(), w.degree());
  for (size_t r = 0; r < basis.tuples.size(); ++r) {
    double v = w.comps()[long(r)];
    if (v == 0.0) continue;
    json idx = json::array();
    for (int i : basis.tuples[r]) idx.push_back(i + 1);
    entries.push_back({{"indices", idx}, {"v", v}});
  }
  return entries;
}

std::string format_form(const KForm& w) {
  std::ostringstream os;
  const TupleBasis& basis = tuple_basis(w.dim(), w.degree());
  bool first = true;
  for (size_t r = 0; r < basis.tuples.size(); ++r) {
    double v = w.comps()[long(r)];
    if (v == 0.0) continue;
    if (first) {
      if (v < 0) os << "-";
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    first = false;
    double a = std::abs(v);
    if (a != 1.0) os << a << " ";
    os << "e^{";
    for (int i : basis.tuples[r]) os << i + 1;
    os << "}";
  }
  if (first) os << "0";
  return os.str();
}

std::string mat_text(const Endomorphism& m) {
  Eigen::IOFormat fmt(Eigen::StreamPrecision, 0, "  ", "\n", "  [ ", " ]");
  std::ostringstream os;
  os << m.format(fmt);
  return os.str();
}

const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::ReachedTMax: return "reached-t-max";
    case OutcomeKind::BlowUp: return "blow-up";
    case OutcomeKind::Converged: return "converged";
    case OutcomeKind::StepUnderflow: return "step-underflow";
  }
  return "?";
}

// Shared --name/--input selection; exactly one must be given.
struct InputSel {
  std::string name;
  std::string path;

  void attach(CLI::App* cmd) {
    auto* n = cmd->add_option("--name", name, "Built-in catalog fixture name");
    auto* f =
        cmd->add_option("--input", path, "JSON bracket file (see README)");
    n->excludes(f);
    cmd->final_callback([this, cmd] {
      if (name.empty() && path.empty())
        throw CLI::RequiredError(cmd->get_name() +
                                 ": one of --name/--input is required");
    });
  }

  // Resolved label + bracket; throws std::runtime_error on unknown names,
  // unreadable files or non-integrable data.
  std::pair<std::string, DorfmanBracket> resolve() const {
    if (!name.empty()) {
      const CatalogEntry* e = catalog_find(name);
      if (e == nullptr)
        throw std::runtime_error("unknown catalog fixture: " + name +
                                 " (run `genflow catalog list`)");
      return {name, to_dorfman(e->spec)};
    }
    AlgebraSpec spec = load_spec_file(path);
    return {spec.name, to_dorfman(spec)};
  }
};

json certificate_json(const SolitonVerification& v) {
  const SolitonCertificate& c = v.certificate;
  json j;
  j["passed"] = v.passed;
  j["lambda"] = c.lambda;
  j["class"] = to_string(c.soliton_class);
  j["D"] = mat_json(c.D);
  j["residual_metric"] = c.residual_metric;
  j["residual_torsion"] = c.residual_torsion;
  j["residual_torsion_invariant"] = c.residual_torsion_invariant;
  j["harmonic_torsion"] = c.harmonic_torsion;
  j["degenerate_mu"] = c.degenerate_mu;
  return j;
}

void print_certificate(std::ostream& out, const std::string& label,
                       const SolitonVerification& v) {
  const SolitonCertificate& c = v.certificate;
  out << label << ": " << (v.passed ? "soliton" : "not a soliton") << "\n";
  out << "  class:  " << to_string(c.soliton_class)
      << "   lambda: " << c.lambda << "\n";
  out << "  D = Ric^B - lambda Id:\n" << mat_text(c.D) << "\n";
  out << "  residual_metric:  " << c.residual_metric << "\n";
  out << "  residual_torsion: " << c.residual_torsion
      << "   (invariant form: " << c.residual_torsion_invariant << ")\n";
  out << "  harmonic torsion: " << (c.harmonic_torsion ? "yes" : "no")
      << (c.degenerate_mu ? "   [abelian bracket: lambda from torsion]" : "")
      << "\n";
}

int run_curvature(std::ostream& out, const InputSel& sel, bool as_json) {
  auto [label, mud] = sel.resolve();
  AlgebraReport rep = structure_report(mud.mu);
  Endomorphism ric = ricci(mud.mu);
  Endomorphism ricB = bismut_ricci(mud);
  LElement m = l_moment_map(mud);
  KForm dstarH = codifferential(mud.mu, mud.H);
  double n2 = dorfman_norm2(mud);
  double s = gen_scalar(mud);
  double scal = scalar_curvature(mud.mu);
  double h2 = form_inner(mud.H, mud.H, InnerConvention::full);

  if (as_json) {
    json j;
    j["name"] = label;
    j["dim"] = mud.dim();
    j["lie"] = rep.is_lie;
    j["nilpotent"] = rep.is_nilpotent;
    j["nilpotency_step"] = rep.lower_central_length;
    j["solvable"] = rep.is_solvable;
    j["unimodular"] = rep.is_unimodular;
    j["norm2_mud"] = n2;
    j["norm2_H"] = h2;
    j["scal"] = scal;
    j["gen_scalar"] = s;
    j["ricci"] = mat_json(ric);
    j["bismut_ricci"] = mat_json(ricB);
    j["moment_map_A"] = mat_json(m.A);
    j["moment_map_alpha"] = form_json(m.alpha);
    j["dstar_H"] = form_json(dstarH);
    j["H"] = form_json(mud.H);
    out << j.dump(2) << "\n";
    return 0;
  }

  out << label << "  (dim " << mud.dim() << ")\n";
  out << "  lie: " << (rep.is_lie ? "yes" : "no")
      << "   nilpotent: " << (rep.is_nilpotent ? "yes" : "no");
  if (rep.is_nilpotent) out << " (step " << rep.lower_central_length << ")";
  out << "   solvable: " << (rep.is_solvable ? "yes" : "no")
      << "   unimodular: " << (rep.is_unimodular ? "yes" : "no") << "\n";
  out << "  H = " << format_form(mud.H) << "\n";
  out << "  |mud|^2 = " << n2 << "   |H|^2 = " << h2 << "\n";
  out << "  scal = " << scal << "   S = " << s << "\n";
  out << "  Ric_mu:\n" << mat_text(ric) << "\n";
  out << "  Ric^B:\n" << mat_text(ricB) << "\n";
  out << "  moment map (g part):\n" << mat_text(m.A) << "\n";
  out << "  moment map (2-form part) = " << format_form(m.alpha) << "\n";
  out << "  d*H = " << format_form(dstarH) << "\n";
  return 0;
}

int run_flow(std::ostream& out, const InputSel& sel, const FlowOptions& opts,
             const std::string& csv_path, bool as_json) {
  auto [label, mud] = sel.resolve();
  FlowOutcome res = integrate(mud, opts);

  if (csv_path == "-") {
    if (as_json)
      throw std::runtime_error(
          "--csv - and --json both claim stdout; write the CSV to a file");
    emit_trajectory_csv(res.trajectory, out);
    return 0;
  }
  if (!csv_path.empty()) emit_trajectory_csv(res.trajectory, csv_path);

  const TrajectorySample& last = res.trajectory.back();
  if (as_json) {
    json j;
    j["name"] = label;
    j["outcome"] = outcome_name(res.kind);
    j["t_end"] = last.t;
    j["steps_accepted"] = res.steps_accepted;
    j["steps_rejected"] = res.steps_rejected;
    j["norm2_mud_end"] = last.norm2_mud;
    j["gen_scalar_end"] = last.gen_scalar;
    j["jacobi_residual_end"] = last.jacobi_residual;
    j["dH_residual_end"] = last.dH_residual;
    if (res.kind == OutcomeKind::BlowUp) j["blowup_time"] = res.blowup_time;
    if (res.limit) {
      j["limit"] = spec_to_json(from_dorfman(label + "-limit", *res.limit));
      j["limit_verification"] =
          certificate_json(verify_soliton(*res.limit, 1e-6));
    }
    out << j.dump(2) << "\n";
    return 0;
  }

  out << label << ": " << outcome_name(res.kind) << " at t = " << last.t
      << "  (" << res.steps_accepted << " steps accepted, "
      << res.steps_rejected << " rejected)\n";
  out << "  |mud|^2 = " << last.norm2_mud << "   S = " << last.gen_scalar
      << "   scal = " << last.scal << "\n";
  out << "  invariant drift: jacobi " << last.jacobi_residual << ", dH "
      << last.dH_residual << "\n";
  if (res.kind == OutcomeKind::BlowUp)
    out << "  blow-up time estimate: T = " << res.blowup_time << "\n";
  if (res.limit)
    print_certificate(out, "  limit", verify_soliton(*res.limit, 1e-6));
  return 0;
}

int run_verify(std::ostream& out, const InputSel& sel, double tol,
               bool as_json) {
  auto [label, mud] = sel.resolve();
  SolitonVerification v = verify_soliton(mud, tol);
  if (as_json) {
    json j = certificate_json(v);
    j["name"] = label;
    out << j.dump(2) << "\n";
  } else {
    print_certificate(out, label, v);
  }
  return v.passed ? 0 : 1;
}

int run_search(std::ostream& out, const InputSel& sel,
               const SearchOptions& opts, bool as_json) {
  auto [label, mud] = sel.resolve();
  SearchReport rep = search_soliton(mud, opts);
  if (as_json) {
    json j;
    j["name"] = label;
    j["converged"] = rep.converged;
    j["steps"] = rep.steps;
    j["harmonic_start"] = rep.harmonic_start;
    j["functional_value"] = rep.functional_value;
    j["limit"] = spec_to_json(from_dorfman(label + "-limit", rep.limit));
    j["verification"] = certificate_json(rep.verification);
    out << j.dump(2) << "\n";
  } else {
    out << label << ": normalized flow "
        << (rep.converged ? "converged" : "did not converge") << " after "
        << rep.steps << " steps"
        << (rep.harmonic_start ? "" : "  [warning: d*H != 0 at start]")
        << "\n";
    out << "  F = |M|^2/|mud|^4 at limit: " << rep.functional_value << "\n";
    AlgebraSpec lim = from_dorfman("limit", rep.limit);
    out << "  limit bracket (unit norm):\n";
    for (const TensorEntry& e : lim.mu)
      out << "    mu(e" << e.i << ",e" << e.j << ") += " << e.v << " e" << e.k
          << "\n";
    out << "  limit H = " << format_form(rep.limit.H) << "\n";
    print_certificate(out, "  limit", rep.verification);
  }
  return rep.verification.passed ? 0 : 1;
}

int run_catalog_list(std::ostream& out, bool as_json) {
  if (as_json) {
    json arr = json::array();
    for (const CatalogEntry& e : catalog()) {
      json j;
      j["name"] = e.spec.name;
      j["dim"] = e.spec.dim;
      j["control"] = e.control;
      if (e.expected) {
        j["expected_lambda"] = e.expected->lambda;
        j["expected_class"] = to_string(e.expected->soliton_class);
      }
      arr.push_back(j);
    }
    out << arr.dump(2) << "\n";
    return 0;
  }
  out << std::left << std::setw(18) << "name" << std::setw(5) << "dim"
      << "role\n";
  for (const CatalogEntry& e : catalog()) {
    std::string role = e.control ? "control (must fail verification)"
                     : e.expected
                         ? std::string("soliton, lambda = ") +
                               std::to_string(e.expected->lambda)
                         : "fixture";
    out << std::left << std::setw(18) << e.spec.name << std::setw(5)
        << e.spec.dim << role << "\n";
  }
  return 0;
}

int run_catalog_show(std::ostream& out, const std::string& name) {
  const CatalogEntry* e = catalog_find(name);
  if (e == nullptr)
    throw std::runtime_error("unknown catalog fixture: " + name);
  json j = spec_to_json(e->spec);
  j["control"] = e->control;
  if (e->expected) {
    j["expected"] = {{"lambda", e->expected->lambda},
                     {"class", to_string(e->expected->soliton_class)},
                     {"D", mat_json(e->expected->D)}};
  }
  out << j.dump(2) << "\n";
  return 0;
}

int run_catalog_export(std::ostream& out, const std::string& name,
                       const std::string& path) {
  const CatalogEntry* e = catalog_find(name);
  if (e == nullptr)
    throw std::runtime_error("unknown catalog fixture: " + name);
  if (path.empty() || path == "-")
    out << spec_to_json(e->spec).dump(2) << "\n";
  else
    save_spec_file(e->spec, path);
  return 0;
}

int run_reproduce(std::ostream& out, double tol, bool as_json) {
  ClassificationReport rep = reproduce_classification(tol);
  if (as_json) {
    json arr = json::array();
    for (const ClassificationRow& r : rep.rows) {
      json j;
      j["name"] = r.name;
      j["control"] = r.is_control;
      j["passed"] = r.passed;
      j["lambda"] = r.lambda;
      j["class"] = to_string(r.soliton_class);
      if (r.has_expected_lambda) {
        j["lambda_expected"] = r.lambda_expected;
        j["lambda_error"] = r.lambda_error;
        j["d_error"] = r.d_error;
      }
      j["residual_metric"] = r.residual_metric;
      j["residual_torsion"] = r.residual_torsion;
      arr.push_back(j);
    }
    json top;
    top["rows"] = arr;
    top["all_passed"] = rep.all_passed;
    out << top.dump(2) << "\n";
    return rep.all_passed ? 0 : 1;
  }

  out << std::left << std::setw(22) << "name" << std::setw(11) << "class"
      << std::right << std::setw(10) << "lambda" << std::setw(11) << "|dlam|"
      << std::setw(11) << "|dD|" << std::setw(11) << "res_m" << std::setw(11)
      << "res_t"
      << "  result\n";
  auto sci = [](double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(1) << v;
    return os.str();
  };
  for (const ClassificationRow& r : rep.rows) {
    out << std::left << std::setw(22) << r.name << std::setw(11)
        << to_string(r.soliton_class) << std::right << std::fixed
        << std::setprecision(4) << std::setw(10) << r.lambda;
    if (r.has_expected_lambda)
      out << std::setw(11) << sci(r.lambda_error) << std::setw(11)
          << sci(r.d_error);
    else
      out << std::setw(11) << "-" << std::setw(11) << "-";
    out << std::setw(11) << sci(r.residual_metric) << std::setw(11)
        << sci(r.residual_torsion) << "  "
        << (r.passed ? (r.is_control ? "PASS (rejected)" : "PASS") : "FAIL")
        << "\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  out << (rep.all_passed ? "all rows PASS\n" : "some rows FAILED\n");
  return rep.all_passed ? 0 : 1;
}

}  // namespace

int cli_main(std::vector<std::string> args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{
      "genflow: generalized Ricci flow on Lie groups, at the level of "
      "structure constants"};
  app.require_subcommand(1);

  // curvature ---------------------------------------------------------------
  auto* cur = app.add_subcommand(
      "curvature", "Curvature and moment-map data of a bracket");
  InputSel cur_in;
  cur_in.attach(cur);
  bool cur_json = false;
  cur->add_flag("--json", cur_json, "Machine-readable output");

  // flow --------------------------------------------------------------------
  auto* flw = app.add_subcommand(
      "flow", "Integrate the (normalized) generalized bracket flow");
  InputSel flw_in;
  flw_in.attach(flw);
  FlowOptions fopts;
  std::string csv_path;
  bool flw_json = false;
  flw->add_option("--t-max", fopts.t_max, "Integration horizon")
      ->envname("GENFLOW_T_MAX")
      ->capture_default_str();
  flw->add_option("--rtol", fopts.rtol, "Relative step tolerance")
      ->envname("GENFLOW_RTOL")
      ->capture_default_str();
  flw->add_option("--atol", fopts.atol, "Absolute step tolerance")
      ->envname("GENFLOW_ATOL")
      ->capture_default_str();
  flw->add_option("--max-steps", fopts.max_steps, "Accepted-step budget")
      ->envname("GENFLOW_MAX_STEPS")
      ->capture_default_str();
  flw->add_option("--monitor-every", fopts.monitor_every,
                  "Record every k-th accepted step")
      ->envname("GENFLOW_MONITOR_EVERY")
      ->capture_default_str();
  flw->add_flag("--normalized", fopts.normalized,
                "Scalar-normalized flow (|mud| constant)");
  flw->add_option("--csv", csv_path, "Write the trajectory as CSV ('-' = stdout)");
  flw->add_flag("--json", flw_json, "Machine-readable summary");

  // verify ------------------------------------------------------------------
  auto* ver = app.add_subcommand(
      "verify", "Check the algebraic soliton equations for a bracket");
  InputSel ver_in;
  ver_in.attach(ver);
  double ver_tol = 1e-8;
  bool ver_json = false;
  ver->add_option("--tol", ver_tol, "Residual tolerance")
      ->envname("GENFLOW_VERIFY_TOL")
      ->capture_default_str();
  ver->add_flag("--json", ver_json, "Machine-readable certificate");

  // search ------------------------------------------------------------------
  auto* sea = app.add_subcommand(
      "search", "Normalized-flow soliton search from a starting bracket");
  InputSel sea_in;
  sea_in.attach(sea);
  SearchOptions sopts;
  bool sea_json = false;
  sea->add_option("--t-max", sopts.t_max, "Integration horizon")
      ->envname("GENFLOW_T_MAX")
      ->capture_default_str();
  sea->add_option("--max-steps", sopts.max_steps, "Accepted-step budget")
      ->envname("GENFLOW_MAX_STEPS")
      ->capture_default_str();
  sea->add_option("--verify-tol", sopts.verify_tol,
                  "Residual tolerance at the limit")
      ->envname("GENFLOW_VERIFY_TOL")
      ->capture_default_str();
  sea->add_option("--rtol", sopts.rtol, "Relative step tolerance")
      ->envname("GENFLOW_RTOL")
      ->capture_default_str();
  sea->add_option("--atol", sopts.atol, "Absolute step tolerance")
      ->envname("GENFLOW_ATOL")
      ->capture_default_str();
  sea->add_flag("--json", sea_json, "Machine-readable report");

  // catalog -----------------------------------------------------------------
  auto* cat = app.add_subcommand("catalog", "Built-in fixture library");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "List the fixtures");
  bool cat_json = false;
  cat_list->add_flag("--json", cat_json, "Machine-readable list");
  auto* cat_show = cat->add_subcommand("show", "Print one fixture");
  std::string show_name;
  cat_show->add_option("name", show_name, "Fixture name")->required();
  auto* cat_export =
      cat->add_subcommand("export", "Write a fixture as a JSON bracket file");
  std::string export_name, export_path;
  cat_export->add_option("name", export_name, "Fixture name")->required();
  cat_export->add_option("--output", export_path,
                         "Destination path ('-' = stdout)");

  // reproduce-classification -------------------------------------------------
  auto* rcl = app.add_subcommand(
      "reproduce-classification",
      "Re-derive the built-in low-dimensional nilsoliton table");
  double rcl_tol = 1e-8;
  bool rcl_json = false;
  rcl->add_option("--tol", rcl_tol, "Residual tolerance")
      ->envname("GENFLOW_VERIFY_TOL")
      ->capture_default_str();
  rcl->add_flag("--json", rcl_json, "Machine-readable table");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cur)) return run_curvature(out, cur_in, cur_json);
    if (app.got_subcommand(flw))
      return run_flow(out, flw_in, fopts, csv_path, flw_json);
    if (app.got_subcommand(ver)) return run_verify(out, ver_in, ver_tol, ver_json);
    if (app.got_subcommand(sea)) return run_search(out, sea_in, sopts, sea_json);
    if (app.got_subcommand(cat)) {
      if (cat->got_subcommand(cat_list)) return run_catalog_list(out, cat_json);
      if (cat->got_subcommand(cat_show)) return run_catalog_show(out, show_name);
      return run_catalog_export(out, export_name, export_path);
    }
    return run_reproduce(out, rcl_tol, rcl_json);
  } catch (const std::exception& e) {
    err << "genflow: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace genflow
