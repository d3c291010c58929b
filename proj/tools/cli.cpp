#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "creamkit/extended.hpp"
#include "creamkit/format.hpp"
#include "creamkit/hta.hpp"
#include "creamkit/reporting.hpp"
#include "creamkit/screening.hpp"
#include "creamkit/whatif.hpp"

namespace creamkit::cli {

namespace {

std::optional<std::string> getenv_opt(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

// Failure carrying the exit code it maps to.
struct Failure {
  int code;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIoOrParseFailure, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Failure{kIoOrParseFailure, "cannot write '" + path + "'"};
}

std::string join_diagnostics(const std::string& path, const std::vector<Diagnostic>& ds) {
  std::string msg;
  for (const auto& d : ds) {
    if (!msg.empty()) msg += '\n';
    msg += path + ":" + (d.line > 0 ? std::to_string(d.line) + ":" : std::string()) + " ";
    if (!d.node.empty()) msg += "node " + d.node + ": ";
    msg += d.message;
  }
  return msg;
}

Taxonomy resolve_taxonomy(const std::string& flag, const Environment& env) {
  std::optional<std::string> path;
  if (!flag.empty()) {
    path = flag;
  } else if (env.taxonomy_path) {
    path = env.taxonomy_path;
  }
  if (!path) return default_taxonomy();
  auto t = load_taxonomy(read_text(*path));
  if (!t) throw Failure{kIoOrParseFailure, join_diagnostics(*path, t.errors())};
  return std::move(t).value();
}

// Parse problems and taxonomy violations both count as validation failures.
TaskTree load_tree(const std::string& path, const Taxonomy& t) {
  auto tree = parse_hta(read_text(path));
  if (!tree) throw Failure{kValidationFailure, join_diagnostics(path, tree.errors())};
  if (auto problems = validate_hta(tree.value(), t); !problems.empty()) {
    throw Failure{kValidationFailure, join_diagnostics(path, problems)};
  }
  return std::move(tree).value();
}

CpcAssessment load_assessment(const std::string& path, const Taxonomy& t) {
  const auto text = read_text(path);
  auto a = parse_assessment(text, t);
  if (!a) {
    const bool malformed = a.errors().size() == 1 && a.errors().front().message == "malformed JSON document";
    throw Failure{malformed ? kIoOrParseFailure : kValidationFailure, join_diagnostics(path, a.errors())};
  }
  return std::move(a).value();
}

std::string epoch_to_iso(const std::string& epoch) {
  char* end = nullptr;
  const long long secs = std::strtoll(epoch.c_str(), &end, 10);
  if (end == epoch.c_str() || *end != '\0') return {};
  const std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string report_timestamp(const CpcAssessment& a, const Environment& env) {
  if (!a.timestamp().empty()) return a.timestamp();
  if (env.source_date_epoch) return epoch_to_iso(*env.source_date_epoch);
  return {};
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void print_profile_table(std::ostream& out, const std::vector<std::pair<std::string, DemandProfile>>& rows) {
  out << pad("scope", 12);
  for (auto f : kAllFunctions) out << pad(std::string(to_string(f)), 16);
  out << "total\n";
  for (const auto& [label, p] : rows) {
    out << pad(label, 12);
    for (auto f : kAllFunctions) out << pad(std::to_string(p.count(f)), 16);
    out << p.total() << '\n';
  }
}

struct Options {
  std::string taxonomy;
  std::string assessment;
  std::string hta;
  std::string out_path;
  std::string scope;
  std::size_t top = 10;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string projects;
  bool no_whatif = false;
};

int run_validate(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  const auto tree = load_tree(o.hta, t);
  out << "OK: " << tree.node_count() << " nodes, " << collect_assignments(tree).size()
      << " assignments\n";
  return kOk;
}

int run_screen(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  const auto a = load_assessment(o.assessment, t);
  const auto r = screen(a, t);
  out << to_string(r.mode) << ' ' << format_interval(r.interval.lower, r.interval.upper) << '\n';
  out << "score: reduce " << r.score.reduce << ", neutral " << r.score.neutral << ", improve "
      << r.score.improve << '\n';
  return kOk;
}

int run_analyze(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  const auto tree = load_tree(o.hta, t);
  const auto a = load_assessment(o.assessment, t);
  BundleOptions bo;
  bo.top_k = o.top;
  bo.include_sweep = false;
  bo.timestamp = report_timestamp(a, env);
  const auto bundle = make_bundle(tree, a, t, bo);
  if (!o.out_path.empty()) write_text(o.out_path, report_json(bundle));

  const auto& s = bundle.screening;
  out << "control mode: " << to_string(s.mode) << ' '
      << format_interval(s.interval.lower, s.interval.upper) << '\n';
  out << "assignments: " << bundle.extended.per_assignment.size() << '\n';
  out << "aggregate failure probability: " << format_scientific(bundle.extended.aggregate_failure_p)
      << '\n';
  out << "critical assignments:\n";
  std::size_t rank = 1;
  for (const auto& r : rank_critical(bundle.extended, o.top)) {
    out << "  " << rank++ << ". " << pad(r.node.str(), 10) << pad(std::string(to_string(r.function)), 16)
        << pad(r.cff, 4) << format_scientific(r.adjusted_cfp) << " (" << to_string(r.source) << ")\n";
  }
  return kOk;
}

int run_profile(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  const auto tree = load_tree(o.hta, t);
  std::vector<std::pair<std::string, DemandProfile>> rows;
  if (!o.scope.empty()) {
    auto n = TaskNumber::parse(o.scope);
    if (!n || tree.find(*n) == nullptr) {
      throw Failure{kValidationFailure, "unknown scope node '" + o.scope + "'"};
    }
    rows.emplace_back(o.scope, demand_profile(tree, *n));
  } else {
    for (const auto& p : step_profiles(tree)) rows.emplace_back(p.scope_label(), p);
    rows.emplace_back("all", demand_profile(tree));
  }
  print_profile_table(out, rows);
  if (!o.out_path.empty()) {
    std::vector<DemandProfile> profiles;
    std::vector<std::string> labels;
    for (const auto& [label, p] : rows) {
      profiles.push_back(p);
      labels.push_back(label == "all" ? "All steps" : "Step " + label);
    }
    write_text(o.out_path, histogram_svg(profiles, labels));
  }
  return kOk;
}

int run_whatif(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  const auto tree = load_tree(o.hta, t);
  const auto a = load_assessment(o.assessment, t);
  const auto sweep = single_cpc_sweep(tree, a, t);
  if (sweep_is_flat(sweep)) {
    out << "note: every assignment carries an expert CFP; ranking reflects control-mode changes only\n";
  }
  std::size_t rank = 1;
  for (const auto& d : sweep) {
    out << pad(std::to_string(rank++) + ".", 5) << "CPC " << d.cpc_id << ": \"" << d.from_state
        << "\" -> \"" << d.to_state << "\"  " << to_string(d.mode_before) << " -> "
        << to_string(d.mode_after) << ' '
        << format_interval(d.interval_after.lower, d.interval_after.upper) << "  aggregate "
        << format_scientific(d.aggregate_before) << " -> " << format_scientific(d.aggregate_after)
        << '\n';
  }
  if (auto best = best_improvement(sweep)) {
    out << "best improvement: CPC " << best->cpc_id << " -> \"" << best->to_state << "\"\n";
  } else {
    out << "no strict improvement\n";
  }
  return kOk;
}

int run_report(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  const auto hta_text = read_text(o.hta);
  const auto tree = load_tree(o.hta, t);
  const auto assessment_text = read_text(o.assessment);
  const auto a = load_assessment(o.assessment, t);
  BundleOptions bo;
  bo.top_k = o.top;
  bo.include_sweep = !o.no_whatif;
  bo.timestamp = report_timestamp(a, env);
  bo.inputs = {{std::filesystem::path(o.hta).filename().string(), sha256_hex(hta_text)},
               {std::filesystem::path(o.assessment).filename().string(), sha256_hex(assessment_text)}};
  const auto bundle = make_bundle(tree, a, t, bo);
  try {
    write_report_files(bundle, o.out_path);
  } catch (const Error& e) {
    throw Failure{kIoOrParseFailure, e.what()};
  }
  for (const char* name : {"report.json", "report.csv", "profile.svg", "report.md"}) {
    out << "wrote " << (std::filesystem::path(o.out_path) / name).string() << '\n';
  }
  return kOk;
}

int run_taxonomy(const Options& o, std::ostream& out, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  if (o.out_path.empty()) {
    out << serialize_taxonomy(t);
  } else {
    write_text(o.out_path, serialize_taxonomy(t));
  }
  return kOk;
}

int run_serve(const Options& o, std::ostream& out, std::ostream& err, const Environment& env) {
  const auto t = resolve_taxonomy(o.taxonomy, env);
  ServeOptions so;
  so.host = o.host;
  so.port = o.port;
  so.projects_dir = !o.projects.empty() ? o.projects : env.projects_dir.value_or("projects");
  return serve_api(so, t, out, err);
}

}  // namespace

Environment Environment::from_process() {
  return Environment{getenv_opt("CREAMKIT_TAXONOMY"), getenv_opt("CREAMKIT_PROJECTS"),
                     getenv_opt("SOURCE_DATE_EPOCH")};
}

int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                    const Environment& env) {
  CLI::App app{"creamkit: CREAM human reliability analysis for task analyses", "creamkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Options o;
  auto add_taxonomy = [&](CLI::App* sub) {
    sub->add_option("--taxonomy", o.taxonomy, "Taxonomy JSON (default: $CREAMKIT_TAXONOMY or built-in)");
  };
  auto add_hta = [&](CLI::App* sub) {
    sub->add_option("hta", o.hta, "Task analysis (.hta)")->required();
  };
  auto add_assessment = [&](CLI::App* sub) {
    sub->add_option("--assessment,-a", o.assessment, "CPC assessment JSON")->required();
  };

  auto* validate = app.add_subcommand("validate", "Check a task analysis against the taxonomy");
  add_hta(validate);
  add_taxonomy(validate);

  auto* screen_cmd = app.add_subcommand("screen", "Basic screening: control mode and HEP interval");
  add_assessment(screen_cmd);
  add_taxonomy(screen_cmd);

  auto* analyze_cmd = app.add_subcommand("analyze", "Extended analysis of every assignment");
  add_hta(analyze_cmd);
  add_assessment(analyze_cmd);
  add_taxonomy(analyze_cmd);
  analyze_cmd->add_option("--top", o.top, "Critical assignments to list");
  analyze_cmd->add_option("--out", o.out_path, "Write the analysis JSON here");

  auto* profile_cmd = app.add_subcommand("profile", "Cognitive demand profile");
  add_hta(profile_cmd);
  add_taxonomy(profile_cmd);
  profile_cmd->add_option("--scope", o.scope, "Restrict to one node, e.g. 3");
  profile_cmd->add_option("--out", o.out_path, "Write the histogram SVG here");

  auto* whatif_cmd = app.add_subcommand("whatif", "Rank single-CPC improvements");
  add_hta(whatif_cmd);
  add_assessment(whatif_cmd);
  add_taxonomy(whatif_cmd);

  auto* report_cmd = app.add_subcommand("report", "Write report.json, report.csv, profile.svg, report.md");
  add_hta(report_cmd);
  add_assessment(report_cmd);
  add_taxonomy(report_cmd);
  report_cmd->add_option("--out", o.out_path, "Output directory")->required();
  report_cmd->add_option("--top", o.top, "Critical assignments to list");
  report_cmd->add_flag("--no-whatif", o.no_whatif, "Omit the what-if section");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API for the analyst console");
  add_taxonomy(serve_cmd);
  serve_cmd->add_option("--port", o.port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--host", o.host, "Bind address");
  serve_cmd->add_option("--projects", o.projects, "Project directory (default: $CREAMKIT_PROJECTS or ./projects)");

  auto* taxonomy_cmd = app.add_subcommand("taxonomy", "Print the active taxonomy document");
  add_taxonomy(taxonomy_cmd);
  taxonomy_cmd->add_option("--out", o.out_path, "Write the document here");

  if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
    const auto subs = app.get_subcommands([](CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(),
                                   [&](CLI::App* s) { return s->get_name() == args.front(); });
    if (!known) {
      err << "error: unknown subcommand '" << args.front() << "'\n" << app.help();
      return kIoOrParseFailure;
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kIoOrParseFailure;
  }

  try {
    if (validate->parsed()) return run_validate(o, out, env);
    if (screen_cmd->parsed()) return run_screen(o, out, env);
    if (analyze_cmd->parsed()) return run_analyze(o, out, env);
    if (profile_cmd->parsed()) return run_profile(o, out, env);
    if (whatif_cmd->parsed()) return run_whatif(o, out, env);
    if (report_cmd->parsed()) return run_report(o, out, env);
    if (serve_cmd->parsed()) return run_serve(o, out, err, env);
    if (taxonomy_cmd->parsed()) return run_taxonomy(o, out, env);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoOrParseFailure;
  }
  err << app.help();
  return kIoOrParseFailure;
}

}  // namespace creamkit::cli
