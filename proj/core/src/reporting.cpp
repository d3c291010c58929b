#include "creamkit/reporting.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "creamkit/format.hpp"
#include "json_codec.hpp"

namespace creamkit {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int k = 0; k < len; ++k) {
    out += kHex[md[k] >> 4];
    out += kHex[md[k] & 0xF];
  }
  return out;
}

ReportBundle make_bundle(const TaskTree& tree, const CpcAssessment& context, const Taxonomy& t,
                         const BundleOptions& options) {
  ReportBundle b;
  b.title = tree.metadata.name.empty() ? "Task analysis" : tree.metadata.name;
  for (const auto& cpc : t.cpcs) {
    const auto& state = context.state_of(cpc.id);
    b.context.push_back({cpc.id, cpc.name, state, cpc.find_state(state)->effect});
  }
  b.screening = screen(context, t);
  b.extended = analyze(tree, context, t);
  b.step_profiles = step_profiles(tree);
  if (options.include_sweep) b.sweep = single_cpc_sweep(tree, context, t);
  b.top_k = options.top_k;
  b.provenance = Provenance{t.version, options.inputs, options.timestamp};
  return b;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

// Layout, in SVG user units.
constexpr double kBarWidth = 22.0;
constexpr double kBarGap = 4.0;
constexpr double kGroupGap = 36.0;
constexpr double kPlotHeight = 220.0;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 56.0;
constexpr double kGroupWidth = 4 * kBarWidth + 3 * kBarGap;
constexpr std::array<const char*, 4> kBarColors = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759"};

std::string coord(double v) {
  std::array<char, 32> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string histogram_svg(const std::vector<DemandProfile>& profiles,
                          const std::vector<std::string>& labels) {
  if (profiles.empty()) throw Error("histogram needs at least one profile");
  if (labels.size() != profiles.size()) throw Error("histogram needs one label per profile");

  int max_count = 0;
  for (const auto& p : profiles) {
    for (int c : p.counts) max_count = std::max(max_count, c);
  }
  const int step = std::max(1, (max_count + 4) / 5);
  const int axis_top = std::max(step, ((max_count + step - 1) / step) * step);

  const auto n = static_cast<double>(profiles.size());
  const double plot_width = n * kGroupWidth + (n + 1) * kGroupGap;
  const double width = kMarginLeft + plot_width + kMarginRight;
  const double height = kMarginTop + kPlotHeight + kMarginBottom;
  const double base_y = kMarginTop + kPlotHeight;

  std::ostringstream os;
  os << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n';
  os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << coord(width) << R"(" height=")"
     << coord(height) << R"(" viewBox="0 0 )" << coord(width) << ' ' << coord(height) << R"(">)"
     << '\n';
  os << R"(  <title>Cognitive demand profile</title>)" << '\n';
  os << R"(  <rect x="0" y="0" width=")" << coord(width) << R"(" height=")" << coord(height)
     << R"(" fill="#ffffff"/>)" << '\n';

  // Legend.
  for (std::size_t f = 0; f < kAllFunctions.size(); ++f) {
    const double lx = kMarginLeft + static_cast<double>(f) * 120.0;
    os << R"(  <rect class="legend" x=")" << coord(lx) << R"(" y="14" width="12" height="12" fill=")"
       << kBarColors[f] << R"("/>)" << '\n';
    os << R"(  <text x=")" << coord(lx + 16) << R"(" y="24" font-family="sans-serif" font-size="11">)"
       << to_string(kAllFunctions[f]) << "</text>\n";
  }

  // Axes and integer ticks.
  os << R"(  <line class="axis" x1=")" << coord(kMarginLeft) << R"(" y1=")" << coord(kMarginTop)
     << R"(" x2=")" << coord(kMarginLeft) << R"(" y2=")" << coord(base_y)
     << R"(" stroke="#000000"/>)" << '\n';
  os << R"(  <line class="axis" x1=")" << coord(kMarginLeft) << R"(" y1=")" << coord(base_y)
     << R"(" x2=")" << coord(kMarginLeft + plot_width) << R"(" y2=")" << coord(base_y)
     << R"(" stroke="#000000"/>)" << '\n';
  for (int v = 0; v <= axis_top; v += step) {
    const double y = base_y - kPlotHeight * v / axis_top;
    os << R"(  <text class="tick" x=")" << coord(kMarginLeft - 6) << R"(" y=")" << coord(y + 4)
       << R"(" text-anchor="end" font-family="sans-serif" font-size="11">)" << v << "</text>\n";
  }

  for (std::size_t g = 0; g < profiles.size(); ++g) {
    const double gx = kMarginLeft + kGroupGap + static_cast<double>(g) * (kGroupWidth + kGroupGap);
    os << R"(  <g class="group" data-label=")" << xml_escape(labels[g]) << R"(">)" << '\n';
    for (std::size_t f = 0; f < kAllFunctions.size(); ++f) {
      const int count = profiles[g].counts[f];
      const double h = kPlotHeight * count / axis_top;
      const double x = gx + static_cast<double>(f) * (kBarWidth + kBarGap);
      os << R"(    <rect class="bar" data-function=")" << to_string(kAllFunctions[f])
         << R"(" data-count=")" << count << R"(" x=")" << coord(x) << R"(" y=")"
         << coord(base_y - h) << R"(" width=")" << coord(kBarWidth) << R"(" height=")" << coord(h)
         << R"(" fill=")" << kBarColors[f] << R"("/>)" << '\n';
      os << R"(    <text x=")" << coord(x + kBarWidth / 2) << R"(" y=")" << coord(base_y - h - 4)
         << R"(" text-anchor="middle" font-family="sans-serif" font-size="10">)" << count
         << "</text>\n";
    }
    os << R"(    <text class="group-label" x=")" << coord(gx + kGroupWidth / 2) << R"(" y=")"
       << coord(base_y + 20) << R"(" text-anchor="middle" font-family="sans-serif" font-size="12">)"
       << xml_escape(labels[g]) << "</text>\n";
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string profile_figure(const ReportBundle& bundle) {
  std::vector<DemandProfile> profiles = bundle.step_profiles;
  std::vector<std::string> labels;
  for (const auto& p : profiles) labels.push_back("Step " + p.scope_label());
  profiles.push_back(bundle.extended.profile);
  labels.emplace_back("All steps");
  return histogram_svg(profiles, labels);
}

// ---------------------------------------------------------------------------
// CSV / JSON

std::string report_csv(const ExtendedResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& a : result.per_assignment) {
    out += a.node.str() + ',' + std::string(to_string(a.function)) + ',' + a.cff + ',' +
           format_scientific(a.nominal) + ',' + format_scientific(a.adjusted_cfp) + ',' +
           std::string(to_string(a.source)) + '\n';
  }
  return out;
}

std::string report_json(const ReportBundle& b) {
  json context = json::array();
  for (const auto& row : b.context) {
    context.push_back({{"cpc", row.cpc_id},
                       {"name", row.cpc_name},
                       {"state", row.state},
                       {"effect", to_string(row.effect)}});
  }
  json steps = json::array();
  for (const auto& p : b.step_profiles) steps.push_back(codec::profile_to_json(p));
  json inputs = json::array();
  for (const auto& in : b.provenance.inputs) inputs.push_back({{"name", in.name}, {"sha256", in.sha256}});

  json doc{{"format", "creamkit-report/1"},
           {"title", b.title},
           {"provenance",
            {{"taxonomy_version", b.provenance.taxonomy_version},
             {"inputs", inputs},
             {"timestamp", b.provenance.timestamp}}},
           {"context", context},
           {"screening", codec::screening_to_json(b.screening)},
           {"extended", codec::extended_to_json(b.extended)},
           {"step_profiles", steps},
           {"top_k", b.top_k},
           {"critical", json::array()}};
  for (const auto& a : rank_critical(b.extended, b.top_k)) {
    doc["critical"].push_back(codec::assignment_result_to_json(a));
  }
  if (b.sweep) {
    json deltas = json::array();
    for (const auto& d : *b.sweep) deltas.push_back(codec::delta_to_json(d));
    const auto best = best_improvement(*b.sweep);
    doc["whatif"] = {{"deltas", deltas},
                     {"flat", sweep_is_flat(*b.sweep)},
                     {"best", best ? codec::delta_to_json(*best) : json(nullptr)}};
  }
  return doc.dump(2) + "\n";
}

ReportBundle bundle_from_json(std::string_view document) {
  try {
    const auto doc = json::parse(document);
    if (doc.value("format", "") != "creamkit-report/1") throw Error("not a creamkit report");
    ReportBundle b;
    b.title = doc.at("title").get<std::string>();
    for (const auto& row : doc.at("context")) {
      auto effect = parse_effect(row.at("effect").get<std::string>());
      if (!effect) throw Error("unknown effect in context");
      b.context.push_back({row.at("cpc").get<int>(), row.at("name").get<std::string>(),
                           row.at("state").get<std::string>(), *effect});
    }
    b.screening = codec::screening_from_json(doc.at("screening"));
    b.extended = codec::extended_from_json(doc.at("extended"));
    for (const auto& p : doc.at("step_profiles")) b.step_profiles.push_back(codec::profile_from_json(p));
    b.top_k = doc.at("top_k").get<std::size_t>();
    const auto& prov = doc.at("provenance");
    b.provenance.taxonomy_version = prov.at("taxonomy_version").get<std::string>();
    b.provenance.timestamp = prov.at("timestamp").get<std::string>();
    for (const auto& in : prov.at("inputs")) {
      b.provenance.inputs.push_back({in.at("name").get<std::string>(), in.at("sha256").get<std::string>()});
    }
    if (doc.contains("whatif")) {
      std::vector<WhatIfDelta> deltas;
      for (const auto& d : doc.at("whatif").at("deltas")) deltas.push_back(codec::delta_from_json(d));
      b.sweep = std::move(deltas);
    }
    return b;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Markdown

namespace {

std::string_view effect_sign(Effect e) {
  switch (e) {
    case Effect::Improve: return "+";
    case Effect::Neutral: return "0";
    case Effect::Reduce: return "-";
  }
  return "?";
}

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string markdown_report(const ReportBundle& b) {
  std::ostringstream os;
  os << "# CREAM analysis: " << md_cell(b.title) << "\n\n";
  os << "- Taxonomy: `" << b.provenance.taxonomy_version << "`\n";
  os << "- Timestamp: " << (b.provenance.timestamp.empty() ? "not recorded" : b.provenance.timestamp)
     << "\n";
  for (const auto& in : b.provenance.inputs) {
    os << "- Input `" << in.name << "` sha256 `" << in.sha256 << "`\n";
  }
  os << "\n## Working context\n\n";
  if (!b.extended.context.label.empty()) os << "Assessment: " << md_cell(b.extended.context.label) << "\n\n";
  os << "| CPC | Condition | State | Effect |\n|---:|---|---|:---:|\n";
  for (const auto& row : b.context) {
    os << "| " << row.cpc_id << " | " << md_cell(row.cpc_name) << " | " << md_cell(row.state)
       << " | " << effect_sign(row.effect) << " |\n";
  }
  const auto& s = b.screening;
  os << "\nCombined score: reduce " << s.score.reduce << ", neutral " << s.score.neutral
     << ", improve " << s.score.improve << "\n";

  os << "\n## Control mode\n\n";
  os << "**" << to_string(s.mode) << "**, human error probability interval "
     << format_interval(s.interval.lower, s.interval.upper) << "\n";

  os << "\n## Critical assignments\n\n";
  const auto critical = rank_critical(b.extended, b.top_k);
  if (critical.empty()) {
    os << "No cognitive function assignments.\n";
  } else {
    os << "| Rank | Node | Function | CFF | Nominal | CFP | Source |\n"
          "|---:|---|---|---|---:|---:|---|\n";
    for (std::size_t k = 0; k < critical.size(); ++k) {
      const auto& a = critical[k];
      os << "| " << k + 1 << " | " << a.node.str() << " | " << to_string(a.function) << " | "
         << a.cff << " | " << format_scientific(a.nominal) << " | "
         << format_scientific(a.adjusted_cfp) << " | " << to_string(a.source) << " |\n";
    }
  }
  os << "\nAggregate failure probability (assignments treated as independent): "
     << format_scientific(b.extended.aggregate_failure_p) << " over "
     << b.extended.per_assignment.size() << " assignments\n";

  os << "\n## Cognitive demand profile\n\n";
  os << "| Scope | Observation | Interpretation | Planning | Execution | Total |\n"
        "|---|---:|---:|---:|---:|---:|\n";
  auto profile_row = [&](const std::string& label, const DemandProfile& p) {
    os << "| " << label;
    for (int c : p.counts) os << " | " << c;
    os << " | " << p.total() << " |\n";
  };
  for (const auto& p : b.step_profiles) profile_row("Step " + p.scope_label(), p);
  profile_row("All steps", b.extended.profile);

  if (b.sweep) {
    os << "\n## What-if ranking\n\n";
    if (sweep_is_flat(*b.sweep)) {
      os << "Every assignment carries an expert CFP, so single-CPC changes leave the aggregate "
            "unchanged; the ranking below reflects control-mode changes only.\n\n";
    }
    if (b.sweep->empty()) {
      os << "No alternative CPC states.\n";
    } else {
      os << "| Rank | CPC | From | To | Mode | Interval after | Aggregate before | Aggregate after |\n"
            "|---:|---:|---|---|---|---|---:|---:|\n";
      for (std::size_t k = 0; k < b.sweep->size(); ++k) {
        const auto& d = (*b.sweep)[k];
        os << "| " << k + 1 << " | " << d.cpc_id << " | " << md_cell(d.from_state) << " | "
           << md_cell(d.to_state) << " | " << to_string(d.mode_before) << " -> "
           << to_string(d.mode_after) << " | "
           << format_interval(d.interval_after.lower, d.interval_after.upper) << " | "
           << format_scientific(d.aggregate_before) << " | " << format_scientific(d.aggregate_after)
           << " |\n";
      }
    }
    if (const auto best = best_improvement(*b.sweep)) {
      os << "\nBest single improvement: CPC " << best->cpc_id << " from \"" << best->from_state
         << "\" to \"" << best->to_state << "\" (aggregate "
         << format_scientific(best->aggregate_before) << " -> "
         << format_scientific(best->aggregate_after) << ")\n";
    } else {
      os << "\nNo single CPC change strictly lowers the aggregate failure probability.\n";
    }
  }
  return os.str();
}

void write_report_files(const ReportBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + (dir / name).string());
  };
  write("report.json", report_json(bundle));
  write("report.csv", report_csv(bundle.extended));
  write("profile.svg", profile_figure(bundle));
  write("report.md", markdown_report(bundle));
}

}  // namespace creamkit
