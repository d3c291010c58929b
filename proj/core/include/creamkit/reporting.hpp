#pragma once

// Report artifacts: report.json, report.csv, profile.svg and report.md.
// Every renderer is a pure function of its inputs; identical inputs give
// byte-identical output.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "creamkit/extended.hpp"
#include "creamkit/screening.hpp"
#include "creamkit/whatif.hpp"

namespace creamkit {

struct InputDigest {
  std::string name;
  std::string sha256;

  bool operator==(const InputDigest&) const = default;
};

struct Provenance {
  std::string taxonomy_version;
  std::vector<InputDigest> inputs;
  std::string timestamp;

  bool operator==(const Provenance&) const = default;
};

struct ContextRow {
  int cpc_id;
  std::string cpc_name;
  std::string state;
  Effect effect;

  bool operator==(const ContextRow&) const = default;
};

struct ReportBundle {
  std::string title;
  std::vector<ContextRow> context;
  ScreeningResult screening;
  ExtendedResult extended;
  std::vector<DemandProfile> step_profiles;
  std::optional<std::vector<WhatIfDelta>> sweep;
  std::size_t top_k = 10;
  Provenance provenance;

  bool operator==(const ReportBundle&) const = default;
};

struct BundleOptions {
  std::size_t top_k = 10;
  bool include_sweep = true;
  std::string timestamp;
  std::vector<InputDigest> inputs;
};

/// Runs screening, analysis and (optionally) the what-if sweep.
ReportBundle make_bundle(const TaskTree& tree, const CpcAssessment& context, const Taxonomy& t,
                         const BundleOptions& options);

std::string sha256_hex(std::string_view data);

/// Grouped bar chart: one group per profile, bars in Observation,
/// Interpretation, Planning, Execution order. Throws Error on empty input or
/// a label count that does not match.
std::string histogram_svg(const std::vector<DemandProfile>& profiles,
                          const std::vector<std::string>& labels);

/// Per-step groups followed by the whole-tree group.
std::string profile_figure(const ReportBundle& bundle);

inline constexpr std::string_view kCsvHeader = "node,function,cff,nominal,adjusted,source";

std::string report_csv(const ExtendedResult& result);
std::string report_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(std::string_view document);
std::string markdown_report(const ReportBundle& bundle);

/// Writes report.json, report.csv, profile.svg and report.md into `dir`.
void write_report_files(const ReportBundle& bundle, const std::filesystem::path& dir);

}  // namespace creamkit
