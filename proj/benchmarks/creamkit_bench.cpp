#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "creamkit/extended.hpp"
#include "creamkit/hta.hpp"
#include "creamkit/reporting.hpp"
#include "creamkit/screening.hpp"
#include "creamkit/whatif.hpp"

namespace {

using namespace creamkit;

std::string read_fixture(const char* name) {
  std::ifstream in(std::filesystem::path(CREAMKIT_FIXTURE_DIR) / name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Taxonomy& T() { return default_taxonomy(); }

void BM_Screen(benchmark::State& state) {
  const auto a = CpcAssessment::neutral(T());
  for (auto _ : state) benchmark::DoNotOptimize(screen(a, T()));
}
BENCHMARK(BM_Screen);

/// Every assessment of the default catalog, screened once.
void BM_ScreenAllAssessments(benchmark::State& state) {
  std::vector<CpcAssessment> all;
  std::vector<std::size_t> idx(T().cpcs.size(), 0);
  while (true) {
    AssessmentDraft d;
    for (std::size_t k = 0; k < idx.size(); ++k) d.choices[T().cpcs[k].id] = T().cpcs[k].states[idx[k]].name;
    all.push_back(*CpcAssessment::create(d, T()));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == T().cpcs[k].states.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  for (auto _ : state) {
    for (const auto& a : all) benchmark::DoNotOptimize(screen(a, T()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_ScreenAllAssessments)->Unit(benchmark::kMillisecond);

void BM_ParseHta(benchmark::State& state) {
  const auto text = read_fixture(state.range(0) == 0 ? "table4.hta" : "full_synthetic.hta");
  for (auto _ : state) benchmark::DoNotOptimize(parse_hta(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseHta)->Arg(0)->Arg(1);

void BM_Analyze(benchmark::State& state) {
  const auto tree = *parse_hta(read_fixture(state.range(0) == 0 ? "table4.hta" : "full_synthetic.hta"));
  const auto a = CpcAssessment::neutral(T());
  for (auto _ : state) benchmark::DoNotOptimize(analyze(tree, a, T()));
}
BENCHMARK(BM_Analyze)->Arg(0)->Arg(1);

void BM_WhatIfSweep(benchmark::State& state) {
  const auto tree = *parse_hta(read_fixture("full_synthetic.hta"));
  const auto a = CpcAssessment::neutral(T());
  for (auto _ : state) benchmark::DoNotOptimize(single_cpc_sweep(tree, a, T()));
}
BENCHMARK(BM_WhatIfSweep)->Unit(benchmark::kMicrosecond);

void BM_MarkdownReport(benchmark::State& state) {
  const auto tree = *parse_hta(read_fixture("full_synthetic.hta"));
  const auto bundle = make_bundle(tree, CpcAssessment::neutral(T()), T(), BundleOptions{});
  for (auto _ : state) benchmark::DoNotOptimize(markdown_report(bundle));
}
BENCHMARK(BM_MarkdownReport);

}  // namespace

BENCHMARK_MAIN();
