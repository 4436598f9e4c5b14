// Acceptance run: one line per criterion, exit status 1 if any criterion fails.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "humpforge/humpbuilder.hpp"
#include "humpforge/json_io.hpp"
#include "humpforge/rng.hpp"
#include "humpforge/seqcore.hpp"
#include "humpforge/stage_io.hpp"
#include "humpforge/verifier.hpp"

namespace fs = std::filesystem;
using namespace humpforge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

struct Verdict {
  bool passed = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v, const std::string& summary) {
  std::printf("criterion %d %s %s: %s%s%s\n", id, v.passed ? "PASS" : "FAIL", title.c_str(), summary.c_str(),
              v.detail.empty() ? "" : " | ", v.detail.c_str());
  std::fflush(stdout);
  if (!v.passed) ++failures;
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "humpforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str() + e.str();
  return code;
}

void criterion_rearrangement() {
  Verdict v;
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto u = random_sparse(hash_combine(0xACCE, s));
    std::vector<double> sorted;
    for (const auto& e : u.entries()) sorted.push_back(std::abs(e.value));
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (decreasing_rearrangement(u).values != sorted) ++mismatches;
  }
  const double t = seconds_since(start);
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.require(t < 1.0, "runtime " + fmt("%.3f", t) + " s >= 1 s");
  report(1, "rearrangement oracle", v, "1000 samples, 0 tolerance, " + fmt("%.3f", t) + " s");
}

void criterion_axioms() {
  Verdict v;
  const auto start = Clock::now();
  std::string summary;
  for (double p : {1.5, 2.0, 3.0}) {
    const Exponent e(p);
    const auto r = axiom_suite(e, 1000, 1);
    for (const auto& c : r.checks) v.require(c.passed, c.id + " failed at p=" + fmt("%g", p));
    v.require(r.max_quasi_triangle_ratio <= std::pow(2.0, 1.0 / p) + 1e-9, "quasi-triangle ratio at p=" + fmt("%g", p));
    v.require(r.min_equiv_ratio >= 1.0, "equiv/weak below 1 at p=" + fmt("%g", p));
    v.require(r.max_equiv_ratio <= e.conjugate() + 1e-9, "equiv/weak above p' at p=" + fmt("%g", p));
    summary += "p=" + fmt("%g", p) + " quasi " + fmt("%.4f", r.max_quasi_triangle_ratio) + "/" +
               fmt("%.4f", std::pow(2.0, 1.0 / p)) + " sandwich [" + fmt("%.4f", r.min_equiv_ratio) + "," +
               fmt("%.4f", r.max_equiv_ratio) + "]; ";
  }
  const double t = seconds_since(start);
  v.require(t < 5.0, "runtime " + fmt("%.3f", t) + " s >= 5 s");
  report(2, "axiom suite", v, summary + fmt("%.3f", t) + " s");
}

// Random l_p-normalized vector with spiky, flat or power-law profile.
SparseSeq probe(SplitMix& rng, Exponent p) {
  const std::size_t size = 1 + rng.below(60);
  const auto shape = rng.below(3);
  std::vector<Entry> entries;
  for (std::size_t i = 1; i <= size; ++i) {
    double x = rng.uniform(1e-3, 1.0);
    if (shape == 1) x = 1.0 - 1e-4 * x;
    if (shape == 2) x = std::pow(static_cast<double>(i), -rng.uniform(0.05, 2.0));
    entries.push_back({static_cast<Index>(i), (rng.next() & 1) ? x : -x});
  }
  const SparseSeq u(std::move(entries));
  return u.scaled(1.0 / lp_norm(u, p));
}

void criterion_embedding() {
  Verdict v;
  const auto start = Clock::now();
  std::string summary;
  for (double p : {1.5, 2.0, 3.0}) {
    const Exponent e(p);
    SplitMix rng(hash_combine(0xE3BE, static_cast<std::uint64_t>(p * 10)));
    double sup = 0.0;
    for (int i = 0; i < 10000; ++i) sup = std::max(sup, weak_lp_quasinorm(probe(rng, e), e));
    const double at_e1 = weak_lp_quasinorm(SparseSeq::unit(1), e) / lp_norm(SparseSeq::unit(1), e);
    v.require(sup <= 1.0 + 1e-12, "sampled sup " + fmt("%.17g", sup) + " at p=" + fmt("%g", p));
    v.require(at_e1 == 1.0, "e_1 ratio " + fmt("%.17g", at_e1));
    v.require(embedding_constant(e) == 1.0, "embedding_constant != 1");
    summary += "p=" + fmt("%g", p) + " sup " + fmt("%.15f", sup) + "; ";
  }
  const double t = seconds_since(start);
  v.require(t < 5.0, "runtime " + fmt("%.3f", t) + " s >= 5 s");
  report(3, "embedding constant", v, summary + "e_1 ratio 1, " + fmt("%.3f", t) + " s");
}

void criteria_main_construction() {
  const Exponent p(2.0);
  const double delta = 0.1;
  const auto start = Clock::now();
  RunParams params;
  params.p = p;
  params.delta = delta;
  params.stages = 16;
  Verdict v4;
  Verdict v5;
  BuildResult built;
  try {
    built = build_witness_stages(BasisProvider::make_preset(Preset::canonical, 0), params);
  } catch (const std::exception& e) {
    v4.require(false, std::string("construction threw: ") + e.what());
    v5.require(false, "no construction");
    report(4, "main construction (canonical, p=2, delta=0.1, K=16)", v4, "");
    report(5, "growth trend and ratio decay", v5, "");
    return;
  }
  const auto report_data = verify_stages(built.stages, p, delta);
  const double t = seconds_since(start);
  const long rss = peak_rss_kb();

  v4.require(built.stages.size() == 16, "only " + std::to_string(built.stages.size()) + " stages built");
  for (const char* id :
       {"unit_norm", "block_doubling", "support", "flatness", "block_height", "hump_mass", "tail_mass"}) {
    const auto* c = find_condition(report_data.checks, id);
    v4.require(c != nullptr && c->passed, std::string("family ") + id + " failed");
  }
  const double B = std::sqrt(2.0) * (std::pow(2.0, 1.5) * 1.0 + 0.1);
  double worst_lower = INFINITY;
  double max_weak = 0.0;
  double max_padded = 0.0;
  for (const auto& row : report_data.rows) {
    const double lower = 0.9 * std::sqrt(static_cast<double>(row.N)) - 0.1;
    worst_lower = std::min(worst_lower, row.lp - lower);
    v4.require(row.lp >= lower - 1e-9, "lp lower bound at N=" + std::to_string(row.N));
    v4.require(row.weak <= B + 1e-9, "weak bound at N=" + std::to_string(row.N));
    v4.require(row.padded_weak <= std::pow(2.0, 1.5) + 1e-9, "padded weak bound at N=" + std::to_string(row.N));
    max_weak = std::max(max_weak, row.weak);
    max_padded = std::max(max_padded, row.padded_weak);
  }
  const double lp16 = report_data.rows.size() == 16 ? report_data.rows.back().lp : 0.0;
  v4.require(lp16 >= 3.5, "||z_16||_p = " + fmt("%.6f", lp16) + " < 3.5");
  v4.require(t < 60.0, "runtime " + fmt("%.2f", t) + " s >= 60 s");
  v4.require(rss < 1024L * 1024L, "peak RSS " + std::to_string(rss / 1024) + " MB >= 1 GB");
  v4.require(built.stored_entries <= kDefaultSupportBudget, "support budget exceeded");
  report(4, "main construction (canonical, p=2, delta=0.1, K=16)", v4,
         "||z_16||_p " + fmt("%.6f", lp16) + " >= 3.5, min lp slack " + fmt("%.3e", worst_lower) +
             ", max weak " + fmt("%.6f", max_weak) + " <= B " + fmt("%.6f", B) + ", max padded weak " +
             fmt("%.6f", max_padded) + " <= " + fmt("%.6f", std::pow(2.0, 1.5)) + ", " + fmt("%.2f", t) +
             " s, peak RSS " + std::to_string(rss / 1024) + " MB");

  if (report_data.rows.size() == 16) {
    const double r1 = report_data.rows.front().ratio;
    const double r16 = report_data.rows.back().ratio;
    v5.require(r16 <= 0.5 * r1, "ratio(16) " + fmt("%.6f", r16) + " > 0.5 ratio(1)");
    v5.require(report_data.trend_exponent >= 0.425 && report_data.trend_exponent <= 0.575,
               "trend exponent " + fmt("%.6f", report_data.trend_exponent) + " outside [0.425, 0.575]");
    report(5, "growth trend and ratio decay", v5,
           "ratio(1) " + fmt("%.6f", r1) + ", ratio(16) " + fmt("%.6f", r16) + ", trend exponent " +
               fmt("%.6f", report_data.trend_exponent));
  } else {
    v5.require(false, "fewer than 16 rows");
    report(5, "growth trend and ratio decay", v5, "");
  }
}

struct GridCell {
  std::string preset;
  std::vector<std::string> extra;
};

void criterion_grid(const fs::path& root) {
  Verdict v;
  const std::vector<GridCell> grid{{"canonical", {}},
                                   {"lacunary", {}},
                                   {"random_block", {"--seed", "0,1,2,3,4"}}};
  auto run_grid = [&](const fs::path& base) {
    for (const auto& g : grid) {
      std::vector<std::string> args{"run",     "--p",        "1.5,2,3",           "--delta", "0.1",
                                    "--stages", "10",        "--preset",          g.preset,  "--jobs",
                                    "4",       "--out-dir", (base / g.preset).string()};
      args.insert(args.end(), g.extra.begin(), g.extra.end());
      run_cli(args);
    }
  };
  fs::remove_all(root / "grid_a");
  fs::remove_all(root / "grid_b");
  auto start = Clock::now();
  run_grid(root / "grid_a");
  const double t = seconds_since(start);
  start = Clock::now();
  run_grid(root / "grid_b");
  const double t_rerun = seconds_since(start);

  std::size_t cells = 0;
  std::size_t passing = 0;
  std::size_t complete = 0;
  std::size_t identical = 0;
  std::vector<std::string> short_cells;
  for (const auto& entry : fs::recursive_directory_iterator(root / "grid_a")) {
    if (entry.path().filename() != "report.json") continue;
    ++cells;
    const auto cell_dir = entry.path().parent_path();
    const auto rel = fs::relative(cell_dir, root / "grid_a");
    const auto doc = Json::parse(slurp(entry.path()));
    const bool checks_pass = doc["passed"].get<bool>() && doc["run"]["builder_checklist_reproduced"].get<bool>();
    const auto achieved = doc["run"]["stages_completed"].get<std::size_t>();
    if (checks_pass) ++passing;
    if (achieved == 10) {
      ++complete;
    } else {
      short_cells.push_back(rel.generic_string() + " K=" + std::to_string(achieved) + " (" +
                            doc["run"]["truncation"].get<std::string>() + ")");
    }
    v.require(checks_pass, rel.generic_string() + " verifier checks failed");
    bool same = true;
    for (const char* f : {"stages.jsonl", "report.json", "norms.csv"}) {
      same = same && fs::exists(root / "grid_b" / rel / f) && slurp(cell_dir / f) == slurp(root / "grid_b" / rel / f);
    }
    if (same) ++identical;
    v.require(same, rel.generic_string() + " rerun differs");
  }
  std::sort(short_cells.begin(), short_cells.end());
  v.require(cells == 21, std::to_string(cells) + " of 21 cells produced a report");
  std::string truncated;
  for (const auto& s : short_cells) truncated += (truncated.empty() ? "" : ", ") + s;
  v.require(short_cells.empty(), "K=10 not reached in " + std::to_string(short_cells.size()) + " cells: " + truncated);
  v.require(t < 300.0, "runtime " + fmt("%.1f", t) + " s >= 300 s");
  report(6, "grid robustness (3 presets x p in {1.5,2,3}, K=10)", v,
         std::to_string(cells) + " cells, " + std::to_string(passing) + " with all verifier checks passing, " +
             std::to_string(complete) + " reached K=10, " + std::to_string(identical) + " byte-identical on rerun, " +
             fmt("%.1f", t) + " s (rerun " + fmt("%.1f", t_rerun) + " s)");
}

void criterion_negative_control(const fs::path& root) {
  Verdict v;
  const auto dir = root / "negative_control";
  fs::remove_all(dir);
  const int built = run_cli({"run", "--p", "2", "--delta", "0.1", "--stages", "8", "--preset", "canonical",
                             "--out-dir", dir.string()});
  v.require(built == cli::kExitOk, "baseline run exited " + std::to_string(built));
  {
    std::ifstream in(dir / "stages.jsonl");
    std::ofstream out(dir / "corrupted.jsonl");
    for (std::string line; std::getline(in, line);) {
      auto j = Json::parse(line);
      if (j["k"] == 3) {
        for (auto& e : j["v_k"]["entries"]) e[1] = 2.0 * e[1].get<double>();
      }
      out << j.dump() << "\n";
    }
  }
  std::string clean_out;
  const int clean = run_cli({"verify", "--p", "2", "--delta", "0.1", "--stages-file", (dir / "stages.jsonl").string()},
                            &clean_out);
  std::string text;
  const int code =
      run_cli({"verify", "--p", "2", "--delta", "0.1", "--stages-file", (dir / "corrupted.jsonl").string()}, &text);
  v.require(clean == cli::kExitOk, "uncorrupted stages exit " + std::to_string(clean));
  v.require(code != 0, "verifier exited 0 on corrupted stages");
  const bool flat_flagged = text.find("FAIL flatness") != std::string::npos;
  const bool mass_flagged = text.find("FAIL hump_mass") != std::string::npos;
  v.require(flat_flagged, "flatness not flagged");
  v.require(mass_flagged, "hump_mass not flagged");
  std::string flagged;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("FAIL ", 0) == 0) flagged += (flagged.empty() ? "" : ",") + line.substr(5, line.find(' ', 5) - 5);
  }
  report(7, "negative control (v_3 scaled by 2)", v,
         "clean exit " + std::to_string(clean) + ", corrupted exit " + std::to_string(code) + ", flagged " + flagged);
}

void criterion_flat_hump() {
  Verdict v;
  const Exponent p(2.0);
  const auto h = build_flat_hump(BasisProvider::make_preset(Preset::canonical, 0), 0, 0, 0.5, 0.25, p);
  v.require(h.m == 4, "m = " + std::to_string(h.m));
  v.require(h.u == SparseSeq({{1, 0.5}, {2, 0.5}, {3, 0.5}, {4, 0.5}}), "u differs from (e_1+e_2+e_3+e_4)/2");
  v.require(h.w.empty(), "w != 0");
  std::string s_list;
  for (std::size_t k = 1; k <= h.s_values.size(); ++k) {
    const double root = std::sqrt(static_cast<double>(k));
    v.require(std::abs(h.s_values[k - 1] - root) <= 1e-15 * root, "s_" + std::to_string(k) + " != sqrt(k)");
    v.require(h.s_values[k - 1] >= 0.75 * root, "s_" + std::to_string(k) + " < 0.75 sqrt(k)");
    s_list += (s_list.empty() ? "" : ",") + fmt("%.15g", h.s_values[k - 1]);
  }
  v.require(h.s_values.size() == 4, std::to_string(h.s_values.size()) + " inner vectors");
  report(8, "flat hump unit case", v, "m=" + std::to_string(h.m) + ", u=(1/2)(e_1+e_2+e_3+e_4), s=[" + s_list + "]");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "humpforge_acceptance";
  fs::create_directories(root);
  criterion_rearrangement();
  criterion_axioms();
  criterion_embedding();
  criteria_main_construction();
  criterion_grid(root);
  criterion_negative_control(root);
  criterion_flat_hump();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
