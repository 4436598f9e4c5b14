#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "humpforge/errors.hpp"
#include "humpforge/humpbuilder.hpp"
#include "humpforge/json_io.hpp"
#include "humpforge/stage_io.hpp"
#include "humpforge/subspace.hpp"
#include "humpforge/verifier.hpp"

namespace humpforge::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::vector<double> p_values{2.0};
  double delta = 0.1;
  std::size_t stages = 8;
  std::string preset = "canonical";
  std::vector<std::uint64_t> seeds{0};
  std::string basis_file;
  std::size_t support_budget = kDefaultSupportBudget;
  std::string out_dir = "humpforge_out";
  std::vector<std::string> formats{"json", "csv"};
  unsigned jobs = 1;
  bool full_audit = false;
};

struct CellOutcome {
  int status = kExitOk;
  std::string log;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string p_label(double p) {
  std::string s = fmt("%g", p);
  std::replace(s.begin(), s.end(), '.', '_');
  return s;
}

bool wants(const RunConfig& c, const std::string& format) {
  return std::find(c.formats.begin(), c.formats.end(), format) != c.formats.end();
}

CellOutcome run_cell(const RunConfig& config, double p_value, std::uint64_t seed, const fs::path& dir) {
  CellOutcome outcome;
  std::ostringstream log;
  const Exponent p(p_value);
  const Preset preset = parse_preset(config.preset);
  std::optional<fs::path> source;
  if (!config.basis_file.empty()) source = config.basis_file;

  RunParams params;
  params.p = p;
  params.delta = config.delta;
  params.stages = config.stages;
  params.support_budget = config.support_budget;

  log << "run: preset=" << config.preset << " seed=" << seed << " p=" << fmt("%g", p_value)
      << " delta=" << fmt("%g", config.delta) << " stages=" << config.stages << "\n";
  try {
    const auto basis = BasisProvider::make_preset(preset, seed, source, p);
    const BuildResult built = build_witness_stages(basis, params);
    VerifyOptions options;
    options.full_audit = config.full_audit;
    const WitnessReport report = verify_stages(built.stages, p, config.delta, options);

    // Re-verification must reproduce the builder's own verdicts.
    const Checklist rechecked = check_stage_conditions(built.stages, p, config.delta);
    bool consistent = rechecked.size() == built.checklist.size();
    for (std::size_t i = 0; consistent && i < rechecked.size(); ++i) {
      consistent = rechecked[i].passed == built.checklist[i].passed;
    }

    fs::create_directories(dir);
    {
      std::ofstream out(dir / "stages.jsonl");
      write_stages_jsonl(out, built.stages);
    }
    if (wants(config, "json")) {
      Json doc;
      doc["run"] = {{"preset", config.preset},
                    {"seed", seed},
                    {"basis_file", config.basis_file},
                    {"stages_requested", config.stages},
                    {"stages_completed", built.stages.size()},
                    {"truncation", to_string(built.truncation)},
                    {"truncation_detail", built.truncation_detail},
                    {"support_budget", config.support_budget},
                    {"stored_entries", built.stored_entries},
                    {"full_audit", config.full_audit},
                    {"builder_checklist_reproduced", consistent}};
      const Json body = report_to_json(report);
      for (const auto& [key, value] : body.items()) doc[key] = value;
      std::ofstream out(dir / "report.json");
      out << doc.dump(2) << "\n";
    }
    if (wants(config, "csv")) {
      std::ofstream out(dir / "norms.csv");
      write_norms_csv(out, report);
    }

    double ceiling = 0.0;
    for (const auto& row : report.rows) ceiling = std::max(ceiling, row.weak);
    std::size_t passed = 0;
    for (const auto& c : report.checks) passed += c.passed ? 1 : 0;

    log << "  stages completed: " << built.stages.size() << "/" << config.stages
        << " (max N = " << built.stages.size() << ", stored entries " << built.stored_entries << ")\n";
    if (built.truncation != Truncation::none) {
      log << "  truncated (" << to_string(built.truncation) << "): " << built.truncation_detail << "\n";
    }
    if (!built.stages.empty()) {
      log << "  n_K = " << built.stages.back().n_k << ", ||z_K||_p = " << fmt("%.6g", report.rows.back().lp)
          << ", ||z_K||_{p,inf} = " << fmt("%.6g", report.rows.back().weak) << "\n";
    }
    log << "  trend exponent of ||z_N||_p: " << fmt("%.4f", report.trend_exponent)
        << " (1/p = " << fmt("%.4f", p.inverse()) << ")\n";
    log << "  weak ceiling: max_N ||z_N||_{p,inf} = " << fmt("%.6g", ceiling) << " vs B = "
        << fmt("%.6g", report.bound) << "\n";
    log << "  checks: " << passed << "/" << report.checks.size() << " families passed\n";
    for (const auto& c : report.checks) {
      if (!c.passed) {
        log << "    FAIL " << c.id << " (" << c.description << "): " << c.violations << " violations, worst margin "
            << fmt("%.3e", c.worst_margin) << " at " << c.worst_at << "\n";
      }
    }
    if (!consistent) log << "  builder and verifier disagree on stage conditions\n";

    if (!report.passed() || !consistent) {
      outcome.status = kExitCheckFailed;
    } else if (built.truncation != Truncation::none || built.stages.size() < config.stages) {
      outcome.status = kExitTruncated;
    }
  } catch (const InputFormatError& e) {
    log << "  input error: " << e.what() << "\n";
    outcome.status = kExitInput;
  } catch (const std::exception& e) {
    log << "  construction failed: " << e.what() << "\n";
    outcome.status = kExitCheckFailed;
  }
  log << "  status: "
      << (outcome.status == kExitOk ? "pass" : outcome.status == kExitTruncated ? "truncated" : "fail") << "\n";
  outcome.log = log.str();
  return outcome;
}

int combine(int a, int b) {
  auto rank = [](int s) {
    switch (s) {
      case kExitOk: return 0;
      case kExitTruncated: return 1;
      case kExitCheckFailed: return 2;
      default: return 3;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

int do_run(RunConfig config, bool seed_given, std::ostream& out, std::ostream& err) {
  if (!seed_given) {
    if (const char* env = std::getenv("HUMPFORGE_SEED")) {
      try {
        std::size_t used = 0;
        config.seeds = {std::stoull(env, &used)};
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        err << "error: HUMPFORGE_SEED must be a nonnegative integer\n";
        return kExitUsage;
      }
    }
  }
  try {
    for (double p : config.p_values) Exponent{p};
    RunParams probe;
    probe.delta = config.delta;
    probe.stages = config.stages;
    probe.support_budget = config.support_budget;
    probe.validate();
    if (parse_preset(config.preset) == Preset::from_file && config.basis_file.empty()) {
      throw std::invalid_argument("--preset from_file requires --basis-file");
    }
    for (const auto& f : config.formats) {
      if (f != "json" && f != "csv") throw std::invalid_argument("unknown format '" + f + "'");
    }
    if (config.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!config.basis_file.empty() && !std::ifstream(config.basis_file)) {
    err << "error: cannot read basis file " << config.basis_file << "\n";
    return kExitInput;
  }

  struct Cell {
    double p;
    std::uint64_t seed;
    fs::path dir;
  };
  std::vector<Cell> cells;
  const bool grid = config.p_values.size() * config.seeds.size() > 1;
  for (double p : config.p_values) {
    for (auto seed : config.seeds) {
      fs::path dir = config.out_dir;
      if (grid) dir /= "p" + p_label(p) + "_seed" + std::to_string(seed);
      cells.push_back({p, seed, dir});
    }
  }
  try {
    fs::create_directories(config.out_dir);
  } catch (const fs::filesystem_error& e) {
    err << "error: cannot create output directory: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      outcomes[i] = run_cell(config, cells[i].p, cells[i].seed, cells[i].dir);
    }
  };
  const unsigned threads = std::min<unsigned>(config.jobs, static_cast<unsigned>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  int status = kExitOk;
  for (const auto& o : outcomes) {
    out << o.log;
    status = combine(status, o.status);
  }
  return status;
}

int do_norms(double p_value, const std::string& file, std::ostream& out, std::ostream& err) {
  try {
    const Exponent p(p_value);
    const SparseSeq u = sparse_seq_from_json(read_json_file(file));
    char line[128];
    std::snprintf(line, sizeof line, "%.12g, %.12g, %.12g\n", lp_norm(u, p), weak_lp_quasinorm(u, p),
                  weak_lp_norm_equiv(u, p));
    out << line;
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int do_verify(double p_value, double delta, const std::string& file, bool full_audit, const std::string& report_path,
              std::ostream& out, std::ostream& err) {
  try {
    const Exponent p(p_value);
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must satisfy 0 < delta < 1");
    const auto stages = read_stages_file(file, p);
    VerifyOptions options;
    options.full_audit = full_audit;
    const auto report = verify_stages(stages, p, delta, options);
    if (!report_path.empty()) {
      std::ofstream f(report_path);
      f << report_to_json(report).dump(2) << "\n";
    }
    for (const auto& c : report.checks) {
      out << (c.passed ? "pass " : "FAIL ") << c.id;
      if (!c.evaluated) out << " (vacuous)";
      if (!c.passed) out << " violations=" << c.violations << " worst_margin=" << fmt("%.3e", c.worst_margin);
      out << "\n";
    }
    out << (report.passed() ? "verdict: pass" : "verdict: fail") << " (" << stages.size() << " stages)\n";
    return report.passed() ? kExitOk : kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int do_axioms(double p_value, std::size_t samples, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  try {
    const auto report = axiom_suite(Exponent(p_value), samples, seed);
    for (const auto& c : report.checks) out << (c.passed ? "pass " : "FAIL ") << c.id << "\n";
    out << "max quasi-triangle ratio " << fmt("%.6f", report.max_quasi_triangle_ratio) << " (limit "
        << fmt("%.6f", std::pow(2.0, 1.0 / p_value)) << ")\n";
    out << "equiv/weak ratio in [" << fmt("%.6f", report.min_equiv_ratio) << ", "
        << fmt("%.6f", report.max_equiv_ratio) << "]\n";
    for (const auto& w : report.witnesses) out << "  witness: " << w << "\n";
    return report.passed() ? kExitOk : kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"humpforge: gliding-hump witnesses for the embedding l_p -> l_{p,inf}"};
  app.require_subcommand(1);

  RunConfig config;
  auto* run = app.add_subcommand("run", "build witness stages, verify them and write reports");
  run->add_option("--p", config.p_values, "exponent(s) p > 1; comma-separated for a grid")->delimiter(',');
  run->add_option("--delta", config.delta, "0 < delta < 1");
  run->add_option("--stages", config.stages, "stage count K");
  run->add_option("--preset", config.preset, "canonical | lacunary | random_block | from_file");
  auto* seed_opt =
      run->add_option("--seed", config.seeds, "seed(s); comma-separated for a grid (env HUMPFORGE_SEED)")
          ->delimiter(',');
  run->add_option("--basis-file", config.basis_file, "basis JSON for --preset from_file");
  run->add_option("--support-budget", config.support_budget, "maximum stored entries");
  run->add_option("--out-dir", config.out_dir, "output directory");
  run->add_option("--format", config.formats, "json,csv")->delimiter(',');
  run->add_option("--jobs", config.jobs, "worker threads for grid cells");
  run->add_flag("--full-audit", config.full_audit, "audit every coordinate of the majorant");

  double norms_p = 2.0;
  std::string norms_file;
  auto* norms = app.add_subcommand("norms", "print l_p norm, weak quasinorm and maximal norm of a sequence");
  norms->add_option("--p", norms_p, "exponent p > 1");
  norms->add_option("file", norms_file, "sequence JSON {\"entries\": [[index, value], ...]}")->required();

  double verify_p = 2.0;
  double verify_delta = 0.1;
  std::string verify_file;
  std::string verify_report;
  bool verify_full = false;
  auto* verify = app.add_subcommand("verify", "re-verify an exported stages.jsonl");
  verify->add_option("--p", verify_p, "exponent used to build the stages");
  verify->add_option("--delta", verify_delta, "delta used to build the stages");
  verify->add_option("--stages-file", verify_file, "stages.jsonl")->required();
  verify->add_option("--report", verify_report, "write the JSON report here");
  verify->add_flag("--full-audit", verify_full, "audit every coordinate of the majorant");

  double axioms_p = 2.0;
  std::size_t axioms_samples = 1000;
  std::uint64_t axioms_seed = 0;
  auto* axioms = app.add_subcommand("axioms", "run the norm-axiom battery on random vectors");
  axioms->add_option("--p", axioms_p, "exponent p > 1");
  axioms->add_option("--samples", axioms_samples, "sample count");
  axioms->add_option("--seed", axioms_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (*run) return do_run(config, seed_opt->count() > 0, out, err);
  if (*norms) return do_norms(norms_p, norms_file, out, err);
  if (*verify) return do_verify(verify_p, verify_delta, verify_file, verify_full, verify_report, out, err);
  if (*axioms) return do_axioms(axioms_p, axioms_samples, axioms_seed, out, err);
  return kExitUsage;
}

}  // namespace humpforge::cli
