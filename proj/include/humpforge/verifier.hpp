#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "humpforge/humpbuilder.hpp"
#include "humpforge/json_io.hpp"
#include "humpforge/seqcore.hpp"

namespace humpforge {

/// Per-N quantities of the witness z_N = u_1 + ... + u_N.
struct NormRow {
  std::size_t N = 0;
  double lp = 0.0;           ///< ||z_N||_p
  double weak = 0.0;         ///< ||z_N||_{p,inf}
  double equiv = 0.0;        ///< maximal-function norm of z_N
  double lower_bound = 0.0;  ///< (1 - delta) N^{1/p} - delta
  double upper_bound = 0.0;  ///< B
  double ratio = 0.0;        ///< weak / lp
  double hump_lp = 0.0;      ///< ||v_1 + ... + v_N||_p
  double disjoint_lp = 0.0;  ///< (sum ||v_k||_p^p)^{1/p}
  double padded_weak = 0.0;  ///< ||z~_N||_{p,inf}
};

struct VerifyOptions {
  bool full_audit = false;  ///< audit every j instead of block endpoints + samples
  std::size_t interior_samples = 16;
};

/// B = 2^{1/p} (2^{1+1/p} max(1, D_p) + delta)
double weak_upper_bound(Exponent p, double delta);

/// Stage families plus "structure"; identical to the builder's checklist.
Checklist check_stage_conditions(std::span<const HumpStage> stages, Exponent p, double delta);

struct GrowthResult {
  std::vector<NormRow> rows;  ///< lp, lower_bound, hump_lp, disjoint_lp filled
  Checklist checks;
};
/// ||z_N||_p >= ||sum v||_p - delta >= (1 - delta) N^{1/p} - delta for every N.
GrowthResult check_growth(std::span<const HumpStage> stages, Exponent p, double delta);

struct WeakBoundResult {
  std::vector<NormRow> rows;  ///< weak, equiv, padded_weak, upper_bound, ratio filled
  double bound = 0.0;         ///< B
  std::size_t audited_points = 0;
  Checklist checks;
};
/// Padded-majorant bounds: the two cases for j^{1/p} z~*(j), the assembly
/// step and the final constant B, plus the majorant's block structure.
WeakBoundResult check_weak_bound(std::span<const HumpStage> stages, Exponent p, double delta,
                                 const VerifyOptions& options = {});

struct WitnessReport {
  double p = 0.0;
  double delta = 0.0;
  std::size_t stages = 0;
  double embedding_constant = 1.0;
  double bound = 0.0;
  double trend_exponent = 0.0;  ///< least-squares slope of log ||z_N||_p against log N
  std::size_t audited_points = 0;
  std::vector<NormRow> rows;
  Checklist checks;

  [[nodiscard]] bool passed() const { return all_passed(checks); }
};

WitnessReport verify_stages(std::span<const HumpStage> stages, Exponent p, double delta,
                            const VerifyOptions& options = {});

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

Json report_to_json(const WitnessReport& report);
/// N,lp_norm,weak_quasinorm,equiv_norm,lower_bound,B,ratio
void write_norms_csv(std::ostream& out, const WitnessReport& report);

struct AxiomReport {
  Checklist checks;
  double max_quasi_triangle_ratio = 0.0;  ///< max ||u+v||_{p,inf} / (||u||_{p,inf} + ||v||_{p,inf})
  double min_equiv_ratio = 0.0;           ///< min equiv / weak
  double max_equiv_ratio = 0.0;           ///< max equiv / weak
  std::vector<std::string> witnesses;     ///< descriptions of failing samples

  [[nodiscard]] bool passed() const { return all_passed(checks); }
};

/// Norm-axiom battery on seeded random vectors (support <= 50, values in
/// [-10, 10]) for ||.||_p and the maximal-function norm, plus the
/// quasi-triangle, sandwich, embedding and rearrangement properties.
AxiomReport axiom_suite(Exponent p, std::size_t sample_count, std::uint64_t seed);

/// Random sparse vector used by the axiom battery.
SparseSeq random_sparse(std::uint64_t seed, std::size_t max_support = 50, double magnitude = 10.0);

}  // namespace humpforge
