#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "humpforge/seqcore.hpp"
#include "humpforge/sparse_seq.hpp"
#include "humpforge/subspace.hpp"

namespace humpforge {

inline constexpr std::size_t kDefaultSupportBudget = 4'000'000;
inline constexpr double kCheckTol = 1e-9;

struct RunParams {
  Exponent p{2.0};
  double delta = 0.1;
  std::size_t stages = 8;
  std::size_t support_budget = kDefaultSupportBudget;
  double null_tol = kDefaultNullTol;

  /// Throws std::invalid_argument on 0 < delta < 1, stages >= 1,
  /// support_budget >= 1 or null_tol > 0 being violated.
  void validate() const;
};

/// Record of one flat-hump construction: the inner unit vectors u_i, their
/// cuts n_i, the partial-sum norms s_i = ||u_1 + ... + u_i||_p and the
/// resulting normalized hump u = v + w split at m.
struct FlatHumpTrace {
  Index n = 0;
  Index n_floor = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::vector<SparseSeq> inner_vectors;
  std::vector<Index> inner_cuts;
  std::vector<double> s_values;
  SparseSeq u;
  SparseSeq v;
  SparseSeq w;
  Index m = 0;
  std::size_t stored_entries = 0;
};

class BudgetExhausted : public std::runtime_error {
public:
  BudgetExhausted(const std::string& what, FlatHumpTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  [[nodiscard]] const FlatHumpTrace& partial() const noexcept { return partial_; }

private:
  FlatHumpTrace partial_;
};

/// Flat hump in X_n: returns u with ||u||_p = 1, m > 2n, m >= n_floor,
/// supp P_m u inside {n+1..m}, |P_m u| <= eps, 1 - delta <= ||P_m u||_p <= 1
/// and ||R_m u||_p <= delta. Pass eps = infinity for no flatness constraint.
///
/// Each inner vector is cut where its tail drops below delta / 2^i. The
/// loop stops at the first inner count i whose cut n_i satisfies
/// n_i > 2n, n_i >= n_floor and 1 / s_i <= eps; then m = n_i.
///
/// `budget` bounds the total number of stored entries across the inner
/// vectors; exceeding it throws BudgetExhausted with the partial trace.
/// NoTailVector from the basis propagates unchanged.
FlatHumpTrace build_flat_hump(const BasisProvider& basis, Index n, Index n_floor, double eps, double delta,
                              Exponent p, std::size_t budget = kDefaultSupportBudget,
                              double null_tol = kDefaultNullTol);

/// Stage k of the witness construction. The block is I_k = {n_prev+1..n_k},
/// A_k = I_k minus supp v_k.
struct HumpStage {
  std::size_t k = 0;
  Index n_prev = 0;
  Index n_k = 0;
  SparseSeq u;
  SparseSeq v;
  SparseSeq w;
  double b = 0.0;    ///< min |v_k(j)| over supp v_k
  double eps = 0.0;  ///< min{b_k, (n_k - n_prev)^{-1/p}}, the flatness used for stage k+1
  std::size_t inner_count = 0;

  [[nodiscard]] Index block_length() const noexcept { return n_k - n_prev; }
  /// #A_k
  [[nodiscard]] Index zero_count() const noexcept { return block_length() - static_cast<Index>(v.size()); }
};

enum class ScaleClass { invariant, homogeneous, inhomogeneous, mixed };
std::string to_string(ScaleClass c);

/// Outcome of one inequality family over all stages (or rows).
struct ConditionResult {
  std::string id;
  std::string description;
  ScaleClass scale_class = ScaleClass::mixed;
  bool evaluated = false;  ///< false means vacuous (nothing to check)
  bool passed = true;
  std::size_t checks = 0;
  std::size_t violations = 0;
  /// Smallest slack (rhs - lhs); negative when violated. Infinity if vacuous.
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t worst_at = 0;  ///< stage or row index realizing worst_margin

  friend bool operator==(const ConditionResult&, const ConditionResult&) = default;
};

using Checklist = std::vector<ConditionResult>;

[[nodiscard]] bool all_passed(const Checklist& list);
[[nodiscard]] const ConditionResult* find_condition(const Checklist& list, const std::string& id);

/// Evaluates the seven stage families (unit_norm, block_doubling, support,
/// flatness, block_height, hump_mass, tail_mass) plus "structure" (block
/// chaining and b_k bookkeeping) at tolerance kCheckTol. Quantities
/// such as b_k and A_k are recomputed from the stored vectors.
Checklist evaluate_stage_conditions(std::span<const HumpStage> stages, Exponent p, double delta);

enum class Truncation { none, support_budget, basis_exhausted };
std::string to_string(Truncation t);

struct BuildResult {
  std::vector<HumpStage> stages;
  Truncation truncation = Truncation::none;
  std::string truncation_detail;
  std::size_t stored_entries = 0;
  /// Checklist evaluated right after construction.
  Checklist checklist;
};

/// Builds stages 1..K. Stage 1 is a flat hump in X with no flatness bound
/// and delta share delta/2; stage k+1 is a flat hump in X_{n_k} with
/// eps = min{b_k, (n_k - n_{k-1})^{-1/p}}, delta share delta / 2^{k+1} and
/// n_floor = n_k + ceil(b_k^{-p}).
///
/// Running out of budget or basis vectors ends the run early with the
/// completed prefix and a truncation flag. Every stage is checked as soon as
/// it is built; a violation throws ConstructionError, an empty hump throws
/// DegenerateStage.
BuildResult build_witness_stages(const BasisProvider& basis, const RunParams& params);

/// |v_k| on supp v_k and (n_k - n_prev)^{-1/p} on A_k; support exactly I_k.
SparseSeq padded_majorant(const HumpStage& stage, Exponent p);

/// z_N = u_1 + ... + u_N
SparseSeq witness_sum(std::span<const HumpStage> stages, std::size_t N);
/// v_1 + ... + v_N
SparseSeq hump_sum(std::span<const HumpStage> stages, std::size_t N);
/// Padded majorant sum over stages 1..N; support exactly {1..n_N}.
SparseSeq padded_sum(std::span<const HumpStage> stages, std::size_t N, Exponent p);

}  // namespace humpforge
