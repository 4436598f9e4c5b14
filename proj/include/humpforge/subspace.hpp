#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "humpforge/seqcore.hpp"
#include "humpforge/sparse_seq.hpp"

namespace humpforge {

enum class Preset { canonical, lacunary, random_block, from_file };

Preset parse_preset(const std::string& name);
std::string to_string(Preset preset);

/// Support bounds and Euclidean norm of one basis vector.
struct ColumnInfo {
  Index lo;
  Index hi;
  double norm2;
};

/// Deterministic stream g_1, g_2, ... of finitely supported vectors spanning
/// a subspace X of l_p.
///
/// The provider is immutable from the caller's point of view. Column
/// metadata is materialized lazily into shared snapshots behind a mutex, so
/// one provider may be used from several threads.
class BasisProvider {
public:
  /// Column metadata for a prefix g_1..g_L. Entry t describes g_{t+1}.
  struct Snapshot {
    std::vector<ColumnInfo> columns;
    std::vector<double> prefix_max_norm;
    std::vector<double> prefix_min_norm;
    std::vector<std::size_t> prefix_argmin;  ///< 1-based basis index of prefix_min_norm
    bool exhausted = false;                  ///< the stream ends at columns.size()
  };

  /// `p` is only used to l_p-normalize the random_block vectors.
  static BasisProvider make_preset(Preset preset, std::uint64_t seed,
                                   const std::optional<std::filesystem::path>& source = std::nullopt,
                                   Exponent p = Exponent(2.0));
  /// In-memory basis; used for file input and tests. Throws InputFormatError
  /// if the list is empty or contains the zero vector.
  static BasisProvider from_vectors(std::vector<SparseSeq> vectors, std::string name = "vectors");

  /// g_i for i >= 1, or nullopt past the end of a finite stream.
  [[nodiscard]] std::optional<SparseSeq> vector(std::size_t i) const;
  /// Finite stream length, if any.
  [[nodiscard]] std::optional<std::size_t> length() const;

  /// Metadata for at least `min_columns` leading vectors (fewer only when
  /// the stream ends first).
  [[nodiscard]] std::shared_ptr<const Snapshot> columns(std::size_t min_columns) const;

  [[nodiscard]] Preset preset() const noexcept { return preset_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  /// Presets and files promise linear independence of every finite prefix.
  [[nodiscard]] bool declared_independent() const noexcept { return declared_independent_; }
  /// max supp g_i < min supp g_{i+1} for every i.
  [[nodiscard]] bool ordered_disjoint() const noexcept { return ordered_disjoint_; }

private:
  struct Shared {
    std::mutex mutex;
    std::shared_ptr<const Snapshot> snapshot = std::make_shared<Snapshot>();
  };

  BasisProvider() = default;

  Preset preset_ = Preset::canonical;
  std::string name_;
  std::uint64_t seed_ = 0;
  double p_ = 2.0;
  bool declared_independent_ = true;
  bool ordered_disjoint_ = true;
  std::shared_ptr<const std::vector<SparseSeq>> stored_;
  std::shared_ptr<Shared> shared_ = std::make_shared<Shared>();
};

/// Unit vector of X_n = {a in X : a(1) = ... = a(n) = 0} together with the
/// combination of basis vectors that produced it.
struct TailVector {
  SparseSeq vector;
  /// (basis index i, coefficient c_i); vector == sum c_i g_i up to the
  /// truncated head entries.
  std::vector<std::pair<std::size_t, double>> coefficients;
  std::size_t prefix_length = 0;  ///< M
  double sigma_ratio = 0.0;       ///< smallest / largest singular value of the head matrix
};

inline constexpr double kDefaultNullTol = 1e-10;

/// Finds the smallest prefix g_1..g_M whose restriction to coordinates
/// 1..n has a (numerical) null direction, and returns that combination
/// normalized in l_p with its first nonzero coordinate positive.
///
/// Throws NoTailVector when the scan reaches the end of the stream or the
/// prefix cap n + 64 without finding one, or when the combination collapses
/// to zero (a dependent basis).
TailVector tail_unit_vector(const BasisProvider& basis, Index n, Exponent p, double tol = kDefaultNullTol);

/// Dense SVD route, usable on any basis; tail_unit_vector dispatches here
/// unless the basis has ordered disjoint supports.
TailVector tail_unit_vector_dense(const BasisProvider& basis, Index n, Exponent p, double tol = kDefaultNullTol);

/// Smallest m >= 0 with ||R_m u||_p <= eta.
Index choose_cut(const SparseSeq& u, Exponent p, double eta);

/// Sum c_i g_i for the stored coefficients of `t`.
SparseSeq reconstruct(const BasisProvider& basis, const TailVector& t);

}  // namespace humpforge
