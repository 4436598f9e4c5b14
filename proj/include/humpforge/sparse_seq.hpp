#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace humpforge {

/// 1-based coordinate index.
using Index = std::int64_t;

struct Entry {
  Index index;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Finitely supported real sequence stored as (index, value) pairs.
///
/// Indices are strictly increasing and positive and no stored value is zero,
/// so the stored indices are exactly the support. Every constructor enforces
/// this; the raw-entry constructor throws std::invalid_argument otherwise.
class SparseSeq {
public:
  SparseSeq() = default;
  explicit SparseSeq(std::vector<Entry> entries);
  SparseSeq(std::initializer_list<Entry> entries);

  /// Builds from unordered pairs: duplicate indices are summed and zeros dropped.
  static SparseSeq from_unsorted(std::vector<Entry> entries);
  /// e_i
  static SparseSeq unit(Index i, double value = 1.0);

  [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  /// Value at index i (0 outside the support).
  [[nodiscard]] double at(Index i) const noexcept;
  /// Smallest / largest support index; 0 for the zero sequence.
  [[nodiscard]] Index min_index() const noexcept;
  [[nodiscard]] Index max_index() const noexcept;
  [[nodiscard]] double max_abs() const noexcept;

  /// Modulus sequence |u|.
  [[nodiscard]] SparseSeq abs() const;
  [[nodiscard]] SparseSeq scaled(double alpha) const;

  friend SparseSeq operator+(const SparseSeq& a, const SparseSeq& b);
  friend SparseSeq operator-(const SparseSeq& a, const SparseSeq& b);
  friend bool operator==(const SparseSeq&, const SparseSeq&) = default;

private:
  struct Trusted {};
  SparseSeq(Trusted, std::vector<Entry> entries) noexcept : entries_(std::move(entries)) {}

  std::vector<Entry> entries_;
};

/// Sum of sequences whose supports are pairwise disjoint and listed in
/// increasing index order; falls back to a general merge otherwise.
SparseSeq concat_or_merge(std::span<const SparseSeq> parts);

}  // namespace humpforge
