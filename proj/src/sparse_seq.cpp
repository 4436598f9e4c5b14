#include "humpforge/sparse_seq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace humpforge {

namespace {

void validate(const std::vector<Entry>& entries) {
  Index prev = 0;
  for (const auto& e : entries) {
    if (e.index <= prev) {
      throw std::invalid_argument("SparseSeq: indices must be positive and strictly increasing (at " +
                                  std::to_string(e.index) + ")");
    }
    if (e.value == 0.0 || !std::isfinite(e.value)) {
      throw std::invalid_argument("SparseSeq: stored values must be finite and nonzero (index " +
                                  std::to_string(e.index) + ")");
    }
    prev = e.index;
  }
}

template <typename Combine>
std::vector<Entry> merge(std::span<const Entry> a, std::span<const Entry> b, Combine combine) {
  std::vector<Entry> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      out.push_back({a[i].index, combine(a[i].value, 0.0)});
      ++i;
    } else if (i == a.size() || b[j].index < a[i].index) {
      out.push_back({b[j].index, combine(0.0, b[j].value)});
      ++j;
    } else {
      const double v = combine(a[i].value, b[j].value);
      if (v != 0.0) out.push_back({a[i].index, v});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

SparseSeq::SparseSeq(std::vector<Entry> entries) : entries_(std::move(entries)) { validate(entries_); }

SparseSeq::SparseSeq(std::initializer_list<Entry> entries) : entries_(entries) { validate(entries_); }

SparseSeq SparseSeq::from_unsorted(std::vector<Entry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.index <= 0) throw std::invalid_argument("SparseSeq: index must be positive");
    if (!std::isfinite(e.value)) throw std::invalid_argument("SparseSeq: value must be finite");
    if (!out.empty() && out.back().index == e.index) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const Entry& e) { return e.value == 0.0; });
  return SparseSeq(Trusted{}, std::move(out));
}

SparseSeq SparseSeq::unit(Index i, double value) { return SparseSeq({Entry{i, value}}); }

double SparseSeq::at(Index i) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                             [](const Entry& e, Index idx) { return e.index < idx; });
  return (it != entries_.end() && it->index == i) ? it->value : 0.0;
}

Index SparseSeq::min_index() const noexcept { return entries_.empty() ? 0 : entries_.front().index; }

Index SparseSeq::max_index() const noexcept { return entries_.empty() ? 0 : entries_.back().index; }

double SparseSeq::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
  return m;
}

SparseSeq SparseSeq::abs() const {
  std::vector<Entry> out(entries_);
  for (auto& e : out) e.value = std::abs(e.value);
  return SparseSeq(Trusted{}, std::move(out));
}

SparseSeq SparseSeq::scaled(double alpha) const {
  if (!std::isfinite(alpha)) throw std::invalid_argument("SparseSeq: scale factor must be finite");
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double v = alpha * e.value;
    if (v != 0.0) out.push_back({e.index, v});
  }
  return SparseSeq(Trusted{}, std::move(out));
}

SparseSeq operator+(const SparseSeq& a, const SparseSeq& b) {
  return SparseSeq(SparseSeq::Trusted{}, merge(a.entries_, b.entries_, [](double x, double y) { return x + y; }));
}

SparseSeq operator-(const SparseSeq& a, const SparseSeq& b) {
  return SparseSeq(SparseSeq::Trusted{}, merge(a.entries_, b.entries_, [](double x, double y) { return x - y; }));
}

SparseSeq concat_or_merge(std::span<const SparseSeq> parts) {
  bool ordered = true;
  std::size_t total = 0;
  Index last = 0;
  for (const auto& part : parts) {
    if (part.empty()) continue;
    if (part.min_index() <= last) ordered = false;
    last = std::max(last, part.max_index());
    total += part.size();
  }
  if (!ordered) {
    SparseSeq acc;
    for (const auto& part : parts) acc = acc + part;
    return acc;
  }
  std::vector<Entry> out;
  out.reserve(total);
  for (const auto& part : parts) out.insert(out.end(), part.entries().begin(), part.entries().end());
  return SparseSeq(std::move(out));
}

}  // namespace humpforge
