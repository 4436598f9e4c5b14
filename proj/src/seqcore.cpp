#include "humpforge/seqcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace humpforge {

Exponent::Exponent(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("exponent p must satisfy 1 < p < infinity");
  }
}

std::size_t dist_func(const SparseSeq& u, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dist_func: lambda must be positive");
  std::size_t count = 0;
  for (const auto& e : u.entries()) {
    if (std::abs(e.value) > lambda) ++count;
  }
  return count;
}

RearrangedProfile decreasing_rearrangement(const SparseSeq& u) {
  RearrangedProfile out;
  out.values.reserve(u.size());
  for (const auto& e : u.entries()) out.values.push_back(std::abs(e.value));
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

SparseSeq rearrangement_on_support(const SparseSeq& u) {
  const auto profile = decreasing_rearrangement(u);
  std::vector<Entry> out;
  out.reserve(u.size());
  std::size_t j = 0;
  for (const auto& e : u.entries()) out.push_back({e.index, profile.values[j++]});
  return SparseSeq(std::move(out));
}

double lp_norm(const RearrangedProfile& profile, Exponent p) {
  if (profile.values.empty()) return 0.0;
  const double top = profile.values.front();
  // Ascending accumulation of the scaled p-th powers; the result only
  // depends on the multiset of moduli.
  double sum = 0.0;
  for (auto it = profile.values.rbegin(); it != profile.values.rend(); ++it) {
    sum += std::pow(*it / top, p.value());
  }
  return top * std::pow(sum, p.inverse());
}

double weak_lp_quasinorm(const RearrangedProfile& profile, Exponent p) {
  double best = 0.0;
  for (std::size_t j = 1; j <= profile.size(); ++j) {
    best = std::max(best, std::pow(static_cast<double>(j), p.inverse()) * profile.values[j - 1]);
  }
  return best;
}

double weak_lp_norm_equiv(const RearrangedProfile& profile, Exponent p) {
  double best = 0.0;
  double partial = 0.0;
  const double exponent = p.inverse() - 1.0;
  for (std::size_t n = 1; n <= profile.size(); ++n) {
    partial += profile.values[n - 1];
    best = std::max(best, std::pow(static_cast<double>(n), exponent) * partial);
  }
  return best;
}

double lp_norm(const SparseSeq& u, Exponent p) { return lp_norm(decreasing_rearrangement(u), p); }

double weak_lp_quasinorm(const SparseSeq& u, Exponent p) {
  return weak_lp_quasinorm(decreasing_rearrangement(u), p);
}

double weak_lp_norm_equiv(const SparseSeq& u, Exponent p) {
  return weak_lp_norm_equiv(decreasing_rearrangement(u), p);
}

SparseSeq head(const SparseSeq& u, Index m) {
  if (m < 0) throw std::invalid_argument("head: m must be nonnegative");
  const auto e = u.entries();
  auto split = std::upper_bound(e.begin(), e.end(), m, [](Index idx, const Entry& x) { return idx < x.index; });
  return SparseSeq(std::vector<Entry>(e.begin(), split));
}

SparseSeq tail(const SparseSeq& u, Index m) {
  if (m < 0) throw std::invalid_argument("tail: m must be nonnegative");
  const auto e = u.entries();
  auto split = std::upper_bound(e.begin(), e.end(), m, [](Index idx, const Entry& x) { return idx < x.index; });
  return SparseSeq(std::vector<Entry>(split, e.end()));
}

double embedding_constant(Exponent /*p*/) { return 1.0; }

}  // namespace humpforge
