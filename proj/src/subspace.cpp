#include "humpforge/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "humpforge/errors.hpp"
#include "humpforge/json_io.hpp"
#include "humpforge/rng.hpp"

namespace humpforge {

namespace {

constexpr std::size_t kLacunaryLength = 62;  // 2^62 is the last power of two below INT64_MAX
constexpr std::size_t kPrefixSlack = 64;
constexpr double kZeroTruncation = 1e-14;

Index saturating_add(Index a, Index b) {
  return a > std::numeric_limits<Index>::max() - b ? std::numeric_limits<Index>::max() : a + b;
}

// Block boundary B(i) = 2i - o_i with o_0 = 0 and o_i in {0, 1}; blocks
// therefore have length 1..3.
Index block_end(std::uint64_t seed, std::size_t i) {
  if (i == 0) return 0;
  const auto offset = static_cast<Index>(hash_combine(seed, i) & 1ULL);
  return 2 * static_cast<Index>(i) - offset;
}

SparseSeq random_block_vector(std::uint64_t seed, std::size_t i, double p) {
  const Index first = block_end(seed, i - 1) + 1;
  const Index last = block_end(seed, i);
  std::vector<Entry> entries;
  double psum = 0.0;
  for (Index j = first; j <= last; ++j) {
    const std::uint64_t h = hash_combine(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(j));
    const double magnitude = 0.9 + 0.2 * to_unit_interval(h >> 1);
    const double sign = (h & 1ULL) ? -1.0 : 1.0;
    entries.push_back({j, sign * magnitude});
    psum += std::pow(magnitude, p);
  }
  const double scale = 1.0 / std::pow(psum, 1.0 / p);
  for (auto& e : entries) e.value *= scale;
  return SparseSeq(std::move(entries));
}

double euclidean_norm(const SparseSeq& u) {
  double s = 0.0;
  for (const auto& e : u.entries()) s += e.value * e.value;
  return std::sqrt(s);
}

bool has_ordered_disjoint_supports(const std::vector<SparseSeq>& vs) {
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (vs[i].min_index() <= vs[i - 1].max_index()) return false;
  }
  return true;
}

// Sign convention and l_p normalization shared by both routes.
TailVector finish(std::map<std::size_t, double> coefficients, const BasisProvider& basis, Index n, Exponent p,
                  std::size_t prefix_length, double sigma_ratio) {
  std::vector<Entry> raw;
  for (const auto& [i, c] : coefficients) {
    if (c == 0.0) continue;
    const auto g = basis.vector(i);
    for (const auto& e : g->entries()) raw.push_back({e.index, c * e.value});
  }
  SparseSeq u = tail(SparseSeq::from_unsorted(std::move(raw)), n);
  const double cutoff = kZeroTruncation * u.max_abs();
  std::vector<Entry> kept;
  for (const auto& e : u.entries()) {
    if (std::abs(e.value) >= cutoff) kept.push_back(e);
  }
  u = SparseSeq(std::move(kept));
  if (u.empty()) {
    throw NoTailVector("null combination of the first " + std::to_string(prefix_length) +
                       " basis vectors vanishes beyond coordinate " + std::to_string(n) +
                       "; the basis is not linearly independent");
  }
  double scale = 1.0 / lp_norm(u, p);
  if (u.entries().front().value < 0.0) scale = -scale;

  TailVector out;
  out.vector = u.scaled(scale);
  for (const auto& [i, c] : coefficients) {
    if (c != 0.0) out.coefficients.emplace_back(i, c * scale);
  }
  out.prefix_length = prefix_length;
  out.sigma_ratio = sigma_ratio;
  return out;
}

std::size_t prefix_cap(Index n) {
  const Index cap = saturating_add(n, static_cast<Index>(kPrefixSlack));
  return static_cast<std::size_t>(std::min<Index>(cap, std::numeric_limits<Index>::max() / 2));
}

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "canonical") return Preset::canonical;
  if (name == "lacunary") return Preset::lacunary;
  if (name == "random_block") return Preset::random_block;
  if (name == "from_file") return Preset::from_file;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::canonical: return "canonical";
    case Preset::lacunary: return "lacunary";
    case Preset::random_block: return "random_block";
    case Preset::from_file: return "from_file";
  }
  return "unknown";
}

BasisProvider BasisProvider::make_preset(Preset preset, std::uint64_t seed,
                                         const std::optional<std::filesystem::path>& source, Exponent p) {
  if (preset == Preset::from_file) {
    if (!source) throw InputFormatError("from_file preset requires a basis file");
    const auto doc = read_json_file(*source);
    if (!doc.is_object() || !doc.contains("vectors") || !doc.at("vectors").is_array()) {
      throw InputFormatError(source->string() + ": basis file needs a \"vectors\" array");
    }
    if (doc.contains("p") && !doc.at("p").is_number()) {
      throw InputFormatError(source->string() + ": \"p\" must be a number");
    }
    std::vector<SparseSeq> vectors;
    for (const auto& v : doc.at("vectors")) vectors.push_back(sparse_seq_from_json(v));
    auto out = from_vectors(std::move(vectors), source->filename().string());
    out.preset_ = Preset::from_file;
    out.seed_ = seed;
    return out;
  }
  BasisProvider out;
  out.preset_ = preset;
  out.name_ = to_string(preset);
  out.seed_ = seed;
  out.p_ = p.value();
  return out;
}

BasisProvider BasisProvider::from_vectors(std::vector<SparseSeq> vectors, std::string name) {
  if (vectors.empty()) throw InputFormatError("basis must contain at least one vector");
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].empty()) {
      throw InputFormatError("basis vector " + std::to_string(i + 1) + " has empty support");
    }
  }
  BasisProvider out;
  out.preset_ = Preset::from_file;
  out.name_ = std::move(name);
  out.ordered_disjoint_ = has_ordered_disjoint_supports(vectors);
  out.stored_ = std::make_shared<const std::vector<SparseSeq>>(std::move(vectors));
  return out;
}

std::optional<SparseSeq> BasisProvider::vector(std::size_t i) const {
  if (i == 0) throw std::invalid_argument("basis index is 1-based");
  switch (preset_) {
    case Preset::canonical:
      return SparseSeq::unit(static_cast<Index>(i));
    case Preset::lacunary:
      if (i > kLacunaryLength) return std::nullopt;
      return SparseSeq::unit(Index{1} << i);
    case Preset::random_block:
      return random_block_vector(seed_, i, p_);
    case Preset::from_file:
      if (i > stored_->size()) return std::nullopt;
      return (*stored_)[i - 1];
  }
  return std::nullopt;
}

std::optional<std::size_t> BasisProvider::length() const {
  if (preset_ == Preset::lacunary) return kLacunaryLength;
  if (stored_) return stored_->size();
  return std::nullopt;
}

std::shared_ptr<const BasisProvider::Snapshot> BasisProvider::columns(std::size_t min_columns) const {
  std::lock_guard lock(shared_->mutex);
  auto current = shared_->snapshot;
  if (current->columns.size() >= min_columns || current->exhausted) return current;

  auto next = std::make_shared<Snapshot>(*current);
  std::size_t target = std::max({min_columns, 2 * current->columns.size(), std::size_t{64}});
  if (const auto len = length()) {
    if (target >= *len) {
      target = *len;
      next->exhausted = true;
    }
  }
  next->columns.reserve(target);
  for (std::size_t i = next->columns.size() + 1; i <= target; ++i) {
    const auto g = vector(i);
    const double norm = euclidean_norm(*g);
    next->columns.push_back({g->min_index(), g->max_index(), norm});
    if (next->prefix_max_norm.empty()) {
      next->prefix_max_norm.push_back(norm);
      next->prefix_min_norm.push_back(norm);
      next->prefix_argmin.push_back(i);
    } else {
      next->prefix_max_norm.push_back(std::max(next->prefix_max_norm.back(), norm));
      const bool smaller = norm < next->prefix_min_norm.back();
      next->prefix_min_norm.push_back(smaller ? norm : next->prefix_min_norm.back());
      next->prefix_argmin.push_back(smaller ? i : next->prefix_argmin.back());
    }
  }
  shared_->snapshot = next;
  return next;
}

Index choose_cut(const SparseSeq& u, Exponent p, double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("choose_cut: eta must be nonnegative");
  if (lp_norm(u, p) <= eta) return 0;
  // The tail norm only changes at support indices and is non-increasing in
  // the cut, so the answer is the first support index that qualifies.
  const auto e = u.entries();
  std::size_t lo = 0;
  std::size_t hi = e.size() - 1;  // the last index always qualifies (empty tail)
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (lp_norm(tail(u, e[mid].index), p) <= eta) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return e[lo].index;
}

TailVector tail_unit_vector(const BasisProvider& basis, Index n, Exponent p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tail_unit_vector: tol must be positive");
  if (n < 0) throw std::invalid_argument("tail_unit_vector: n must be nonnegative");
  if (!basis.ordered_disjoint()) return tail_unit_vector_dense(basis, n, p, tol);

  // Ordered disjoint supports make the head matrix's columns mutually
  // orthogonal, so its singular values are the column norms restricted to
  // rows 1..n. A column whose support starts beyond n is an exact null
  // direction.
  const std::size_t cap = prefix_cap(n);
  std::shared_ptr<const BasisProvider::Snapshot> snap;
  std::size_t want = 64;
  for (;;) {
    snap = basis.columns(want);
    const auto& cols = snap->columns;
    if (!cols.empty() && cols.back().lo > n) break;
    if (snap->exhausted || cols.size() >= cap) {
      throw NoTailVector("basis " + basis.name() + " has no vector vanishing on 1.." + std::to_string(n) +
                         " within the first " + std::to_string(cols.size()) + " vectors");
    }
    want = std::min(cap, 2 * cols.size());
  }
  const auto& cols = snap->columns;
  const auto first_zero = static_cast<std::size_t>(
      std::partition_point(cols.begin(), cols.end(), [n](const ColumnInfo& c) { return c.lo <= n; }) -
      cols.begin());  // 0-based position of the first zero column
  if (first_zero + 1 > cap) {
    throw NoTailVector("no vector vanishing on 1.." + std::to_string(n) + " within the prefix cap");
  }
  if (first_zero == 0) return finish({{1, 1.0}}, basis, n, p, 1, 0.0);

  // Columns before `full_end` lie entirely inside 1..n; at most one column
  // straddles n.
  const bool straddles = cols[first_zero - 1].hi > n;
  const std::size_t full_end = straddles ? first_zero - 1 : first_zero;

  // Smallest full prefix with min norm < tol * max norm; the predicate is
  // monotone in the prefix length.
  std::size_t lo = 0;
  std::size_t hi = full_end;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (snap->prefix_min_norm[mid] < tol * snap->prefix_max_norm[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo < full_end) {
    const std::size_t chosen = snap->prefix_argmin[lo];
    return finish({{chosen, 1.0}}, basis, n, p, lo + 1,
                  snap->prefix_min_norm[lo] / snap->prefix_max_norm[lo]);
  }

  if (straddles) {
    const std::size_t s = first_zero;  // 1-based index of the straddling column
    double head_sq = 0.0;
    const SparseSeq straddling_head = head(*basis.vector(s), n);
    for (const auto& e : straddling_head.entries()) head_sq += e.value * e.value;
    const double sigma_s = std::sqrt(head_sq);
    const double max_norm = std::max(full_end > 0 ? snap->prefix_max_norm[full_end - 1] : 0.0, sigma_s);
    const double min_full = full_end > 0 ? snap->prefix_min_norm[full_end - 1] : sigma_s;
    if (std::min(min_full, sigma_s) < tol * max_norm) {
      const std::size_t chosen = sigma_s <= min_full ? s : snap->prefix_argmin[full_end - 1];
      return finish({{chosen, 1.0}}, basis, n, p, s, std::min(min_full, sigma_s) / max_norm);
    }
  }
  return finish({{first_zero + 1, 1.0}}, basis, n, p, first_zero + 1, 0.0);
}

namespace {

struct DenseNull {
  bool found = false;
  Eigen::VectorXd coefficients;
  double sigma_ratio = 1.0;
};

DenseNull dense_null_direction(const BasisProvider& basis, Index n, std::size_t m, double tol) {
  std::vector<SparseSeq> heads;
  std::vector<Index> rows;
  for (std::size_t i = 1; i <= m; ++i) {
    heads.push_back(head(*basis.vector(i), n));
    for (const auto& e : heads.back().entries()) rows.push_back(e.index);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  DenseNull out;
  const auto cols = static_cast<Eigen::Index>(m);
  if (rows.empty()) {
    out.found = true;
    out.coefficients = Eigen::VectorXd::Zero(cols);
    out.coefficients(0) = 1.0;
    out.sigma_ratio = 0.0;
    return out;
  }
  Eigen::MatrixXd restricted = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t c = 0; c < heads.size(); ++c) {
    for (const auto& e : heads[c].entries()) {
      const auto r = std::lower_bound(rows.begin(), rows.end(), e.index) - rows.begin();
      restricted(r, static_cast<Eigen::Index>(c)) = e.value;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  const double smallest = cols > sv.size() ? 0.0 : sv(sv.size() - 1);
  if (largest == 0.0 || smallest < tol * largest) {
    out.found = true;
    out.coefficients = svd.matrixV().col(cols - 1);
    out.sigma_ratio = largest == 0.0 ? 0.0 : smallest / largest;
  }
  return out;
}

}  // namespace

TailVector tail_unit_vector_dense(const BasisProvider& basis, Index n, Exponent p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tail_unit_vector: tol must be positive");
  if (n < 0) throw std::invalid_argument("tail_unit_vector: n must be nonnegative");
  std::size_t cap = prefix_cap(n);
  if (const auto len = basis.length()) cap = std::min(cap, *len);

  // Growth schedule M <- max(M + 1, ceil(1.5 M)), then bisection back to the
  // smallest prefix that has a null direction.
  std::size_t failing = 0;
  std::size_t m = 1;
  DenseNull hit;
  for (;;) {
    hit = dense_null_direction(basis, n, m, tol);
    if (hit.found) break;
    failing = m;
    if (m >= cap) {
      throw NoTailVector("basis " + basis.name() + " has no vector vanishing on 1.." + std::to_string(n) +
                         " within the first " + std::to_string(m) + " vectors");
    }
    m = std::min(cap, std::max(m + 1, static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(m)))));
  }
  while (failing + 1 < m) {
    const std::size_t mid = failing + (m - failing) / 2;
    auto probe = dense_null_direction(basis, n, mid, tol);
    if (probe.found) {
      m = mid;
      hit = std::move(probe);
    } else {
      failing = mid;
    }
  }
  std::map<std::size_t, double> coefficients;
  for (Eigen::Index i = 0; i < hit.coefficients.size(); ++i) {
    coefficients[static_cast<std::size_t>(i) + 1] = hit.coefficients(i);
  }
  return finish(std::move(coefficients), basis, n, p, m, hit.sigma_ratio);
}

SparseSeq reconstruct(const BasisProvider& basis, const TailVector& t) {
  std::vector<Entry> raw;
  for (const auto& [i, c] : t.coefficients) {
    const SparseSeq g = *basis.vector(i);
    for (const auto& e : g.entries()) raw.push_back({e.index, c * e.value});
  }
  return SparseSeq::from_unsorted(std::move(raw));
}

}  // namespace humpforge
