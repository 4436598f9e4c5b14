#include "humpforge/humpbuilder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "condition_family.hpp"
#include "humpforge/errors.hpp"

namespace humpforge {

using detail::Family;

namespace {


double min_abs(const SparseSeq& v) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : v.entries()) m = std::min(m, std::abs(e.value));
  return m;
}

double block_height(Index length, Exponent p) {
  return std::pow(static_cast<double>(length), -p.inverse());
}

// Smallest d >= 1 with d^{-1/p} <= b, i.e. d >= b^{-p}, snapping values a
// few ulps above an integer down to it.
Index min_block_length(double b, Exponent p) {
  const double x = std::pow(b, -p.value());
  const double snapped = std::ceil(x * (1.0 - 1e-12));
  if (!(snapped < 9.0e18)) return std::numeric_limits<Index>::max() / 4;
  return std::max<Index>(1, static_cast<Index>(snapped));
}

void check_flat_hump(const FlatHumpTrace& t, Exponent p) {
  std::ostringstream why;
  const double u_norm = lp_norm(t.u, p);
  const double v_norm = lp_norm(t.v, p);
  const double w_norm = lp_norm(t.w, p);
  const double tol = kCheckTol;
  if (std::abs(u_norm - 1.0) > tol) why << " ||u||_p=" << u_norm;
  if (!(t.m - t.n > t.n)) why << " m=" << t.m << " not > 2n";
  if (t.m < t.n_floor) why << " m=" << t.m << " < N=" << t.n_floor;
  if (!t.v.empty() && (t.v.min_index() <= t.n || t.v.max_index() > t.m)) why << " supp v outside (n, m]";
  if (t.v.max_abs() > t.eps * (1.0 + tol)) why << " max|v|=" << t.v.max_abs() << " > eps=" << t.eps;
  if (v_norm < 1.0 - t.delta - tol || v_norm > 1.0 + tol) why << " ||v||_p=" << v_norm;
  if (w_norm > t.delta + tol) why << " ||w||_p=" << w_norm << " > delta=" << t.delta;
  if (!why.str().empty()) throw ConstructionError("flat hump at n=" + std::to_string(t.n) + " failed:" + why.str());
}

}  // namespace

void RunParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must satisfy 0 < delta < 1");
  if (stages < 1) throw std::invalid_argument("stage count must be at least 1");
  if (support_budget < 1) throw std::invalid_argument("support budget must be at least 1");
  if (!(null_tol > 0.0)) throw std::invalid_argument("null-space tolerance must be positive");
}

std::string to_string(ScaleClass c) {
  switch (c) {
    case ScaleClass::invariant: return "scale-invariant";
    case ScaleClass::homogeneous: return "homogeneous";
    case ScaleClass::inhomogeneous: return "inhomogeneous";
    case ScaleClass::mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(Truncation t) {
  switch (t) {
    case Truncation::none: return "none";
    case Truncation::support_budget: return "support_budget";
    case Truncation::basis_exhausted: return "basis_exhausted";
  }
  return "unknown";
}

bool all_passed(const Checklist& list) {
  return std::all_of(list.begin(), list.end(), [](const ConditionResult& c) { return c.passed; });
}

const ConditionResult* find_condition(const Checklist& list, const std::string& id) {
  for (const auto& c : list) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

FlatHumpTrace build_flat_hump(const BasisProvider& basis, Index n, Index n_floor, double eps, double delta,
                              Exponent p, std::size_t budget, double null_tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("flat hump: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("flat hump: delta must lie in (0, 1)");
  if (n < 0) throw std::invalid_argument("flat hump: n must be nonnegative");

  FlatHumpTrace trace;
  trace.n = n;
  trace.n_floor = n_floor;
  trace.eps = eps;
  trace.delta = delta;

  std::map<Index, double> partial_sum;
  double psum = 0.0;  // sum_j |partial_sum(j)|^p
  Index cut = n;
  for (int i = 1;; ++i) {
    const auto next = tail_unit_vector(basis, cut, p, null_tol).vector;
    trace.stored_entries += next.size();
    if (trace.stored_entries > budget) {
      throw BudgetExhausted("support budget of " + std::to_string(budget) + " entries exhausted after " +
                                std::to_string(trace.inner_vectors.size()) + " inner vectors at n=" +
                                std::to_string(n),
                            std::move(trace));
    }
    const double eta = std::ldexp(delta, -i);
    // Once delta / 2^i underflows only an empty tail qualifies.
    cut = eta > 0.0 ? choose_cut(next, p, eta) : next.max_index();

    for (const auto& e : next.entries()) {
      auto [it, inserted] = partial_sum.try_emplace(e.index, 0.0);
      psum -= std::pow(std::abs(it->second), p.value());
      it->second += e.value;
      psum += std::pow(std::abs(it->second), p.value());
    }
    const double s = std::pow(std::max(psum, 0.0), p.inverse());
    trace.inner_vectors.push_back(next);
    trace.inner_cuts.push_back(cut);
    trace.s_values.push_back(s);

    if (cut - n > n && cut >= n_floor && 1.0 / s <= eps) break;
  }

  std::vector<Entry> entries;
  entries.reserve(partial_sum.size());
  for (const auto& [j, x] : partial_sum) {
    if (x != 0.0) entries.push_back({j, x});
  }
  const SparseSeq y(std::move(entries));
  trace.m = cut;
  trace.u = y.scaled(1.0 / lp_norm(y, p));
  trace.v = head(trace.u, trace.m);
  trace.w = tail(trace.u, trace.m);
  check_flat_hump(trace, p);
  return trace;
}

Checklist evaluate_stage_conditions(std::span<const HumpStage> stages, Exponent p, double delta) {
  Family structure("structure", "stage indices chain, n_prev = previous n_k, b_k = min |v_k| on supp v_k",
                   ScaleClass::homogeneous);
  Family unit_norm("unit_norm", "||u_k||_p = 1", ScaleClass::inhomogeneous);
  Family doubling("block_doubling", "2 n_{k-1} < n_k", ScaleClass::invariant);
  Family support("support", "u_k vanishes on 1..n_{k-1}, v_k = P_{n_k} u_k, w_k = R_{n_k} u_k, supp v_k in I_k",
             ScaleClass::invariant);
  Family flatness("flatness", "|v_{k+1}(j)| <= min{b_k, (n_k - n_{k-1})^{-1/p}}", ScaleClass::mixed);
  Family height("block_height", "(n_{k+1} - n_k)^{-1/p} <= b_k", ScaleClass::mixed);
  Family hump_mass("hump_mass", "1 - delta <= ||v_k||_p <= 1", ScaleClass::inhomogeneous);
  Family tail_mass("tail_mass", "||w_k||_p <= delta / 2^k", ScaleClass::inhomogeneous);

  std::vector<double> b(stages.size(), 0.0);
  for (std::size_t t = 0; t < stages.size(); ++t) {
    const auto& s = stages[t];
    const std::size_t k = t + 1;
    const Index expected_prev = t == 0 ? 0 : stages[t - 1].n_k;
    b[t] = s.v.empty() ? 0.0 : min_abs(s.v);

    structure.exact(s.k == k && s.n_prev == expected_prev && !s.v.empty() && s.b == b[t], k);

    const double u_norm = lp_norm(s.u, p);
    unit_norm.le(u_norm, 1.0, k);
    unit_norm.le(1.0, u_norm, k);

    doubling.exact(s.n_k - s.n_prev > s.n_prev, k,
              static_cast<double>(s.n_k - s.n_prev) - static_cast<double>(s.n_prev) - 1.0);

    const bool in_tail = s.u.empty() || s.u.min_index() > s.n_prev;
    const bool split_ok = s.v == head(s.u, s.n_k) && s.w == tail(s.u, s.n_k);
    const bool in_block = s.v.empty() || (s.v.min_index() > s.n_prev && s.v.max_index() <= s.n_k);
    support.exact(in_tail && split_ok && in_block, k);

    if (t > 0) {
      const auto& prev = stages[t - 1];
      const double prev_height = block_height(prev.block_length(), p);
      flatness.le(s.v.max_abs(), std::min(b[t - 1], prev_height), k);
      height.le(block_height(s.block_length(), p), b[t - 1], k);
    }

    const double v_norm = lp_norm(s.v, p);
    hump_mass.le(1.0 - delta, v_norm, k);
    hump_mass.le(v_norm, 1.0, k);
    tail_mass.le(lp_norm(s.w, p), std::ldexp(delta, -static_cast<int>(k)), k);
  }

  Checklist out;
  for (auto* f : {&structure, &unit_norm, &doubling, &support, &flatness, &height, &hump_mass, &tail_mass}) {
    out.push_back(std::move(*f).done());
  }
  return out;
}

BuildResult build_witness_stages(const BasisProvider& basis, const RunParams& params) {
  params.validate();
  const Exponent p = params.p;
  BuildResult result;

  for (std::size_t k = 1; k <= params.stages; ++k) {
    const std::size_t remaining =
        params.support_budget > result.stored_entries ? params.support_budget - result.stored_entries : 0;
    Index n = 0;
    Index n_floor = 1;
    double eps = std::numeric_limits<double>::infinity();
    if (k > 1) {
      const auto& prev = result.stages.back();
      n = prev.n_k;
      eps = prev.eps;
      const Index d = min_block_length(prev.b, p);
      n_floor = d > std::numeric_limits<Index>::max() - n ? std::numeric_limits<Index>::max() : n + d;
    }
    const double share = std::ldexp(params.delta, -static_cast<int>(k));

    FlatHumpTrace hump;
    try {
      hump = build_flat_hump(basis, n, n_floor, eps, share, p, remaining, params.null_tol);
    } catch (const BudgetExhausted& e) {
      result.truncation = Truncation::support_budget;
      result.truncation_detail = "stage " + std::to_string(k) + ": " + e.what();
      break;
    } catch (const NoTailVector& e) {
      if (k == 1) throw;
      result.truncation = Truncation::basis_exhausted;
      result.truncation_detail = "stage " + std::to_string(k) + ": " + e.what();
      break;
    }
    result.stored_entries += hump.stored_entries;

    HumpStage stage;
    stage.k = k;
    stage.n_prev = n;
    stage.n_k = hump.m;
    stage.inner_count = hump.inner_vectors.size();
    stage.u = std::move(hump.u);
    stage.v = std::move(hump.v);
    stage.w = std::move(hump.w);
    if (stage.v.empty()) {
      throw DegenerateStage("stage " + std::to_string(k) + " produced v_k = 0; b_k is undefined");
    }
    stage.b = min_abs(stage.v);
    stage.eps = std::min(stage.b, block_height(stage.block_length(), p));
    result.stages.push_back(std::move(stage));

    result.checklist = evaluate_stage_conditions(result.stages, p, params.delta);
    if (!all_passed(result.checklist)) {
      std::string failed;
      for (const auto& c : result.checklist) {
        if (!c.passed) failed += " " + c.id;
      }
      throw ConstructionError("stage " + std::to_string(k) + " violates condition families:" + failed);
    }
  }
  if (result.stages.empty()) result.checklist = evaluate_stage_conditions(result.stages, p, params.delta);
  return result;
}

SparseSeq padded_majorant(const HumpStage& stage, Exponent p) {
  const Index length = stage.block_length();
  if (length <= 0) throw std::invalid_argument("padded_majorant: empty block");
  if (length > static_cast<Index>(std::numeric_limits<std::int32_t>::max())) {
    throw std::length_error("padded_majorant: block of " + std::to_string(length) + " coordinates is too long");
  }
  const double height = block_height(length, p);
  std::vector<Entry> out;
  out.reserve(static_cast<std::size_t>(length));
  const auto v = stage.v.entries();
  std::size_t pos = 0;
  for (Index j = stage.n_prev + 1; j <= stage.n_k; ++j) {
    if (pos < v.size() && v[pos].index == j) {
      out.push_back({j, std::abs(v[pos].value)});
      ++pos;
    } else {
      out.push_back({j, height});
    }
  }
  return SparseSeq(std::move(out));
}

namespace {

void check_range(std::span<const HumpStage> stages, std::size_t N) {
  if (N < 1 || N > stages.size()) {
    throw std::out_of_range("N=" + std::to_string(N) + " outside 1.." + std::to_string(stages.size()));
  }
}

}  // namespace

SparseSeq witness_sum(std::span<const HumpStage> stages, std::size_t N) {
  check_range(stages, N);
  std::vector<Entry> raw;
  for (std::size_t t = 0; t < N; ++t) {
    const auto e = stages[t].u.entries();
    raw.insert(raw.end(), e.begin(), e.end());
  }
  return SparseSeq::from_unsorted(std::move(raw));
}

SparseSeq hump_sum(std::span<const HumpStage> stages, std::size_t N) {
  check_range(stages, N);
  std::vector<SparseSeq> parts;
  for (std::size_t t = 0; t < N; ++t) parts.push_back(stages[t].v);
  return concat_or_merge(parts);
}

SparseSeq padded_sum(std::span<const HumpStage> stages, std::size_t N, Exponent p) {
  check_range(stages, N);
  std::vector<SparseSeq> parts;
  for (std::size_t t = 0; t < N; ++t) parts.push_back(padded_majorant(stages[t], p));
  return concat_or_merge(parts);
}

}  // namespace humpforge
