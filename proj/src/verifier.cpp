#include "humpforge/verifier.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <set>

#include "condition_family.hpp"
#include "humpforge/rng.hpp"

namespace humpforge {

using detail::Family;

namespace {


double root(double x, Exponent p) { return std::pow(x, p.inverse()); }

// Positions of I_k = {lo..hi} to audit: the endpoints, the case boundary
// 2 n_{k-1} and its successor, and evenly spaced interior points.
std::vector<Index> audit_positions(Index n_prev, Index n_k, const VerifyOptions& options) {
  std::vector<Index> out;
  const Index lo = n_prev + 1;
  const Index hi = n_k;
  if (options.full_audit) {
    for (Index j = lo; j <= hi; ++j) out.push_back(j);
    return out;
  }
  out = {lo, hi};
  for (Index j : {2 * n_prev, 2 * n_prev + 1}) {
    if (j >= lo && j <= hi) out.push_back(j);
  }
  const auto samples = static_cast<Index>(options.interior_samples);
  for (Index s = 1; s <= samples; ++s) {
    const Index j = lo + (hi - lo) * s / (samples + 1);
    out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double weak_upper_bound(Exponent p, double delta) {
  const double d = embedding_constant(p);
  return std::pow(2.0, p.inverse()) * (std::pow(2.0, 1.0 + p.inverse()) * std::max(1.0, d) + delta);
}

Checklist check_stage_conditions(std::span<const HumpStage> stages, Exponent p, double delta) {
  return evaluate_stage_conditions(stages, p, delta);
}

GrowthResult check_growth(std::span<const HumpStage> stages, Exponent p, double delta) {
  Family lower("growth.lower", "||z_N||_p >= (1 - delta) N^{1/p} - delta", ScaleClass::inhomogeneous);
  Family chain("growth.chain", "||z_N||_p >= ||v_1 + ... + v_N||_p - delta", ScaleClass::inhomogeneous);
  Family humps("growth.humps", "||v_1 + ... + v_N||_p >= (1 - delta) N^{1/p}", ScaleClass::inhomogeneous);
  Family disjoint("growth.disjoint", "||v_1 + ... + v_N||_p^p = sum_k ||v_k||_p^p", ScaleClass::homogeneous);
  Family blocks("growth.blocks", "n_N >= 2^{N-1}", ScaleClass::invariant);

  GrowthResult out;
  SparseSeq z;
  std::vector<SparseSeq> v_parts;
  double v_psum = 0.0;
  for (std::size_t t = 0; t < stages.size(); ++t) {
    const std::size_t N = t + 1;
    z = z + stages[t].u;
    v_parts.push_back(stages[t].v);
    v_psum += std::pow(lp_norm(stages[t].v, p), p.value());

    NormRow row;
    row.N = N;
    row.lp = lp_norm(z, p);
    row.lower_bound = (1.0 - delta) * root(static_cast<double>(N), p) - delta;
    row.hump_lp = lp_norm(concat_or_merge(v_parts), p);
    row.disjoint_lp = root(v_psum, p);

    lower.le(row.lower_bound, row.lp, N);
    chain.le(row.hump_lp - delta, row.lp, N);
    humps.le((1.0 - delta) * root(static_cast<double>(N), p), row.hump_lp, N);
    disjoint.le(row.hump_lp, row.disjoint_lp, N);
    disjoint.le(row.disjoint_lp, row.hump_lp, N);
    blocks.exact(N - 1 >= 62 || stages[t].n_k >= (Index{1} << (N - 1)), N);
    out.rows.push_back(row);
  }
  for (auto* f : {&lower, &chain, &humps, &disjoint, &blocks}) out.checks.push_back(std::move(*f).done());
  return out;
}

WeakBoundResult check_weak_bound(std::span<const HumpStage> stages, Exponent p, double delta,
                                 const VerifyOptions& options) {
  const double d = embedding_constant(p);
  const double padded_limit = std::pow(2.0, 1.0 + p.inverse()) * std::max(1.0, d);
  const double case_a_limit = std::pow(2.0, 2.0 * p.inverse());
  const double case_b_limit = std::pow(2.0, 1.0 + p.inverse()) * d;

  Family padded("weak.padded", "||z~_N||_{p,inf} <= 2^{1+1/p} max(1, D_p)", ScaleClass::inhomogeneous);
  Family assembly("weak.assembly", "||z_N||_{p,inf} <= 2^{1/p} (||z~_N||_{p,inf} + delta)", ScaleClass::mixed);
  Family bounded("weak.bound", "||z_N||_{p,inf} <= B", ScaleClass::inhomogeneous);
  Family decay("weak.ratio_decay", "||z_N||_{p,inf} / ||z_N||_p <= B / ((1 - delta) N^{1/p} - delta)",
               ScaleClass::inhomogeneous);
  Family case_a("audit.case_a", "j^{1/p} z~*(j) <= 2^{2/p} for n_{k-1} < j <= 2 n_{k-1}", ScaleClass::inhomogeneous);
  Family case_b("audit.case_b", "j^{1/p} z~*(j) <= 2^{1/p+1} D_p for 2 n_{k-1} < j <= n_k",
                ScaleClass::inhomogeneous);
  Family profile("audit.block_profile", "z~*(j) = (v~_k)*(j - n_{k-1}) for j in I_k", ScaleClass::invariant);
  Family monotone("majorant.monotone", "min over I_k of v~_k >= max over I_{k+1} of v~_{k+1}", ScaleClass::mixed);
  Family domination("majorant.domination", "|v_1 + ... + v_N| <= z~_N pointwise", ScaleClass::mixed);
  Family partition("majorant.partition", "supp z~_N = {1..n_N}; supports of v_k pairwise disjoint",
                   ScaleClass::invariant);

  WeakBoundResult out;
  out.bound = weak_upper_bound(p, delta);

  std::vector<SparseSeq> majorants;
  majorants.reserve(stages.size());
  for (const auto& s : stages) majorants.push_back(padded_majorant(s, p));

  SparseSeq z;
  std::vector<SparseSeq> padded_parts;
  for (std::size_t t = 0; t < stages.size(); ++t) {
    const std::size_t N = t + 1;
    z = z + stages[t].u;
    padded_parts.push_back(majorants[t]);
    const SparseSeq z_tilde = concat_or_merge(padded_parts);

    NormRow row;
    row.N = N;
    const auto z_profile = decreasing_rearrangement(z);
    row.lp = lp_norm(z_profile, p);
    row.weak = weak_lp_quasinorm(z_profile, p);
    row.equiv = weak_lp_norm_equiv(z_profile, p);
    row.padded_weak = weak_lp_quasinorm(z_tilde, p);
    row.upper_bound = out.bound;
    row.ratio = row.lp > 0.0 ? row.weak / row.lp : 0.0;
    row.lower_bound = (1.0 - delta) * root(static_cast<double>(N), p) - delta;

    padded.le(row.padded_weak, padded_limit, N);
    assembly.le(row.weak, std::pow(2.0, p.inverse()) * (row.padded_weak + delta), N);
    bounded.le(row.weak, out.bound, N);
    if (row.lower_bound > 0.0) decay.le(row.ratio, out.bound / row.lower_bound, N);
    out.rows.push_back(row);
  }

  if (!stages.empty()) {
    const SparseSeq z_tilde = concat_or_merge(majorants);
    const auto global = decreasing_rearrangement(z_tilde);
    const Index n_last = stages.back().n_k;
    partition.exact(z_tilde.size() == static_cast<std::size_t>(n_last) && z_tilde.min_index() == 1 &&
                        z_tilde.max_index() == n_last,
                    stages.size());

    for (std::size_t t = 0; t < stages.size(); ++t) {
      const auto& s = stages[t];
      const std::size_t k = t + 1;
      const auto local = decreasing_rearrangement(majorants[t]);
      for (Index j : audit_positions(s.n_prev, s.n_k, options)) {
        const double value = global(static_cast<std::size_t>(j));
        profile.exact(value == local(static_cast<std::size_t>(j - s.n_prev)), k);
        const double scaled = root(static_cast<double>(j), p) * value;
        if (j <= 2 * s.n_prev) {
          case_a.le(scaled, case_a_limit, k);
        } else {
          case_b.le(scaled, case_b_limit, k);
        }
        ++out.audited_points;
      }

      bool dominated = true;
      for (const auto& e : s.v.entries()) {
        if (std::abs(e.value) > majorants[t].at(e.index)) dominated = false;
      }
      domination.exact(dominated, k);
      partition.exact(s.v.empty() || (s.v.min_index() > s.n_prev && s.v.max_index() <= s.n_k), k);

      if (t + 1 < stages.size()) {
        const double min_here = local.values.back();
        const double max_next = majorants[t + 1].max_abs();
        monotone.le(max_next, min_here, k);
      }
    }
  }

  for (auto* f : {&padded, &assembly, &bounded, &decay, &case_a, &case_b, &profile, &monotone, &domination,
                  &partition}) {
    out.checks.push_back(std::move(*f).done());
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

WitnessReport verify_stages(std::span<const HumpStage> stages, Exponent p, double delta,
                            const VerifyOptions& options) {
  WitnessReport report;
  report.p = p.value();
  report.delta = delta;
  report.stages = stages.size();
  report.embedding_constant = embedding_constant(p);

  report.checks = check_stage_conditions(stages, p, delta);
  auto growth = check_growth(stages, p, delta);
  auto weak = check_weak_bound(stages, p, delta, options);
  report.bound = weak.bound;
  report.audited_points = weak.audited_points;
  report.checks.insert(report.checks.end(), growth.checks.begin(), growth.checks.end());
  report.checks.insert(report.checks.end(), weak.checks.begin(), weak.checks.end());

  std::vector<double> ns;
  std::vector<double> lps;
  for (std::size_t t = 0; t < stages.size(); ++t) {
    NormRow row = weak.rows[t];
    row.hump_lp = growth.rows[t].hump_lp;
    row.disjoint_lp = growth.rows[t].disjoint_lp;
    report.rows.push_back(row);
    ns.push_back(static_cast<double>(row.N));
    lps.push_back(row.lp);
  }
  report.trend_exponent = loglog_slope(ns, lps);
  return report;
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json report_to_json(const WitnessReport& report) {
  Json j;
  j["params"] = {{"p", report.p}, {"delta", report.delta}, {"stages", report.stages}};
  j["D_p"] = report.embedding_constant;
  j["B"] = report.bound;
  j["trend_exponent"] = report.trend_exponent;
  j["audited_points"] = report.audited_points;
  j["passed"] = report.passed();
  auto rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["N"] = r.N;
    row["lp_norm"] = r.lp;
    row["weak_quasinorm"] = r.weak;
    row["equiv_norm"] = r.equiv;
    row["lower_bound"] = r.lower_bound;
    row["B"] = r.upper_bound;
    row["ratio"] = r.ratio;
    row["hump_lp_norm"] = r.hump_lp;
    row["disjoint_lp_norm"] = r.disjoint_lp;
    row["padded_weak_quasinorm"] = r.padded_weak;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  auto checks = Json::array();
  for (const auto& c : report.checks) {
    Json item;
    item["id"] = c.id;
    item["description"] = c.description;
    item["class"] = to_string(c.scale_class);
    item["evaluated"] = c.evaluated;
    item["passed"] = c.passed;
    item["checks"] = c.checks;
    item["violations"] = c.violations;
    item["worst_margin"] = finite_or_null(c.worst_margin);
    item["worst_at"] = c.worst_at;
    checks.push_back(std::move(item));
  }
  j["checks"] = std::move(checks);
  return j;
}

void write_norms_csv(std::ostream& out, const WitnessReport& report) {
  out << "N,lp_norm,weak_quasinorm,equiv_norm,lower_bound,B,ratio\n";
  char line[256];
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.N, r.lp, r.weak, r.equiv,
                  r.lower_bound, r.upper_bound, r.ratio);
    out << line;
  }
}

SparseSeq random_sparse(std::uint64_t seed, std::size_t max_support, double magnitude) {
  SplitMix rng(seed);
  const std::size_t count = rng.below(max_support + 1);
  std::set<Index> indices;
  const auto range = static_cast<std::uint64_t>(2 * max_support + 1);
  while (indices.size() < count) indices.insert(static_cast<Index>(1 + rng.below(range)));
  std::vector<Entry> entries;
  for (Index i : indices) {
    double v = 0.0;
    while (v == 0.0) v = rng.uniform(-magnitude, magnitude);
    entries.push_back({i, v});
  }
  return SparseSeq(std::move(entries));
}

AxiomReport axiom_suite(Exponent p, std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("axiom_suite: sample_count must be at least 1");

  struct NormUnderTest {
    std::string name;
    std::function<double(const SparseSeq&)> eval;
  };
  const std::vector<NormUnderTest> norms = {
      {"lp", [p](const SparseSeq& u) { return lp_norm(u, p); }},
      {"equiv", [p](const SparseSeq& u) { return weak_lp_norm_equiv(u, p); }},
  };
  const std::vector<std::string> axioms = {"triangle", "homogeneity", "definiteness", "modulus",
                                           "lattice",  "monotone_convergence", "finiteness"};

  AxiomReport out;
  std::vector<Family> families;
  for (const auto& n : norms) {
    for (const auto& a : axioms) {
      families.emplace_back("axiom." + a + "." + n.name, a + " axiom for the " + n.name + " norm",
                            ScaleClass::homogeneous);
    }
  }
  Family quasi("quasi_triangle", "||u+v||_{p,inf} <= 2^{1/p} (||u||_{p,inf} + ||v||_{p,inf})",
               ScaleClass::homogeneous);
  Family sandwich("sandwich", "||u||_{p,inf} <= equiv(u) <= p' ||u||_{p,inf}", ScaleClass::homogeneous);
  Family embedding("embedding", "||u||_{p,inf} <= ||u||_p", ScaleClass::homogeneous);
  Family rearrangement("rearrangement", "u* matches the distribution-function characterization",
                       ScaleClass::invariant);
  Family rearranged_norm("rearranged_norm", "||u||_p = ||u^diamond||_p exactly", ScaleClass::invariant);
  Family head_tail("head_tail", "P_m u + R_m u = u with disjoint supports", ScaleClass::invariant);

  auto witness = [&out](const std::string& what, std::size_t sample) {
    if (out.witnesses.size() < 32) out.witnesses.push_back(what + " (sample " + std::to_string(sample) + ")");
  };

  const double quasi_constant = std::pow(2.0, p.inverse());
  out.min_equiv_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample_count; ++i) {
    const std::uint64_t base = hash_combine(seed, i);
    const SparseSeq u = random_sparse(hash_combine(base, 1));
    const SparseSeq v = random_sparse(hash_combine(base, 2));
    SplitMix rng(hash_combine(base, 3));
    const double alpha = rng.uniform(-5.0, 5.0);

    // |u| <= |dominating| pointwise.
    std::vector<Entry> dom;
    for (const auto& e : u.entries()) dom.push_back({e.index, e.value * rng.uniform(1.0, 2.0)});
    for (const auto& e : v.entries()) {
      if (u.at(e.index) == 0.0) dom.push_back(e);
    }
    const SparseSeq dominating = SparseSeq::from_unsorted(std::move(dom));

    for (std::size_t n = 0; n < norms.size(); ++n) {
      const auto& eval = norms[n].eval;
      auto* f = &families[n * axioms.size()];
      const double nu = eval(u);
      const double nv = eval(v);

      const double nsum = eval(u + v);
      f[0].le(nsum, nu + nv, i);
      if (nsum > (nu + nv) * (1.0 + kCheckTol) + kCheckTol) witness(norms[n].name + " triangle", i);

      const double scaled = eval(u.scaled(alpha));
      const double expected = std::abs(alpha) * nu;
      const bool homogeneous = std::abs(scaled - expected) <= 1e-12 * std::max(expected, 1e-300);
      f[1].exact(homogeneous, i);
      if (!homogeneous) witness(norms[n].name + " homogeneity", i);

      f[2].exact((nu == 0.0) == u.empty() && eval(SparseSeq{}) == 0.0, i);
      f[3].exact(eval(u.abs()) == nu, i);
      f[4].le(nu, eval(dominating), i);

      bool chain_ok = true;
      double prev = 0.0;
      for (const auto& e : u.entries()) {
        const double h = eval(head(u.abs(), e.index));
        if (h < prev * (1.0 - kCheckTol)) chain_ok = false;
        prev = h;
      }
      if (prev != eval(u.abs())) chain_ok = false;
      f[5].exact(chain_ok, i);
      f[6].exact(std::isfinite(nu), i);
    }

    const double wu = weak_lp_quasinorm(u, p);
    const double wv = weak_lp_quasinorm(v, p);
    if (wu + wv > 0.0) {
      const double ratio = weak_lp_quasinorm(u + v, p) / (wu + wv);
      out.max_quasi_triangle_ratio = std::max(out.max_quasi_triangle_ratio, ratio);
      quasi.le(ratio, quasi_constant, i);
    }
    if (wu > 0.0) {
      const double ratio = weak_lp_norm_equiv(u, p) / wu;
      out.min_equiv_ratio = std::min(out.min_equiv_ratio, ratio);
      out.max_equiv_ratio = std::max(out.max_equiv_ratio, ratio);
      sandwich.le(1.0, ratio, i);
      sandwich.le(ratio, p.conjugate(), i);
    }
    embedding.le(wu, lp_norm(u, p), i);

    // a*(j) is the least lambda with mu(lambda) <= j - 1: fewer than j moduli
    // exceed it and at least j reach it.
    const auto profile = decreasing_rearrangement(u);
    bool profile_ok = profile.size() == u.size();
    for (std::size_t j = 1; profile_ok && j <= profile.size(); ++j) {
      const double a = profile(j);
      std::size_t at_least = 0;
      for (const auto& e : u.entries()) {
        if (std::abs(e.value) >= a) ++at_least;
      }
      if (!(a > 0.0) || dist_func(u, a) > j - 1 || at_least < j) profile_ok = false;
    }
    rearrangement.exact(profile_ok, i);
    if (!profile_ok) witness("rearrangement", i);

    rearranged_norm.exact(lp_norm(u, p) == lp_norm(rearrangement_on_support(u), p), i);

    const Index m = static_cast<Index>(rng.below(2 * 50 + 2));
    const SparseSeq h = head(u, m);
    const SparseSeq t = tail(u, m);
    head_tail.exact(h + t == u && (h.empty() || t.empty() || h.max_index() < t.min_index()), i);
  }
  if (!std::isfinite(out.min_equiv_ratio)) out.min_equiv_ratio = 0.0;

  for (auto& f : families) out.checks.push_back(std::move(f).done());
  for (auto* f : {&quasi, &sandwich, &embedding, &rearrangement, &rearranged_norm, &head_tail}) {
    out.checks.push_back(std::move(*f).done());
  }
  return out;
}

}  // namespace humpforge
