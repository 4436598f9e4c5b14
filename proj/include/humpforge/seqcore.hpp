#pragma once

#include <vector>

#include "humpforge/sparse_seq.hpp"

namespace humpforge {

/// Summability exponent 1 < p < infinity.
class Exponent {
public:
  /// Throws std::invalid_argument unless 1 < p < infinity.
  explicit Exponent(double p);

  [[nodiscard]] double value() const noexcept { return p_; }
  [[nodiscard]] double inverse() const noexcept { return 1.0 / p_; }
  /// p' = p / (p - 1)
  [[nodiscard]] double conjugate() const noexcept { return p_ / (p_ - 1.0); }

  friend bool operator==(const Exponent&, const Exponent&) = default;

private:
  double p_;
};

/// Non-increasing rearrangement a*(1) >= a*(2) >= ... of the moduli on the
/// support. Index 0 of `values` holds a*(1), the largest modulus.
struct RearrangedProfile {
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  /// 1-based access, a*(j) = 0 beyond the support.
  [[nodiscard]] double operator()(std::size_t j) const noexcept {
    return (j >= 1 && j <= values.size()) ? values[j - 1] : 0.0;
  }
  friend bool operator==(const RearrangedProfile&, const RearrangedProfile&) = default;
};

/// Distribution function: #{i : |u(i)| > lambda}. Throws for lambda <= 0.
std::size_t dist_func(const SparseSeq& u, double lambda);

RearrangedProfile decreasing_rearrangement(const SparseSeq& u);

/// Places u* back on supp u in increasing index order.
SparseSeq rearrangement_on_support(const SparseSeq& u);

double lp_norm(const SparseSeq& u, Exponent p);
/// sup_j j^{1/p} u*(j)
double weak_lp_quasinorm(const SparseSeq& u, Exponent p);
/// Discrete maximal norm sup_n n^{1/p - 1} sum_{j<=n} u*(j); a genuine norm
/// with weak <= equiv <= p' * weak.
double weak_lp_norm_equiv(const SparseSeq& u, Exponent p);

/// Same quantities evaluated on an already rearranged profile.
double lp_norm(const RearrangedProfile& profile, Exponent p);
double weak_lp_quasinorm(const RearrangedProfile& profile, Exponent p);
double weak_lp_norm_equiv(const RearrangedProfile& profile, Exponent p);

/// Coordinates 1..m.
SparseSeq head(const SparseSeq& u, Index m);
/// Coordinates m+1, m+2, ...
SparseSeq tail(const SparseSeq& u, Index m);

/// Norm of the inclusion l_p -> l_{p,inf}. Equal to 1 for every p: for
/// ||a||_p <= 1 we have j (a*(j))^p <= sum_{i<=j} (a*(i))^p <= 1, with
/// equality at e_1.
double embedding_constant(Exponent p);

}  // namespace humpforge
