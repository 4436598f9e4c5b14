#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "humpforge/humpbuilder.hpp"

namespace humpforge::detail {

// Accumulates one ConditionResult over many instances of lhs <= rhs.
class Family {
public:
  Family(std::string id, std::string description, ScaleClass cls) {
    r_.id = std::move(id);
    r_.description = std::move(description);
    r_.scale_class = cls;
  }

  void le(double lhs, double rhs, std::size_t at) {
    const double slack = rhs - lhs;
    const double tol = kCheckTol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    record(slack, slack >= -tol, at);
  }

  /// Exact predicate; margin 0 when it holds, `deficit` (< 0) otherwise.
  void exact(bool ok, std::size_t at, double deficit = -1.0) { record(ok ? 0.0 : deficit, ok, at); }

  ConditionResult done() && { return std::move(r_); }

private:
  void record(double margin, bool ok, std::size_t at) {
    r_.evaluated = true;
    ++r_.checks;
    if (!ok) {
      ++r_.violations;
      r_.passed = false;
    }
    if (margin < r_.worst_margin) {
      r_.worst_margin = margin;
      r_.worst_at = at;
    }
  }

  ConditionResult r_;
};

}  // namespace humpforge::detail
