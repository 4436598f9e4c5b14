#pragma once

#include <stdexcept>
#include <string>

namespace humpforge {

/// Malformed interchange file or basis input.
class InputFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The subspace has no nonzero vector vanishing on the requested head.
class NoTailVector : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A construction stage produced an empty hump, so b_k is undefined.
class DegenerateStage : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A freshly built stage failed one of its defining conditions.
class ConstructionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace humpforge
