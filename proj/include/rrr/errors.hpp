#pragma once

#include <stdexcept>
#include <string>

namespace rrr {

// Validation failures (bad inputs, violated preconditions). The CLI maps
// these to exit code 2.
struct NonFiniteInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateDesign : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadSubsampleSize : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsortedGrid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct FoldTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct TooFewSubsamples : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadSplit : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Runtime outcomes (well-formed inputs, no admissible answer). Exit code 1.
struct ZeroSpectrum : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AllScoresInfinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularCovariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSignal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No grid point reached the instability threshold. Carries the
/// argmin-instability grid point as an advisory fallback; the fallback is
/// never applied silently.
struct NoStableLambda : std::runtime_error {
  NoStableLambda(const std::string& what, double lambda, int index, int rank,
                 double instability)
      : std::runtime_error(what),
        fallback_lambda(lambda),
        fallback_index(index),
        fallback_rank(rank),
        min_instability(instability) {}

  double fallback_lambda;
  int fallback_index;
  int fallback_rank;
  double min_instability;
};

}  // namespace rrr
