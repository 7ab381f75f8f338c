#pragma once

namespace crwarp {

/// Named tolerances shared by every check. Scenario files may override them.
struct Tolerances {
  double frame = 1e-10;     // orthonormality and CR residuals
  double identity = 1e-8;   // curvature identities on realizable data
  double exact = 1e-12;     // algebraic identities
  double opt = 1e-6;        // sampled plane minimization
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace crwarp
