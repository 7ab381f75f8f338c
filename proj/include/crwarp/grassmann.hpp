#pragma once

#include "crwarp/linalg.hpp"

#include <cstdint>
#include <functional>

namespace crwarp {

using PlaneFunctional = std::function<double(const PlaneSpec&)>;

struct PlaneSearchBudget {
  int samples = 4096;        // low-discrepancy orthonormal pairs
  int refine_sweeps = 200;   // coordinate-relaxation sweeps per start
  int polish_starts = 4;     // best samples handed to refinement
};

struct PlaneMinimum {
  double value = 0.0;
  PlaneSpec argmin;
};

/// Minimize `curv` over 2-planes inside span(subspace). For a 2-dimensional
/// subspace the single plane is returned exactly. Deterministic in `seed`.
///
/// Search: coordinate planes of the subspace basis plus scrambled-Halton
/// sampling of orthonormal pairs, then coordinate relaxation on the
/// Grassmannian. Each relaxation step rotates u or v towards one complement
/// direction w and minimizes along that circle with a three-point
/// a + b cos 2t + c sin 2t fit; this is exact for sectional curvatures of
/// algebraic curvature tensors and a monotone descent step otherwise.
/// A coordinate plane whose value ties the refined minimum (within 1e-12
/// relative) is returned with its exact basis vectors.
PlaneMinimum min_over_planes(const PlaneFunctional& curv, const Frame& subspace,
                             const PlaneSearchBudget& budget,
                             std::uint64_t seed);

}  // namespace crwarp
