#pragma once

#include "crwarp/immersion.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace crwarp {

// Built-in charts. Stable keys: chen_c2, chen_c3, product, cone.
//
//   chen_c2  F(z, t) = (z cos t, z sin t) into C^2, f = |z|, n1 = 2, n2 = 1
//   chen_c3  F(z, u) = z u, u in S^2 (theta, phi), into C^3, f = |z|,
//            n1 = 2, n2 = 2, unit-sphere fiber
//   product  C x R^2 in C^3, the R^2 on the real axes of slots 2 and 3, f = 1
//   cone     R+ x_rho S^2 on the real axes of C^3 (flat, not CR)
//
// Points are described by named parameters; for the z-based charts
// z = r e^{i arg}.

struct GalleryParameter {
  std::string name;
  double default_value = 0.0;
};

const std::vector<std::string>& gallery_keys();

/// Throws ConfigError for an unknown key.
ImmersionChart gallery_chart(std::string_view key);

std::vector<GalleryParameter> gallery_parameters(std::string_view key);

/// Chart coordinates for the given parameters (missing ones take their
/// defaults). Throws ConfigError for unknown parameter names.
std::vector<double> gallery_point(std::string_view key,
                                  const std::map<std::string, double>& params);

}  // namespace crwarp
