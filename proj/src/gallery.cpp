#include "crwarp/gallery.hpp"

#include "crwarp/error.hpp"

#include <cmath>
#include <numbers>

namespace crwarp {

namespace {

void require_key(std::string_view key) {
  for (const auto& k : gallery_keys())
    if (k == key) return;
  throw ConfigError("gallery", "unknown gallery key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& gallery_keys() {
  static const std::vector<std::string> keys{"chen_c2", "chen_c3", "product", "cone"};
  return keys;
}

ImmersionChart gallery_chart(std::string_view key) {
  require_key(key);
  const double pi = std::numbers::pi;
  if (key == "chen_c2") {
    auto chart = make_chart("chen_c2", 2, 1, {"x", "y", "t"},
                            {"x*cos(t)", "y*cos(t)", "x*sin(t)", "y*sin(t)"},
                            "sqrt(x^2 + y^2)",
                            {{-1e6, -1e6, -2 * pi}, {1e6, 1e6, 2 * pi}});
    chart.base_curvature = 0.0;
    return chart;
  }
  if (key == "chen_c3") {
    const std::string u1 = "sin(theta)*cos(phi)";
    const std::string u2 = "sin(theta)*sin(phi)";
    const std::string u3 = "cos(theta)";
    auto chart = make_chart(
        "chen_c3", 2, 2, {"x", "y", "theta", "phi"},
        {"x*" + u1, "y*" + u1, "x*" + u2, "y*" + u2, "x*" + u3, "y*" + u3},
        "sqrt(x^2 + y^2)", {{-1e6, -1e6, 1e-3, -2 * pi}, {1e6, 1e6, pi - 1e-3, 2 * pi}});
    chart.base_curvature = 0.0;
    chart.fiber_curvature = 1.0;
    return chart;
  }
  if (key == "product") {
    auto chart = make_chart("product", 2, 2, {"x", "y", "s", "u"},
                            {"x", "y", "s", "0", "u", "0"}, std::nullopt);
    chart.base_curvature = 0.0;
    chart.fiber_curvature = 0.0;
    return chart;
  }
  auto chart = make_chart(
      "cone", 1, 2, {"rho", "theta", "phi"},
      {"rho*sin(theta)*cos(phi)", "0", "rho*sin(theta)*sin(phi)", "0", "rho*cos(theta)", "0"},
      "rho", {{1e-6, 1e-3, -2 * pi}, {1e6, pi - 1e-3, 2 * pi}}, false);
  chart.base_curvature = 0.0;
  chart.fiber_curvature = 1.0;
  return chart;
}

std::vector<GalleryParameter> gallery_parameters(std::string_view key) {
  require_key(key);
  const double half_pi = std::numbers::pi / 2;
  if (key == "chen_c2") return {{"r", 1.0}, {"arg", half_pi}, {"t", 0.0}};
  if (key == "chen_c3")
    return {{"r", 1.0}, {"arg", half_pi}, {"theta", half_pi}, {"phi", 0.0}};
  if (key == "product") return {{"x", 0.0}, {"y", 0.0}, {"s", 0.0}, {"u", 0.0}};
  return {{"rho", 1.0}, {"theta", half_pi}, {"phi", 0.0}};
}

std::vector<double> gallery_point(std::string_view key,
                                  const std::map<std::string, double>& params) {
  const auto declared = gallery_parameters(key);
  std::map<std::string, double> values;
  for (const auto& p : declared) values[p.name] = p.default_value;
  for (const auto& [name, value] : params) {
    auto it = values.find(name);
    if (it == values.end())
      throw ConfigError("grid." + name, "not a parameter of gallery '" +
                                            std::string(key) + "'");
    it->second = value;
  }
  if (key == "chen_c2" || key == "chen_c3") {
    const double r = values["r"];
    const double arg = values["arg"];
    std::vector<double> point{r * std::cos(arg), r * std::sin(arg)};
    if (key == "chen_c2") {
      point.push_back(values["t"]);
    } else {
      point.push_back(values["theta"]);
      point.push_back(values["phi"]);
    }
    return point;
  }
  std::vector<double> point;
  for (const auto& p : declared) point.push_back(values[p.name]);
  return point;
}

}  // namespace crwarp
