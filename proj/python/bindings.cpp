#include "crwarp/chen.hpp"
#include "crwarp/error.hpp"
#include "crwarp/expr.hpp"
#include "crwarp/gallery.hpp"
#include "crwarp/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace crwarp;

namespace {

// Reports cross the boundary as JSON text; the Python package decodes them.
std::string evaluate_gallery(const std::string& key, const std::map<std::string, double>& params,
                             std::optional<std::uint64_t> seed) {
  std::vector<std::pair<std::string, std::vector<double>>> grid;
  for (const auto& [k, v] : params) grid.push_back({k, {v}});
  return run_scenario(gallery_scenario(key, grid, seed)).report.dump();
}

std::string run_scenario_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario", std::string("invalid JSON: ") + e.what());
  }
  return run_scenario(parse_scenario(doc)).report.dump();
}

py::tuple values(const InequalityValues& v) { return py::make_tuple(v.lhs, v.rhs, v.slack); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CR-warped product inequality checks";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParityError>(m, "ParityError", base.ptr());
  py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());

  m.attr("REPORT_SCHEMA") = kReportSchema;

  m.def("gallery_keys", &gallery_keys);
  m.def("gallery_parameters", [](const std::string& key) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& p : gallery_parameters(key)) out.emplace_back(p.name, p.default_value);
    return out;
  });
  m.def("evaluate_gallery", &evaluate_gallery, py::arg("key"), py::arg("params") = std::map<std::string, double>{},
        py::arg("seed") = py::none());
  m.def("run_scenario", &run_scenario_text, py::arg("scenario_json"));
  m.def("lemma_suite", [](std::uint64_t seed, int count) { return run_lemma_suite(seed, count).document.dump(); },
        py::arg("seed") = 1, py::arg("count") = 1000);

  m.def("coeff_identities", [](int n1, int n2) {
    const auto c = coeff_identities(n1, n2);
    return py::make_tuple(c.lhs_i, c.rhs_i, c.lhs_ii, c.rhs_ii);
  });
  m.def("tilde_tau_cr", [](int n1, int n2, double c) {
    const auto t = tilde_tau_cr(n1, n2, c);
    return py::make_tuple(t.total, t.nt, t.nperp);
  });
  m.def(
      "inequality_i",
      [](int n1, int n2, double c, double h_mean_norm_sq, double warp_term, double delta_hat, double kmin) {
        return values(inequality_i({n1, n2, c, h_mean_norm_sq, warp_term, delta_hat}, kmin));
      },
      py::arg("n1"), py::arg("n2"), py::arg("c"), py::arg("h_mean_norm_sq"), py::arg("warp_term"),
      py::arg("delta_hat"), py::arg("kmin"));
  m.def(
      "inequality_ii",
      [](int n1, int n2, double c, double h_mean_norm_sq, double warp_term, double delta_hat) {
        return values(inequality_ii({n1, n2, c, h_mean_norm_sq, warp_term, delta_hat}, std::nullopt).leafwise);
      },
      py::arg("n1"), py::arg("n2"), py::arg("c"), py::arg("h_mean_norm_sq"), py::arg("warp_term"),
      py::arg("delta_hat"));
  m.def("chen_original", [](double tau, double h_mean_norm_sq, int n, double c, double kmin) {
    return values(chen_original(tau, h_mean_norm_sq, n, c, kmin));
  });
  m.def("lemma1_check", [](const std::vector<double>& alpha, double beta) {
    const auto r = lemma1_check(alpha, beta);
    return py::make_tuple(r.slack, r.constraint_residual, r.equality);
  });
  m.def(
      "eval_expr",
      [](const std::string& source, const std::vector<std::string>& variables, const std::vector<double>& point) {
        if (point.size() != variables.size()) throw DimensionMismatch("point and variables differ in length");
        return dsl::eval(dsl::parse(source, variables), std::span<const double>(point));
      },
      py::arg("source"), py::arg("variables") = std::vector<std::string>{},
      py::arg("point") = std::vector<double>{});
}
