#include "crwarp/scenario.hpp"

#include "crwarp/error.hpp"
#include "crwarp/gallery.hpp"
#include "crwarp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace crwarp {

namespace {

// ---- parsing helpers -------------------------------------------------------

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(path.empty() ? key : path + "." + key, "missing");
  return obj.at(key);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string join(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "not finite");
  return x;
}

int as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], join(path, i)));
  return out;
}

Mat as_matrix(const Json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows)
    throw ConfigError(path, "expected " + std::to_string(rows) + " rows");
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = as_vector(v[static_cast<std::size_t>(i)], join(path, static_cast<std::size_t>(i)));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(join(path, static_cast<std::size_t>(i)),
                        "expected " + std::to_string(cols) + " entries");
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = row[static_cast<std::size_t>(j)];
  }
  return out;
}

// A grid axis is a list of values or {"from", "to", "count"}.
std::vector<double> grid_axis(const Json& v, const std::string& path) {
  if (v.is_array()) {
    auto values = as_vector(v, path);
    if (values.empty()) throw ConfigError(path, "empty axis");
    return values;
  }
  if (v.is_number()) return {as_double(v, path)};
  if (!v.is_object()) throw ConfigError(path, "expected a list or {from, to, count}");
  const double from = as_double(require(v, "from", path), join(path, "from"));
  const double to = as_double(require(v, "to", path), join(path, "to"));
  const int count = as_int(require(v, "count", path), join(path, "count"));
  if (count < 1) throw ConfigError(join(path, "count"), "must be >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
  return out;
}

std::vector<std::map<std::string, double>> cartesian(
    const std::vector<std::pair<std::string, std::vector<double>>>& axes,
    const std::string& path) {
  std::size_t total = 1;
  for (const auto& [name, values] : axes) {
    total *= values.size();
    if (total > kMaxGridPoints)
      throw ConfigError(path, "grid exceeds " + std::to_string(kMaxGridPoints) + " points");
  }
  std::vector<std::map<std::string, double>> out(1);
  for (const auto& [name, values] : axes) {
    std::vector<std::map<std::string, double>> next;
    next.reserve(out.size() * values.size());
    for (const auto& partial : out)
      for (double v : values) {
        auto p = partial;
        p[name] = v;
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<double>>> parse_grid(const Json& grid,
                                                                    const std::string& path) {
  if (!grid.is_object()) throw ConfigError(path, "expected an object of axes");
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const auto& [name, axis] : grid.items()) axes.emplace_back(name, grid_axis(axis, join(path, name)));
  return axes;
}

Tolerances parse_tolerances(const Json& doc) {
  Tolerances tol;
  if (!doc.contains("tolerances")) return tol;
  const Json& t = doc.at("tolerances");
  if (!t.is_object()) throw ConfigError("tolerances", "expected an object");
  for (const auto& [key, value] : t.items()) {
    const std::string path = "tolerances." + key;
    const double x = as_double(value, path);
    if (!(x > 0.0)) throw ConfigError(path, "must be positive");
    if (key == "frame") tol.frame = x;
    else if (key == "identity") tol.identity = x;
    else if (key == "exact") tol.exact = x;
    else if (key == "opt") tol.opt = x;
    else throw ConfigError(path, "unknown tolerance (frame, identity, exact, opt)");
  }
  return tol;
}

PlaneSearchBudget parse_budget(const Json& doc) {
  PlaneSearchBudget b;
  if (!doc.contains("budget")) return b;
  const Json& j = doc.at("budget");
  if (!j.is_object()) throw ConfigError("budget", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "budget." + key;
    const int x = as_int(value, path);
    if (x < 0 || x > 1000000) throw ConfigError(path, "out of range");
    if (key == "samples") b.samples = x;
    else if (key == "refine_sweeps") b.refine_sweeps = x;
    else if (key == "polish_starts") b.polish_starts = std::max(1, x);
    else throw ConfigError(path, "unknown budget field (samples, refine_sweeps, polish_starts)");
  }
  return b;
}

ImmersionChart parse_chart(const Json& c, const std::string& path) {
  const int n1 = as_int(require(c, "n1", path), join(path, "n1"));
  const int n2 = as_int(require(c, "n2", path), join(path, "n2"));
  const Json& coords = require(c, "coordinates", path);
  if (!coords.is_array()) throw ConfigError(join(path, "coordinates"), "expected an array of names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < coords.size(); ++i)
    names.push_back(as_string(coords[i], join(join(path, "coordinates"), i)));
  const Json& comps = require(c, "components", path);
  if (!comps.is_array()) throw ConfigError(join(path, "components"), "expected an array of expressions");
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < comps.size(); ++i)
    sources.push_back(as_string(comps[i], join(join(path, "components"), i)));
  std::optional<std::string> warp;
  if (c.contains("warp")) warp = as_string(c.at("warp"), join(path, "warp"));
  CoordinateBox box;
  if (c.contains("domain")) {
    const Json& d = c.at("domain");
    const std::string dp = join(path, "domain");
    box.lower = as_vector(require(d, "lower", dp), join(dp, "lower"));
    box.upper = as_vector(require(d, "upper", dp), join(dp, "upper"));
    if (box.lower.size() != names.size() || box.upper.size() != names.size())
      throw ConfigError(dp, "bounds must list every coordinate");
  }
  const bool cr = c.contains("cr") ? c.at("cr").get<bool>() : true;
  try {
    auto chart = make_chart(c.value("name", std::string("custom")), n1, n2, names, sources, warp,
                            box, cr);
    if (c.contains("base_curvature"))
      chart.base_curvature = as_double(c.at("base_curvature"), join(path, "base_curvature"));
    if (c.contains("fiber_curvature"))
      chart.fiber_curvature = as_double(c.at("fiber_curvature"), join(path, "fiber_curvature"));
    return chart;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

SyntheticPayload parse_synthetic(const Json& doc) {
  const std::string path = "synthetic";
  const Json& s = require(doc, "synthetic", "");
  SyntheticPayload p;
  p.n1 = as_int(require(s, "n1", path), "synthetic.n1");
  p.n2 = as_int(require(s, "n2", path), "synthetic.n2");
  if (p.n1 < 0 || p.n2 < 0) throw ConfigError("synthetic", "dimensions must be non-negative");
  if (p.n1 % 2 != 0) throw ConfigError("synthetic.n1", "must be even");
  const Json& amb = require(doc, "ambient", "");
  p.c = as_double(require(amb, "c", "ambient"), "ambient.c");
  p.m = as_int(require(amb, "m", "ambient"), "ambient.m");
  const int n = p.n1 + p.n2;
  const int normals = 2 * p.m - n;
  if (normals < 0) throw ConfigError("ambient.m", "2m must be at least n1 + n2");
  const Json& h = require(s, "h", path);
  if (h.is_string() && h.get<std::string>() == "zero") {
    p.h.assign(static_cast<std::size_t>(normals), Mat::Zero(n, n));
  } else {
    if (!h.is_array() || static_cast<int>(h.size()) != normals)
      throw ConfigError("synthetic.h", "expected 2m - n = " + std::to_string(normals) +
                                           " slices (or \"zero\")");
    for (std::size_t r = 0; r < h.size(); ++r) {
      Mat slice = as_matrix(h[r], join("synthetic.h", r), n, n);
      if ((slice - slice.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw ConfigError(join("synthetic.h", r), "slice is not symmetric");
      p.h.push_back(std::move(slice));
    }
  }
  if (s.contains("tangent")) {
    const Json& t = s.at("tangent");
    if (t.is_string()) {
      const auto layout = t.get<std::string>();
      if (layout == "split") p.split_dt = true;
      else if (layout != "paired") throw ConfigError("synthetic.tangent", "expected \"paired\", \"split\" or columns");
    } else {
      // n columns, each a 2m-vector.
      p.tangent = as_matrix(t, "synthetic.tangent", n, 2 * p.m).transpose();
    }
  }
  if (s.contains("warp")) {
    const Json& w = s.at("warp");
    WarpData wd;
    wd.f = as_double(require(w, "f", "synthetic.warp"), "synthetic.warp.f");
    if (!(wd.f > 0.0)) throw ConfigError("synthetic.warp.f", "must be positive");
    wd.laplacian_f = as_double(require(w, "laplacian_f", "synthetic.warp"), "synthetic.warp.laplacian_f");
    if (w.contains("grad_f")) {
      const auto g = as_vector(w.at("grad_f"), "synthetic.warp.grad_f");
      wd.grad_f = Eigen::Map<const Vec>(g.data(), static_cast<Eigen::Index>(g.size()));
      wd.grad_norm_sq = wd.grad_f.squaredNorm();
    } else {
      wd.grad_norm_sq = as_double(require(w, "grad_norm_sq", "synthetic.warp"), "synthetic.warp.grad_norm_sq");
      wd.grad_f = Vec::Zero(0);
    }
    p.warp = wd;
  }
  if (s.contains("base_curvature")) p.base_curvature = as_double(s.at("base_curvature"), "synthetic.base_curvature");
  if (s.contains("fiber_curvature")) p.fiber_curvature = as_double(s.at("fiber_curvature"), "synthetic.fiber_curvature");
  return p;
}

bool needs_sampling(int n1, int n2) { return n1 >= 3 || n2 >= 3; }

// ---- report helpers --------------------------------------------------------

Json tolerances_json(const Tolerances& t) {
  return Json{{"frame", t.frame}, {"identity", t.identity}, {"exact", t.exact}, {"opt", t.opt}};
}

template <typename T>
void put(Json& obj, const char* key, const std::optional<T>& value) {
  if (value) obj[key] = *value;
}

std::string slack_status(double slack, double tol) {
  if (slack < -tol) return "fail";
  if (slack < 0.0) return "boundary";
  return "pass";
}

Json equality_json(const EqualityClassification& e) {
  Json j;
  j["is_equality"] = e.is_equality;
  j["mixed_tg"] = e.mixed_tg;
  j["dt_minimal"] = e.dt_minimal;
  j["dperp_minimal"] = e.dperp_minimal;
  j["lemma1_equality"] = e.lemma1_equality;
  j["ambient_minimum"] = e.ambient_minimum;
  j["mu1"] = e.mu1;
  Json measures = Json::object();
  for (const auto& [name, value] : e.measures) measures[name] = value;
  j["measures"] = measures;
  Json violations = Json::array();
  for (const auto& [name, value] : e.violations)
    violations.push_back(Json{{"condition", name}, {"magnitude", value}});
  j["violations"] = violations;
  return j;
}

struct RecordOutcome {
  Json record;
  bool failed = false;
  bool boundary = false;
};

RecordOutcome build_record(const ExtrinsicPoint& point, const EvaluationOptions& options) {
  const Tolerances& tol = options.tol;
  const InvariantReport rep = evaluate_point(point, options);
  RecordOutcome out;
  Json failures = Json::array();
  auto fail_if = [&](bool bad, const std::string& what) {
    if (bad) failures.push_back(what);
  };

  Json inv;
  inv["n1"] = rep.n1;
  inv["n2"] = rep.n2;
  inv["n"] = rep.n;
  inv["c"] = rep.c;
  inv["cr"] = rep.cr;
  inv["tau_M"] = rep.tau_m;
  inv["tau_NT"] = rep.tau_nt;
  inv["tau_Nperp"] = rep.tau_nperp;
  inv["mixed_sum"] = rep.mixed_sum;
  inv["h_norm_sq"] = rep.h_norm_sq;
  inv["H_norm_sq"] = rep.h_mean_norm_sq;
  if (rep.tilde_tau)
    inv["tilde_tau"] = Json{{"total", rep.tilde_tau->total},
                            {"nt", rep.tilde_tau->nt},
                            {"nperp", rep.tilde_tau->nperp}};
  put(inv, "fundamental_identity_residual", rep.fundamental_identity);
  if (rep.warp)
    inv["warp"] = Json{{"f", rep.warp->f},
                       {"grad_norm_sq", rep.warp->grad_norm_sq},
                       {"laplacian_f", rep.warp->laplacian_f},
                       {"sign_convention", "geometer: Delta = -div grad"}};
  inv["warp_term"] = rep.warp_term;
  inv["warp_term_source"] = rep.warp_term_source;
  put(inv, "warp_identity_residual", rep.warp_identity);
  put(inv, "fiber_bo_residual", rep.fiber_bo_residual);
  put(inv, "leaf_geodesy_residual", rep.leaf_geodesy_residual);
  put(inv, "delta_NT_intrinsic", rep.delta_nt_intrinsic);
  put(inv, "delta_Nperp_intrinsic", rep.delta_nperp_intrinsic);
  put(inv, "delta_transfer_residual", rep.delta_nperp_transfer_residual);
  inv["ricci_max_eig"] = rep.ricci_max_eig;

  auto over = [&](const std::optional<double>& v) { return v && !(*v <= tol.identity); };
  fail_if(over(rep.fundamental_identity), "fundamental identity");
  fail_if(over(rep.warp_identity), "warp identity");
  fail_if(over(rep.fiber_bo_residual), "Bishop-O'Neill fiber curvature");
  fail_if(over(rep.leaf_geodesy_residual), "leaf total geodesy");
  fail_if(over(rep.delta_nperp_transfer_residual), "delta transfer");

  Json record;
  record["tolerances"] = tolerances_json(tol);
  record["invariants"] = inv;

  for (const auto* vr : {&rep.version_i, &rep.version_ii}) {
    if (!*vr) continue;
    const VersionReport& v = **vr;
    const std::string tag = to_string(v.version);
    const double scale = std::max(1.0, std::abs(v.inequality.rhs) + std::abs(v.inequality.lhs));
    Json j;
    j["version"] = tag;
    j["lhs"] = v.inequality.lhs;
    j["rhs"] = v.inequality.rhs;
    j["slack"] = v.inequality.slack;
    const std::string status = slack_status(v.inequality.slack, tol.identity);
    j["status"] = status;
    j["delta_hat"] = v.delta_hat;
    j["tau_factor"] = v.tau_factor;
    j["kmin"] = v.kmin;
    j["kmin_source"] = v.kmin_source;
    j["kmin_sampled"] = v.kmin_sampled;
    j["kmin_mismatch"] = std::abs(v.kmin - v.kmin_sampled) > tol.opt;
    j["ambient_pi_star"] = v.ambient_pi_star;
    j["theta"] = v.theta;
    j["theta_groups"] = v.theta_groups;
    if (v.version == Version::kII) j["theta_construction"] = "mirrored";
    j["upsilon"] = v.upsilon;
    j["upsilon_closure_residual"] = v.upsilon_closure;
    j["lemma1"] = Json{{"slack", v.lemma1.slack},
                       {"constraint_residual", v.lemma1.constraint_residual},
                       {"equality", v.lemma1.equality}};
    j["chain_residual"] = v.chain_residual;
    if (v.intrinsic) {
      const std::string istatus = slack_status(v.intrinsic->slack, tol.identity);
      j["intrinsic"] = Json{{"lhs", v.intrinsic->lhs},
                            {"rhs", v.intrinsic->rhs},
                            {"slack", v.intrinsic->slack},
                            {"status", istatus}};
      fail_if(istatus == "fail", "inequality (" + tag + ") intrinsic");
      if (istatus == "boundary") out.boundary = true;
    }
    fail_if(status == "fail", "inequality (" + tag + ")");
    if (status == "boundary") out.boundary = true;
    fail_if(v.theta < -tol.exact, "theta (" + tag + ") negative");
    fail_if(!(v.chain_residual <= tol.identity * scale), "slack chain (" + tag + ")");
    fail_if(!(v.upsilon_closure <= tol.identity * std::max(1.0, v.theta + rep.h_norm_sq)),
            "upsilon closure (" + tag + ")");
    record["inequality_" + tag] = j;
    record["equality_" + tag] = equality_json(v.equality);
  }

  const CorollaryCheck cor = corollary_minimal_check(rep, tol.identity);
  Json cj;
  if (rep.version_i) cj["cond_i"] = cor.cond_i;
  put(cj, "cond_ii", cor.cond_ii);
  put(cj, "cond_ii_intrinsic", cor.cond_ii_intrinsic);
  cj["ricci_max_eig"] = cor.ricci_max_eig;
  cj["not_minimal"] = cor.not_minimal;
  record["corollary"] = cj;
  if (!cor.not_minimal) {
    auto bad = [&](const std::optional<double>& v) { return v && *v > tol.identity; };
    fail_if(rep.version_i && cor.cond_i > tol.identity, "minimality condition (i)");
    fail_if(bad(cor.cond_ii), "minimality condition (ii)");
    fail_if(bad(cor.cond_ii_intrinsic), "minimality condition (ii) intrinsic");
    fail_if(rep.c == 0.0 && cor.ricci_max_eig > tol.identity, "Ricci negative semi-definite");
  }

  out.failed = !failures.empty();
  Json head;
  head["status"] = out.failed ? "fail" : (out.boundary ? "boundary" : "pass");
  head["failures"] = failures;
  for (const auto& [k, v] : record.items()) head[k] = v;
  out.record = std::move(head);
  return out;
}

Json lemma_profile_json(int n1, int n2, double value) {
  return Json{{"n1", n1}, {"n2", n2}, {"max_residual", value}};
}

SecondFundamentalForm random_h(Rng& rng, int n, int normals) {
  std::vector<Mat> slices(static_cast<std::size_t>(normals), Mat::Zero(n, n));
  for (auto& s : slices)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) s(i, j) = s(j, i) = rng.normal();
  return {n, std::move(slices)};
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario parse_scenario(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario", "expected a JSON object");
  Scenario s;
  s.name = doc.value("name", std::string("scenario"));
  const std::string mode = as_string(require(doc, "mode", ""), "mode");
  if (mode == "immersion") s.mode = ScenarioMode::kImmersion;
  else if (mode == "synthetic") s.mode = ScenarioMode::kSynthetic;
  else if (mode == "lemmas") s.mode = ScenarioMode::kLemmas;
  else throw ConfigError("mode", "expected immersion, synthetic or lemmas");
  s.tol = parse_tolerances(doc);
  s.budget = parse_budget(doc);
  if (doc.contains("seed")) {
    const Json& seed = doc.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      throw ConfigError("seed", "expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
  }

  if (s.mode == ScenarioMode::kLemmas) {
    if (!s.seed) throw ConfigError("seed", "required for the lemma suite");
    if (doc.contains("count")) s.lemma_count = as_int(doc.at("count"), "count");
    if (s.lemma_count < 1 || s.lemma_count > 1000000) throw ConfigError("count", "must be in [1, 1e6]");
    return s;
  }

  if (s.mode == ScenarioMode::kSynthetic) {
    s.synthetic = parse_synthetic(doc);
    if (!s.seed && needs_sampling(s.synthetic->n1, s.synthetic->n2))
      throw ConfigError("seed", "required: a factor of dimension >= 3 needs sampled plane minimization");
    return s;
  }

  const Json& chart = require(doc, "chart", "");
  if (chart.contains("gallery")) {
    const std::string key = as_string(chart.at("gallery"), "chart.gallery");
    const auto& keys = gallery_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("chart.gallery", "unknown gallery key '" + key + "'");
    s.gallery_key = key;
    s.chart = gallery_chart(key);
  } else {
    s.chart = parse_chart(chart, "chart");
  }
  if (doc.contains("ambient")) {
    const Json& amb = doc.at("ambient");
    if (amb.contains("c") && as_double(amb.at("c"), "ambient.c") != 0.0)
      throw ConfigError("ambient.c", "immersion mode supports the flat ambient c = 0 only");
    if (amb.contains("m") && as_int(amb.at("m"), "ambient.m") != s.chart->m())
      throw ConfigError("ambient.m", "does not match the chart's component count");
  }

  const bool has_grid = doc.contains("grid");
  const bool has_points = doc.contains("points");
  if (has_grid == has_points) throw ConfigError("points", "give exactly one of points or grid");
  if (has_grid) {
    const auto axes = parse_grid(doc.at("grid"), "grid");
    for (const auto& params : cartesian(axes, "grid")) {
      if (s.gallery_key) {
        try {
          s.points.push_back(gallery_point(*s.gallery_key, params));
        } catch (const ConfigError&) {
          throw;
        }
        s.point_parameters.push_back(params);
      } else {
        std::vector<double> pt;
        for (const auto& name : s.chart->coordinates) {
          auto it = params.find(name);
          if (it == params.end()) throw ConfigError("grid." + name, "missing axis for coordinate");
          pt.push_back(it->second);
        }
        if (params.size() != s.chart->coordinates.size())
          throw ConfigError("grid", "axes must be exactly the chart coordinates");
        s.points.push_back(std::move(pt));
      }
    }
  } else {
    const Json& pts = doc.at("points");
    if (!pts.is_array() || pts.empty()) throw ConfigError("points", "expected a non-empty array");
    if (pts.size() > kMaxGridPoints) throw ConfigError("points", "too many points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string path = join("points", i);
      if (pts[i].is_object() && s.gallery_key) {
        std::map<std::string, double> params;
        for (const auto& [k, v] : pts[i].items()) params[k] = as_double(v, join(path, k));
        s.points.push_back(gallery_point(*s.gallery_key, params));
        s.point_parameters.push_back(params);
      } else {
        auto pt = as_vector(pts[i], path);
        if (static_cast<int>(pt.size()) != s.chart->n())
          throw ConfigError(path, "expected " + std::to_string(s.chart->n()) + " coordinates");
        s.points.push_back(std::move(pt));
        if (s.gallery_key) s.point_parameters.emplace_back();
      }
    }
  }
  if (!s.seed && needs_sampling(s.chart->n1, s.chart->n2))
    throw ConfigError("seed", "required: a factor of dimension >= 3 needs sampled plane minimization");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario", std::string("invalid JSON: ") + e.what());
  }
  Scenario s = parse_scenario(doc);
  if (!doc.contains("name")) s.name = path.filename().string();
  return s;
}

Scenario gallery_scenario(const std::string& key,
                          const std::vector<std::pair<std::string, std::vector<double>>>& grid,
                          std::optional<std::uint64_t> seed) {
  Json doc;
  doc["name"] = "gallery:" + key;
  doc["mode"] = "immersion";
  doc["chart"] = Json{{"gallery", key}};
  if (seed) doc["seed"] = *seed;
  Json g = Json::object();
  for (const auto& [name, values] : grid) g[name] = values;
  if (grid.empty()) {
    doc["points"] = Json::array({Json::object()});
  } else {
    doc["grid"] = g;
  }
  return parse_scenario(doc);
}

ScenarioResult run_scenario(const Scenario& scenario) {
  ScenarioResult result;
  Json report;
  report["schema"] = kReportSchema;
  report["scenario"] = scenario.name;
  report["mode"] = scenario.mode == ScenarioMode::kImmersion
                       ? "immersion"
                       : (scenario.mode == ScenarioMode::kSynthetic ? "synthetic" : "lemmas");
  if (scenario.gallery_key) report["gallery"] = *scenario.gallery_key;
  report["tolerances"] = tolerances_json(scenario.tol);
  if (scenario.seed) report["seed"] = *scenario.seed;
  report["sign_convention"] = "Delta = -div grad (geometer's sign)";

  Json records = Json::array();
  if (scenario.mode == ScenarioMode::kLemmas) {
    const auto summary = run_lemma_suite(*scenario.seed, scenario.lemma_count, scenario.tol);
    Json rec;
    rec["index"] = 0;
    rec["status"] = summary.ok ? "pass" : "fail";
    rec["lemmas"] = summary.document;
    records.push_back(rec);
    result.records = 1;
    result.failures = summary.ok ? 0 : 1;
  } else {
    EvaluationOptions options;
    options.tol = scenario.tol;
    options.budget = scenario.budget;
    options.seed = scenario.seed.value_or(1);

    auto consume = [&](std::size_t index, const Json& label, const auto& make_point) {
      Json rec;
      rec["index"] = index;
      for (const auto& [k, v] : label.items()) rec[k] = v;
      try {
        const ExtrinsicPoint point = make_point();
        RecordOutcome outcome = build_record(point, options);
        for (const auto& [k, v] : outcome.record.items()) rec[k] = v;
        if (outcome.failed) ++result.failures;
        else if (outcome.boundary) ++result.boundary;
      } catch (const Error& e) {
        rec["status"] = "error";
        rec["error"] = e.what();
        ++result.failures;
      }
      records.push_back(std::move(rec));
      ++result.records;
    };

    if (scenario.mode == ScenarioMode::kSynthetic) {
      const SyntheticPayload& p = *scenario.synthetic;
      consume(0, Json::object(), [&] {
        const Mat tangent = p.tangent ? *p.tangent : default_tangent_embedding(p.n1, p.n2, p.m, p.split_dt);
        ExtrinsicPoint pt = synthetic_point(p.n1, p.n2, p.c, p.m,
                                            SecondFundamentalForm(p.n1 + p.n2, p.h), tangent, p.warp);
        pt.base_curvature = p.base_curvature;
        pt.fiber_curvature = p.fiber_curvature;
        return pt;
      });
    } else {
      for (std::size_t i = 0; i < scenario.points.size(); ++i) {
        Json label;
        if (i < scenario.point_parameters.size() && !scenario.point_parameters[i].empty()) {
          Json params = Json::object();
          for (const auto& [k, v] : scenario.point_parameters[i]) params[k] = v;
          label["parameters"] = params;
        }
        label["point"] = scenario.points[i];
        consume(i, label, [&] {
          return extrinsic_point(*scenario.chart, scenario.points[i], scenario.tol);
        });
      }
    }
  }
  report["records"] = records;
  report["summary"] = Json{{"records", result.records},
                           {"failures", result.failures},
                           {"boundary", result.boundary},
                           {"ok", result.ok()}};
  result.report = std::move(report);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(const Json& v) {
  if (v.is_null()) return "-";
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

Json dig(const Json& j, std::initializer_list<const char*> path) {
  const Json* cur = &j;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &cur->at(key);
  }
  return *cur;
}

std::string label(const Json& rec) {
  if (rec.contains("parameters")) {
    std::string out;
    for (const auto& [k, v] : rec.at("parameters").items())
      out += (out.empty() ? "" : " ") + k + "=" + fmt(v);
    return out;
  }
  if (rec.contains("point")) {
    std::string out;
    for (const auto& v : rec.at("point")) out += (out.empty() ? "" : ",") + fmt(v);
    return "(" + out + ")";
  }
  return "-";
}

}  // namespace

std::string format_table(const Json& report) {
  const std::vector<std::string> head{"#",       "status",  "point",   "fund.id", "warp.id",
                                      "lhs_i",   "rhs_i",   "slack_i", "lhs_ii",  "rhs_ii",
                                      "slack_ii", "theta_i", "chain_i", "eq_i"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& rec : report.value("records", Json::array())) {
    if (rec.contains("lemmas")) {
      rows.push_back({fmt(rec["index"]), fmt(rec["status"]), "lemma suite"});
      continue;
    }
    rows.push_back({
        fmt(rec["index"]),
        fmt(rec.value("status", Json())),
        label(rec),
        fmt(dig(rec, {"invariants", "fundamental_identity_residual"})),
        fmt(dig(rec, {"invariants", "warp_identity_residual"})),
        fmt(dig(rec, {"inequality_i", "lhs"})),
        fmt(dig(rec, {"inequality_i", "rhs"})),
        fmt(dig(rec, {"inequality_i", "slack"})),
        fmt(dig(rec, {"inequality_ii", "lhs"})),
        fmt(dig(rec, {"inequality_ii", "rhs"})),
        fmt(dig(rec, {"inequality_ii", "slack"})),
        fmt(dig(rec, {"inequality_i", "theta"})),
        fmt(dig(rec, {"inequality_i", "chain_residual"})),
        fmt(dig(rec, {"equality_i", "is_equality"})),
    });
    if (rec.contains("error")) rows.back().push_back(fmt(rec["error"]));
  }
  std::vector<std::size_t> width(head.size() + 1, 0);
  for (std::size_t c = 0; c < head.size(); ++c) width[c] = head[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c)
      width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  os << "# " << fmt(report.value("scenario", Json())) << "  schema " << fmt(report.value("schema", Json()))
     << "  (" << fmt(report.value("sign_convention", Json())) << ")\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      os << cells[c];
      if (c + 1 < cells.size()) os << std::string(width[c] - cells[c].size() + 2, ' ');
    }
    os << '\n';
  };
  line(head);
  for (const auto& r : rows) line(r);
  const Json summary = report.value("summary", Json::object());
  os << "records " << fmt(summary.value("records", Json())) << ", failures "
     << fmt(summary.value("failures", Json())) << ", boundary "
     << fmt(summary.value("boundary", Json())) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

LemmaSuiteSummary run_lemma_suite(std::uint64_t seed, int count, const Tolerances& tol) {
  if (count < 1) throw ConfigError("count", "must be >= 1");
  Rng rng(seed);
  LemmaSuiteSummary out;
  bool ok = true;

  // Lemma 1: random alphas, beta solved from the constraint.
  double min_slack = INFINITY;
  double max_constraint = 0.0;
  int false_equalities = 0;
  for (int i = 0; i < count; ++i) {
    const int n = 2 + static_cast<int>(rng.next() % 7);
    std::vector<double> alpha(static_cast<std::size_t>(n));
    for (auto& a : alpha) a = rng.normal();
    double sum = 0.0, sum_sq = 0.0;
    for (double a : alpha) {
      sum += a;
      sum_sq += a * a;
    }
    const double beta = sum * sum / (n - 1) - sum_sq;
    const auto r = lemma1_check(alpha, beta, tol.exact);
    min_slack = std::min(min_slack, r.slack);
    max_constraint = std::max(max_constraint, r.constraint_residual);
    if (n > 2 && r.equality) ++false_equalities;
  }
  // Equality family: alpha_1 + alpha_2 = alpha_3 = ... = alpha_n.
  int detected = 0;
  double family_max_slack = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = 2 + static_cast<int>(rng.next() % 7);
    std::vector<double> alpha(static_cast<std::size_t>(n));
    alpha[0] = rng.normal();
    alpha[1] = rng.normal();
    for (int a = 2; a < n; ++a) alpha[static_cast<std::size_t>(a)] = alpha[0] + alpha[1];
    double sum = 0.0, sum_sq = 0.0;
    for (double a : alpha) {
      sum += a;
      sum_sq += a * a;
    }
    const double beta = sum * sum / (n - 1) - sum_sq;
    const auto r = lemma1_check(alpha, beta, tol.exact);
    if (r.equality) ++detected;
    family_max_slack = std::max(family_max_slack, std::abs(r.slack));
  }
  const bool lemma1_ok = min_slack >= -tol.exact && detected == count && false_equalities == 0 &&
                         family_max_slack <= tol.exact;
  ok = ok && lemma1_ok;

  Json lemma1;
  lemma1["instances"] = count;
  lemma1["min_slack"] = min_slack;
  lemma1["max_constraint_residual"] = max_constraint;
  lemma1["false_equalities"] = false_equalities;
  lemma1["equality_family"] = Json{{"instances", count},
                                   {"detected", detected},
                                   {"max_abs_slack", family_max_slack}};
  lemma1["ok"] = lemma1_ok;

  const std::vector<std::pair<int, int>> profiles{{2, 1}, {2, 2}, {4, 2}, {4, 3}};
  Json l2 = Json::array(), l3 = Json::array(), l3lit = Json::array();
  double max2 = 0.0, max3 = 0.0, max3lit = 0.0;
  for (const auto& [n1, n2] : profiles) {
    const int n = n1 + n2;
    const int normals = n1 + 2 * n2 + 2 - n;  // m = n1/2 + n2 + 1
    const IndexBlocks blocks = index_blocks(n1, n2, Version::kI);
    double p2 = 0.0, p3 = 0.0, p3lit = 0.0;
    for (int i = 0; i < count; ++i) {
      const SecondFundamentalForm h = random_h(rng, n, normals);
      p2 = std::max(p2, lemma_identity_residual(LemmaKind::kLemma2, h, blocks));
      p3 = std::max(p3, lemma_identity_residual(LemmaKind::kLemma3, h, blocks));
      p3lit = std::max(p3lit, lemma_identity_residual(LemmaKind::kLemma3Literal, h, blocks));
    }
    l2.push_back(lemma_profile_json(n1, n2, p2));
    l3.push_back(lemma_profile_json(n1, n2, p3));
    l3lit.push_back(lemma_profile_json(n1, n2, p3lit));
    max2 = std::max(max2, p2);
    max3 = std::max(max3, p3);
    max3lit = std::max(max3lit, p3lit);
  }
  ok = ok && max2 < tol.exact && max3 < tol.exact;

  Json doc;
  doc["schema"] = kReportSchema;
  doc["kind"] = "lemma-suite";
  doc["seed"] = seed;
  doc["count"] = count;
  doc["lemma1"] = lemma1;
  doc["lemma2"] = Json{{"profiles", l2}, {"max_residual", max2}};
  doc["lemma3"] = Json{{"profiles", l3}, {"max_residual", max3}};
  doc["lemma3_literal"] = Json{{"profiles", l3lit},
                               {"max_residual", max3lit},
                               {"note", "uncorrected variant without the h_{1A}, h_{2A} terms; informational"}};
  doc["ok"] = ok;
  out.document = std::move(doc);
  out.ok = ok;
  return out;
}

}  // namespace crwarp
