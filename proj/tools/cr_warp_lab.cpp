// cr-warp-lab command line driver.
#include "crwarp/error.hpp"
#include "crwarp/gallery.hpp"
#include "crwarp/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using crwarp::Json;

// "name=v1,v2,..." or "name=from:to:count".
std::pair<std::string, std::vector<double>> parse_grid_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0)
    throw crwarp::ConfigError("--grid", "expected name=v1,v2,... or name=from:to:count, got '" + arg + "'");
  const std::string name = arg.substr(0, eq);
  const std::string rest = arg.substr(eq + 1);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size())
      throw crwarp::ConfigError("--grid." + name, "not a number: '" + s + "'");
    return v;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
      const auto pos = s.find(sep, start);
      parts.push_back(s.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return parts;
  };
  std::vector<double> values;
  if (rest.find(':') != std::string::npos) {
    const auto parts = split(rest, ':');
    if (parts.size() != 3) throw crwarp::ConfigError("--grid." + name, "range form is from:to:count");
    const double from = number(parts[0]);
    const double to = number(parts[1]);
    const double count = number(parts[2]);
    if (count < 1 || count != static_cast<int>(count))
      throw crwarp::ConfigError("--grid." + name, "count must be a positive integer");
    const int k = static_cast<int>(count);
    for (int i = 0; i < k; ++i) values.push_back(k == 1 ? from : from + (to - from) * i / (k - 1));
  } else {
    for (const auto& p : split(rest, ',')) values.push_back(number(p));
  }
  return {name, values};
}

void emit(const Json& report, const std::string& format, const std::string& out_path) {
  const std::string text = format == "table" ? crwarp::format_table(report) : report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw crwarp::ConfigError("--output", "cannot write '" + out_path + "'");
    out << text;
  }
}

bool looks_like_report(const Json& doc) {
  return doc.is_object() && doc.contains("schema") && doc.contains("records");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cr-warp-lab: verification harness for Chen-type inequalities on CR-warped products"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string output;
  const std::vector<std::string> formats{"json", "table"};

  std::string scenario_path;
  auto* verify = app.add_subcommand("verify", "Run a scenario file and emit the report");
  verify->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  verify->add_option("--format", format, "json or table")->check(CLI::IsMember(formats));
  verify->add_option("-o,--output", output, "Write the report here instead of stdout");

  std::string key;
  std::vector<std::string> grid_args;
  std::optional<std::uint64_t> seed;
  auto* gallery = app.add_subcommand("gallery", "Evaluate a gallery immersion over a parameter grid");
  gallery->add_option("key", key, "Gallery key")->required()->check(CLI::IsMember(crwarp::gallery_keys()));
  gallery->add_option("--grid", grid_args, "Axis: name=v1,v2,... or name=from:to:count (repeatable)");
  gallery->add_option("--seed", seed, "Seed for sampled plane minimization");
  gallery->add_option("--format", format, "json or table")->check(CLI::IsMember(formats));
  gallery->add_option("-o,--output", output, "Write the report here instead of stdout");
  bool list_params = false;
  gallery->add_flag("--list-parameters", list_params, "Print the gallery parameters and exit");

  std::uint64_t lemma_seed = 1;
  int lemma_count = 1000;
  auto* lemmas = app.add_subcommand("lemmas", "Randomized algebraic lemma suite");
  lemmas->add_option("--seed", lemma_seed, "RNG seed");
  lemmas->add_option("--count", lemma_count, "Instances per lemma and profile")->check(CLI::PositiveNumber);
  lemmas->add_option("-o,--output", output, "Write the summary here instead of stdout");

  std::string report_path;
  auto* report = app.add_subcommand("report", "Render a scenario file or saved report as JSON or a table");
  report->add_option("file", report_path, "Scenario or report JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--format", format, "json or table")->check(CLI::IsMember(formats));
  report->add_option("-o,--output", output, "Write the rendering here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; usage errors share the config-error code
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      const auto result = crwarp::run_scenario(crwarp::load_scenario(scenario_path));
      emit(result.report, format, output);
      return result.ok() ? 0 : 1;
    }
    if (gallery->parsed()) {
      if (list_params) {
        for (const auto& p : crwarp::gallery_parameters(key))
          std::cout << p.name << " (default " << p.default_value << ")\n";
        return 0;
      }
      std::vector<std::pair<std::string, std::vector<double>>> grid;
      for (const auto& g : grid_args) grid.push_back(parse_grid_arg(g));
      const auto result = crwarp::run_scenario(crwarp::gallery_scenario(key, grid, seed));
      emit(result.report, format, output);
      return result.ok() ? 0 : 1;
    }
    if (lemmas->parsed()) {
      const auto summary = crwarp::run_lemma_suite(lemma_seed, lemma_count);
      emit(summary.document, "json", output);
      return summary.ok ? 0 : 1;
    }
    if (report->parsed()) {
      std::ifstream in(report_path);
      Json doc;
      try {
        doc = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw crwarp::ConfigError("file", std::string("invalid JSON: ") + e.what());
      }
      if (looks_like_report(doc)) {
        emit(doc, format, output);
        return doc.value("summary", Json::object()).value("ok", true) ? 0 : 1;
      }
      const auto result = crwarp::run_scenario(crwarp::parse_scenario(doc));
      emit(result.report, format, output);
      return result.ok() ? 0 : 1;
    }
  } catch (const crwarp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const crwarp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
