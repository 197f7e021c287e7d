// plateau_lab: command-line driver for the lab's experiments.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "app.hpp"
#include "plab/errors.hpp"
#include "plab/polynomial.hpp"

namespace {

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw plab::app::ConfigError("levels: cannot parse '" + item + "'");
    }
  }
  return out;
}

std::pair<int, int> parse_pair(const std::string& text) {
  int n = 0, p = 0;
  char sep = 0;
  std::istringstream in(text);
  if (!(in >> n >> sep >> p) || (sep != ',' && sep != ':')) throw plab::app::ConfigError("pair: expected n,p got '" + text + "'");
  return {n, p};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace plab::app;
  CLI::App cli{"Numerical laboratory for complex and mixed Plateau problems"};
  cli.set_version_flag("--version", version());

  std::string command, surface, levels, out, config;
  int density = 0, restarts = 0, samples = 0;
  std::uint64_t seed = 0;
  double tol = 0;
  std::vector<std::string> pairs;
  std::vector<double> amplitudes;

  cli.add_option("command", command, "wirtinger | classify | orbits | plateau | moment | demo")->required();
  auto* o_surface = cli.add_option("--surface", surface, "builtin id or JSON surface file");
  auto* o_levels = cli.add_option("--levels", levels, "comma-separated slice levels (may be empty)");
  auto* o_density = cli.add_option("--density", density, "points per slice");
  auto* o_seed = cli.add_option("--seed", seed, "random seed");
  auto* o_restarts = cli.add_option("--restarts", restarts, "optimizer restarts");
  auto* o_samples = cli.add_option("--samples", samples, "random blades per (n, p)");
  auto* o_out = cli.add_option("--out", out, "output directory for reports and tables");
  auto* o_tol = cli.add_option("--tol", tol, "command tolerance");
  auto* o_pairs = cli.add_option("--pair", pairs, "(n,p) for the wirtinger sweep, repeatable");
  auto* o_amps = cli.add_option("--amplitudes", amplitudes, "perturbation amplitudes")->delimiter(',');
  cli.add_option("--config", config, "JSON config file; flags take precedence");
  CLI11_PARSE(cli, argc, argv);

  RunConfig cfg;
  try {
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ConfigError("cannot open config '" + config + "'");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      cfg.merge(doc);
    }
    cfg.command = command;
    if (o_surface->count()) cfg.surface = surface;
    if (o_levels->count()) cfg.levels = parse_levels(levels);
    if (o_density->count()) cfg.density = density;
    if (o_seed->count()) cfg.seed = seed;
    if (o_restarts->count()) cfg.restarts = restarts;
    if (o_samples->count()) cfg.samples = samples;
    if (o_out->count()) cfg.out = out;
    if (o_tol->count()) cfg.tol = tol;
    if (o_amps->count()) cfg.amplitudes = amplitudes;
    if (o_pairs->count()) {
      cfg.pairs.clear();
      for (const auto& p : pairs) cfg.pairs.push_back(parse_pair(p));
    }
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    Report rep = run(cfg);
    for (const auto& w : rep.doc()["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    const std::string text = rep.doc().dump(2);
    std::cout << text << '\n';
    if (!cfg.out.empty()) {
      std::filesystem::create_directories(cfg.out);
      std::ofstream(std::filesystem::path(cfg.out) / (cfg.command + ".json")) << text << '\n';
    }
    if (!rep.passed()) {
      for (const auto& c : rep.doc()["checks"])
        if (!c["passed"].get<bool>()) std::cerr << "FAILED: " << c["name"].get<std::string>() << '\n';
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const plab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const plab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  }
}
