#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace plab::app {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> kCommands = {"wirtinger", "classify", "orbits", "plateau", "moment", "demo"};

struct RunConfig {
  std::string command;
  std::string surface;  // builtin id or JSON path; empty: command default
  std::optional<std::vector<double>> levels;
  int density = 2000;
  std::uint64_t seed = 1;
  int restarts = 32;
  int samples = 10000;
  std::optional<double> tol;  // command-specific default when unset
  std::vector<std::pair<int, int>> pairs = {{2, 1}, {3, 1}, {3, 2}};
  std::vector<double> amplitudes = {0.05, 0.1, 0.2};
  std::string out;  // output directory; empty: report on stdout only

  nlohmann::json to_json() const;
  /// Overlays the keys present in `doc`; unknown keys are rejected.
  void merge(const nlohmann::json& doc);
  /// Throws ConfigError on unknown commands or non-positive numeric parameters.
  void validate() const;
};

/// Report skeleton plus one entry per check; `passed` is the conjunction.
class Report {
public:
  Report(const RunConfig& cfg);

  void check(const std::string& name, bool ok, nlohmann::json detail = {});
  void warn(const std::string& message);
  nlohmann::json& results() { return doc_["results"]; }
  bool passed() const { return doc_["passed"].get<bool>(); }
  const nlohmann::json& doc() const { return doc_; }
  /// Adds a sub-report's checks under a prefix.
  void absorb(const std::string& prefix, const Report& other);

private:
  nlohmann::json doc_;
};

Report run_wirtinger(const RunConfig& cfg);
Report run_classify(const RunConfig& cfg);
Report run_orbits(const RunConfig& cfg);
Report run_plateau(const RunConfig& cfg);
Report run_moment(const RunConfig& cfg);
Report run_demo(const RunConfig& cfg);

Report run(const RunConfig& cfg);

std::string version();

}  // namespace plab::app
