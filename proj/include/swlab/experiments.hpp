#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swlab {

// Bad experiment id, malformed manifest or bad parameter value.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentManifest {
  std::string experiment;
  std::map<std::string, std::string> parameters;  // comma separated grids
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = ".";
  std::filesystem::path data_dir;  // fixtures; empty means the built-in path
  int jobs = 1;                    // > 1 runs the ids of "all" concurrently

  // Flat key=value lines ('#' comments) or a JSON object.
  static ExperimentManifest parse(const std::string& text);
};

struct ExperimentSummary {
  std::string experiment;
  std::vector<std::string> files;
  std::size_t rows = 0;
};

const std::vector<std::string>& experiment_ids();
std::filesystem::path default_data_dir();

// "all" expands to every id. Files land in manifest.output_dir.
std::vector<ExperimentSummary> run_experiment(const ExperimentManifest& manifest);

constexpr int kCriteria = 15;

struct Verdict {
  int criterion = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<std::string> diffs;
  std::vector<std::string> missing;
};

struct ValidateOptions {
  std::filesystem::path dir = ".";
  std::filesystem::path data_dir;
  std::map<std::string, double> tolerance;  // "c03" -> value
  std::vector<int> criteria;                // empty means all
};

std::string criterion_name(int criterion);
std::vector<std::string> experiments_for(int criterion);
std::vector<Verdict> validate(const ValidateOptions& opt);
std::string format_verdicts(const std::vector<Verdict>& verdicts);  // CSV

}  // namespace swlab
