#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "swlab/experiments.hpp"

using namespace swlab;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> criteria;
  std::string out;
  std::uint64_t seed = 1;
  app.add_option("--criterion", criteria, "criterion number; repeat or omit for all")->check(CLI::Range(1, kCriteria));
  app.add_option("--out", out, "scratch directory for experiment outputs");
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty())
    for (int k = 1; k <= kCriteria; ++k) criteria.push_back(k);

  fs::path dir = out.empty() ? fs::temp_directory_path() / ("swlab_acceptance_" + std::to_string(getpid())) : fs::path(out);
  std::set<std::string> ids;
  for (int k : criteria)
    for (const auto& id : experiments_for(k)) ids.insert(id);
  for (const auto& id : ids) {
    ExperimentManifest m;
    m.experiment = id;
    m.seed = seed;
    m.output_dir = dir;
    try {
      run_experiment(m);
    } catch (const std::exception& e) {
      std::printf("experiment %s aborted: %s\n", id.c_str(), e.what());
    }
  }

  ValidateOptions opt;
  opt.dir = dir;
  opt.criteria = criteria;
  bool all = true;
  for (const auto& v : validate(opt)) {
    all = all && v.pass;
    std::printf("[%s] C%02d %s: %s\n", v.pass ? "PASS" : "FAIL", v.criterion, v.name.c_str(), v.detail.c_str());
    if (!v.pass)
      for (const auto& d : v.diffs) std::printf("       %s\n", d.c_str());
  }
  if (out.empty()) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  return all ? 0 : 1;
}
