#pragma once

#include "entropylab/conjugate_heat.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace elab::verify {

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  // "<=", ">=", "in", "=="
  bool pass = false;
  std::string note;
};

Check at_most(std::string name, double value, double limit, std::string note = {});
Check at_least(std::string name, double value, double limit, std::string note = {});
Check within(std::string name, double value, double lo, double hi, std::string note = {});
Check holds(std::string name, bool ok, std::string note = {});

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;
  bool pass() const;
};

struct SuiteOptions {
  // backward-solve states are cached here; empty disables caching
  std::filesystem::path cache_dir;
  bool verbose = true;
};

constexpr int kCriteria = 11;

CriterionResult run_criterion(int id, const SuiteOptions& options);
// "all", "shrinker", "rate", "entropy", "collapse", "identity", "logsobolev", "flow"
std::vector<int> suite_criteria(const std::string& suite);

// "PASS  criterion 4  entropy values  (12.3 s)"
std::string summary_line(const CriterionResult& r);
std::vector<std::string> detail_lines(const CriterionResult& r);

// Backward solves shared by criteria 1 to 3.
BackwardSolveState shrinker_state(const SuiteOptions& options);
// level 0: 128 vertices, h = 0.064; each level multiplies the vertex count by √2
// and divides h by √2, which halves the flow step.
BackwardSolveState ellipse_state(int level, const SuiteOptions& options);

}  // namespace elab::verify
