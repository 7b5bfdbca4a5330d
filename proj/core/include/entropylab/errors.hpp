#pragma once

#include <stdexcept>
#include <string>

namespace elab {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kSuccess = 0,
  kValidation = 2,
  kNumerical = 3,
  kAcceptance = 4,
};

// Invalid input: malformed domain, out-of-range parameter, precondition violated.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that started but could not finish: non-convergence,
// self-intersection during flow, negative density after a solve.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string module, const std::string& what, long snapshot = -1,
                 std::string hint = {})
      : std::runtime_error(compose(module, what, snapshot, hint)),
        module_(std::move(module)),
        snapshot_(snapshot),
        hint_(std::move(hint)) {}

  const std::string& module() const { return module_; }
  long snapshot() const { return snapshot_; }
  const std::string& hint() const { return hint_; }

 private:
  static std::string compose(const std::string& module, const std::string& what, long snapshot,
                             const std::string& hint) {
    std::string s = module + ": " + what;
    if (snapshot >= 0) s += " (snapshot " + std::to_string(snapshot) + ")";
    if (!hint.empty()) s += "; hint: " + hint;
    return s;
  }

  std::string module_;
  long snapshot_;
  std::string hint_;
};

}  // namespace elab
