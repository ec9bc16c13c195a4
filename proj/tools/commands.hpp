#pragma once

#include "klab/report.hpp"

#include <string>

namespace klab::cli {

struct Invocation {
  std::string command;
  std::string config_path;  // empty: built-in defaults
  ExperimentConfig cfg;
};

RunReport run_verify(const Invocation& inv);
RunReport run_balance(const Invocation& inv);
RunReport run_expansion(const Invocation& inv);
RunReport run_moment_spectrum(const Invocation& inv);

/// Command line that reruns this invocation.
std::string repro(const Invocation& inv);

}  // namespace klab::cli
