#pragma once

#include <coplan/io.hpp>
#include <coplan/policy.hpp>
#include <coplan/sim.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace coplan::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvalidInput = 1,
  kNoSolution = 2,
  kInconclusive = 3,
  kInternalError = 4,
};

/// 12 significant digits.
std::string format_probability(double p);

struct ClusterOptions {
  std::string model;
  std::optional<std::size_t> horizon;
  bool require_meeting = false;
};

struct SynthesizeOptions {
  std::string model;
  std::string mode = "existential";
  double epsilon = 1e-8;
  std::size_t max_policies = 100'000;
  std::optional<std::string> out;
  unsigned jobs = 1;
  bool strict = false;
  std::optional<std::size_t> horizon;
  bool require_meeting = false;
};

struct SimulateOptions {
  std::string model;
  std::string policy;
  std::size_t trials = 10'000;
  std::uint64_t seed = 0;
  std::size_t max_steps = 1'000;
  std::optional<std::string> trace;
  unsigned jobs = 1;
};

struct ProductCommandOptions {
  std::string model;
  std::size_t cluster = 1;  // 1-based
  bool prune = true;
  std::optional<std::string> out;
  std::optional<std::size_t> horizon;
  bool require_meeting = false;
};

int cmd_validate(const std::string& model, std::ostream& out, std::ostream& err);
int cmd_cluster(const ClusterOptions& options, std::ostream& out, std::ostream& err);
int cmd_synthesize(const SynthesizeOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_product(const ProductCommandOptions& options, std::ostream& out, std::ostream& err);

/// Default worker count from COPLAN_JOBS, 1 when unset or invalid.
unsigned default_jobs();

}  // namespace coplan::cli
