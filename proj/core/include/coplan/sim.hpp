#pragma once

#include <coplan/mdp.hpp>
#include <coplan/pctl.hpp>
#include <coplan/synthesis.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coplan {

/// SplitMix64 finaliser.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Counter-based generator: output n (n = 1, 2, ...) of stream `stream`
/// under `seed` is
///
///   key  = mix(seed ^ (stream * 0xD1B54A32D192ED03))
///   x_n  = mix(key + n * 0x9E3779B97F4A7C15)
///
/// with `mix` the SplitMix64 finaliser, so any output can be recomputed
/// from (seed, stream, n) alone.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next() noexcept;
  /// Top 53 bits scaled into [0, 1).
  double uniform() noexcept;
  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Samples a successor of `row` with one uniform draw.
StateIndex sample_successor(const Distribution& row, CounterRng& rng);

struct SimConfig {
  std::size_t trials = 10'000;
  std::size_t max_steps = 1'000;  // truncation horizon for unbounded until
  std::uint64_t seed = 0;
  std::size_t trace_samples = 0;  // number of leading trials whose paths are kept
  unsigned jobs = 1;
};

/// Path of exactly `max_steps` transitions from `start`.
FinitePath simulate_path(const Dtmc& d, StateIndex start, std::size_t max_steps, CounterRng& rng);

/// A path formula with its operands already resolved to Sat sets.
struct ResolvedPath {
  enum class Kind { next, until };
  Kind kind = Kind::until;
  StateSet lhs;  // until only
  StateSet rhs;
  pctl::Bound bound;
};

ResolvedPath resolve_path(const Mdp& m, const pctl::PathFormula& path, const SynthesisConfig& config = {});

struct SimReport {
  double estimate = 0.0;
  double standard_error = 0.0;  // sqrt(p(1-p)/trials)
  std::size_t trials = 0;
  std::size_t successes = 0;
  /// Unbounded until cut at max_steps: the estimate is a lower bound.
  bool truncated = false;
  std::vector<FinitePath> traces;
};

/// Fraction of sampled paths from `start` (default: the initial state)
/// satisfying `path`. Trial t draws from stream t of the configured seed.
SimReport estimate_path_prob(const Dtmc& d, const ResolvedPath& path, const SimConfig& config,
                             std::optional<StateIndex> start = std::nullopt);

/// Writes `step<TAB>state<TAB>action` lines. `actions` gives the label of
/// the action taken at each step; pass an empty span for chain traces.
void write_trace(std::ostream& out, std::span<const std::string> state_labels, const FinitePath& path,
                 std::span<const std::string> actions = {});

}  // namespace coplan
