#include <coplan/sim.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

namespace coplan {

namespace {

constexpr std::uint64_t kStreamMultiplier = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

enum class Verdict { yes, no, undecided };

// Follows one trial until the formula is decided. Returns the verdict and
// whether the walk stopped at the truncation horizon.
Verdict run_trial(const Dtmc& d, const ResolvedPath& path, StateIndex start, std::size_t max_steps,
                  CounterRng& rng, FinitePath* trace) {
  StateIndex s = start;
  if (trace != nullptr) trace->states.push_back(s);
  auto step = [&] {
    s = sample_successor(d.row(s), rng);
    if (trace != nullptr) trace->states.push_back(s);
  };
  if (path.kind == ResolvedPath::Kind::next) {
    step();
    return path.rhs[s] ? Verdict::yes : Verdict::no;
  }
  const std::size_t horizon = path.bound ? static_cast<std::size_t>(*path.bound) : max_steps;
  for (std::size_t k = 0;; ++k) {
    if (path.rhs[s]) return Verdict::yes;
    if (!path.lhs[s]) return Verdict::no;
    if (k == horizon) return path.bound ? Verdict::no : Verdict::undecided;
    step();
  }
}

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64_mix(seed ^ (stream * kStreamMultiplier))) {}

std::uint64_t CounterRng::next() noexcept {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

StateIndex sample_successor(const Distribution& row, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  auto entries = row.entries();
  for (const auto& t : entries) {
    acc += t.probability;
    if (u < acc) return t.target;
  }
  return entries.back().target;
}

FinitePath simulate_path(const Dtmc& d, StateIndex start, std::size_t max_steps, CounterRng& rng) {
  if (start >= d.num_states()) throw ModelError("simulation start state out of range");
  FinitePath path;
  path.states.reserve(max_steps + 1);
  path.states.push_back(start);
  StateIndex s = start;
  for (std::size_t k = 0; k < max_steps; ++k) {
    s = sample_successor(d.row(s), rng);
    path.states.push_back(s);
  }
  return path;
}

ResolvedPath resolve_path(const Mdp& m, const pctl::PathFormula& path, const SynthesisConfig& config) {
  ResolvedPath out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, pctl::Next>) {
          out.kind = ResolvedPath::Kind::next;
          out.rhs = sat_states(m, node.operand, config).states;
        } else if constexpr (std::is_same_v<T, pctl::Until>) {
          out.lhs = sat_states(m, node.lhs, config).states;
          out.rhs = sat_states(m, node.rhs, config).states;
          out.bound = node.bound;
        } else if constexpr (std::is_same_v<T, pctl::Eventually>) {
          out.lhs.assign(m.num_states(), true);
          out.rhs = sat_states(m, node.operand, config).states;
          out.bound = node.bound;
        } else {
          throw std::logic_error("G must be rewritten at its probability operator before simulation");
        }
      },
      path->node);
  return out;
}

SimReport estimate_path_prob(const Dtmc& d, const ResolvedPath& path, const SimConfig& config,
                             std::optional<StateIndex> start) {
  if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (config.max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");
  const StateIndex from = start.value_or(d.initial());
  if (from >= d.num_states()) throw ModelError("simulation start state out of range");
  if (path.rhs.size() != d.num_states() || (path.kind == ResolvedPath::Kind::until && path.lhs.size() != d.num_states())) {
    throw ModelError("path operands do not match the chain");
  }

  SimReport report;
  report.trials = config.trials;
  const std::size_t kept = std::min(config.trace_samples, config.trials);
  report.traces.resize(kept);

  std::atomic<std::size_t> successes{0};
  std::atomic<bool> truncated{false};
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 1024;
  auto worker = [&] {
    std::size_t local_yes = 0;
    bool local_truncated = false;
    for (std::size_t begin = next.fetch_add(kChunk); begin < config.trials; begin = next.fetch_add(kChunk)) {
      const std::size_t end = std::min(begin + kChunk, config.trials);
      for (std::size_t t = begin; t < end; ++t) {
        CounterRng rng(config.seed, t);
        FinitePath* trace = t < kept ? &report.traces[t] : nullptr;
        switch (run_trial(d, path, from, config.max_steps, rng, trace)) {
          case Verdict::yes:
            ++local_yes;
            break;
          case Verdict::undecided:
            local_truncated = true;
            break;
          case Verdict::no:
            break;
        }
      }
    }
    successes += local_yes;
    if (local_truncated) truncated = true;
  };
  if (config.jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < config.jobs; ++j) pool.emplace_back(worker);
  }

  report.successes = successes;
  report.truncated = truncated;
  const double n = static_cast<double>(config.trials);
  report.estimate = static_cast<double>(report.successes) / n;
  report.standard_error = std::sqrt(report.estimate * (1.0 - report.estimate) / n);
  return report;
}

void write_trace(std::ostream& out, std::span<const std::string> state_labels, const FinitePath& path,
                 std::span<const std::string> actions) {
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    out << k << '\t' << state_labels[path.states[k]] << '\t';
    if (k < actions.size()) out << actions[k];
    out << '\n';
  }
}

}  // namespace coplan
