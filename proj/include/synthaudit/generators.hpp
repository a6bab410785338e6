#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>

#include "synthaudit/dataset.hpp"

namespace synthaudit {

class Rng;

// Deliberately simple, fully specified generators. They exist to exercise
// the audit machinery (black/white-box threat surface, seed pairing, density
// oracles, adversarial fixtures), not to model data well.

struct IndependentMarginalParams {
  bool operator==(const IndependentMarginalParams&) const = default;
};

struct SeedBasedNoiseParams {
  double sigma = 0.5;      // > 0, scales each attribute's training stddev
  double flip_prob = 0.1;  // [0, 1) per categorical attribute
  bool operator==(const SeedBasedNoiseParams&) const = default;
};

struct MemorizingParams {
  bool operator==(const MemorizingParams&) const = default;
};

struct ModeCollapsedParams {
  size_t n_modes = 2;  // 1 <= n_modes <= |train|
  double sigma = 0.0;  // absolute Gaussian jitter on numeric attributes, >= 0
  bool operator==(const ModeCollapsedParams&) const = default;
};

using GeneratorParams = std::variant<IndependentMarginalParams, SeedBasedNoiseParams,
                                     MemorizingParams, ModeCollapsedParams>;

enum class GeneratorKind { independent_marginal, seed_based_noise, memorizing, mode_collapsed };

const char* generator_kind_name(GeneratorKind k);
GeneratorKind generator_kind_from_name(std::string_view name);

class Generator {
 public:
  Generator() = default;

  // All state is captured here; sampling never touches the training data
  // again. The rng seed only matters for ModeCollapsed (mode selection).
  static Generator fit(const Dataset& train, const GeneratorParams& params, uint64_t rng_seed);

  GeneratorKind kind() const;
  const GeneratorParams& parameters() const;
  const AttributeSchema& schema() const;
  bool fitted() const { return state_ != nullptr; }

  // n rows labeled "synthetic", deterministic in rng_seed.
  Dataset sample(size_t n, uint64_t rng_seed) const;

  // SeedBasedNoise only: output row i derives from seed row i.
  Dataset seed_generate(const Dataset& seeds, uint64_t rng_seed) const;

  // SeedBasedNoise only: probability density of producing `output` from
  // `seed` (numeric attributes contribute Gaussian densities, categorical
  // ones flip probabilities). Plugs into anonymity's pd_check.
  double density(const Record& seed, const Record& output) const;

  // ModeCollapsed only: the selected anchor rows.
  const std::vector<Record>& modes() const;

 private:
  struct State;
  static Record apply_noise_row(const State& st, const SeedBasedNoiseParams& sp,
                                const Record& seed, Rng& rng);
  std::shared_ptr<const State> state_;
};

}  // namespace synthaudit
