#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "synthaudit/dataset.hpp"
#include "synthaudit/distance.hpp"

namespace synthaudit {

class Generator;

// What an adversary is assumed to know beyond the synthetic data itself.
struct AuxiliaryKnowledge {
  std::vector<std::string> known_attributes;  // columns visible to the adversary
  std::optional<Dataset> known_rows;          // partial records, if any
};

// Adversary capability level. BlackBox and WhiteBox carry a handle to the
// generator so shadow-model attacks can refit it.
struct ThreatModel {
  enum class Box { no_box, black_box, white_box, uncertain_box };
  Box box = Box::no_box;
  std::shared_ptr<const Generator> generator;
  std::optional<AuxiliaryKnowledge> aux;
};

const char* box_name(ThreatModel::Box b);

struct AttackAttempt {
  std::string guess;
  std::string truth;
  bool correct = false;
};

struct AttackOutcome {
  std::string attack_name;
  std::size_t n_attempts = 0;
  std::size_t n_successes = 0;
  std::vector<AttackAttempt> attempts;
  std::optional<double> auc;        // score-based attacks only
  std::optional<double> precision;  // at the chosen operating point
  std::optional<double> recall;
  std::optional<double> f1;
  std::vector<std::string> notes;

  double success_rate() const {
    return n_attempts == 0 ? 0.0 : static_cast<double>(n_successes) / static_cast<double>(n_attempts);
  }
};

// Per-row surprisal: sum over attributes of -log2 of the smoothed value
// frequency. Numeric attributes are discretized into 10 equal-width bins over
// the observed range; smoothing adds one pseudo-count per bucket. A value
// seen c times among n rows with v buckets scores -log2((c+1)/(n+v)).
// Missing values form their own bucket (v grows by one when observed).
std::vector<double> rarity_scores(const Dataset& d);

struct UnivariateMode {};
struct MultivariateMode {
  std::size_t width = 2;
};
using SinglingOutMode = std::variant<UnivariateMode, MultivariateMode>;

// Builds predicates from the synthetic data alone that isolate exactly one
// synthetic record, then counts how many isolate exactly one real record.
// Univariate predicates are single constraints (category equality, or a
// numeric comparison against an observed extreme). Multivariate predicates
// conjoin the `width` rarest attribute values of the rarest synthetic rows.
// If fewer than n_attacks distinct predicates exist the outcome is partial
// and carries a note; zero constructible predicates is an error.
AttackOutcome singling_out_attack(const Dataset& synthetic, const Dataset& real, const SinglingOutMode& mode,
                                  std::size_t n_attacks, std::uint64_t rng_seed);

// Links two vertically partitioned views of each target through the
// synthetic data: a target is linked when its k nearest synthetic rows under
// the aux_a attributes intersect its k nearest under aux_b. The attribute
// sets must be disjoint and non-empty. rng_seed is reserved (the nearest
// neighbour search is deterministic).
AttackOutcome linkage_attack(const Dataset& synthetic, const Dataset& targets,
                             const std::vector<std::string>& aux_a, const std::vector<std::string>& aux_b,
                             std::size_t k, const Preprocessor& p, Metric spec, std::uint64_t rng_seed);

// Predicts each target's secret attribute from its k nearest synthetic rows
// using only the aux attributes for the search. Categorical secrets take the
// modal neighbour value (ties resolve to the value of the nearest tied
// neighbour); numeric secrets take the neighbour mean and count as correct
// within numeric_tolerance (default: 5% of the preprocessor's pooled range).
// Targets with a missing secret are skipped and noted.
AttackOutcome inference_attack(const Dataset& synthetic, const Dataset& targets,
                               const std::vector<std::string>& aux_attrs, const std::string& secret,
                               std::size_t k, const Preprocessor& p, Metric spec,
                               std::optional<double> numeric_tolerance = std::nullopt);

// Distance-based membership inference: scores every candidate by the
// negated distance to its nearest synthetic row, reports the rank AUC of
// members over non-members, and classifies at the threshold maximizing
// TPR - FPR (ties resolve to the highest such threshold).
AttackOutcome mia_distance(const Dataset& synthetic, const Dataset& members, const Dataset& non_members,
                           const Preprocessor& p, Metric spec, int threads = 1);

// Refits the generator on a training set and returns a synthetic sample.
// Used by shadow-model attacks; both fitting and sampling must derive all
// randomness from rng_seed.
using GeneratorOracle = std::function<Dataset(const Dataset& train, std::uint64_t rng_seed)>;

// Shadow-model membership inference. Requires black- or white-box access.
// For each target, fits m/2 shadow generators on subsamples of `population`
// containing the target and m/2 on subsamples excluding it, measures the
// min distance from the target to each shadow's sample, and declares the
// target a member of the audited generator's training set when the observed
// min distance to `audited_synthetic` is at least as close to the in-shadow
// mean as to the out-shadow mean.
AttackOutcome shadow_mia(const ThreatModel& tm, const GeneratorOracle& fit_and_sample, const Dataset& population,
                         const Dataset& targets, const std::vector<char>& target_is_member,
                         const Dataset& audited_synthetic, std::size_t m, std::size_t n_train,
                         const Preprocessor& p, Metric spec, std::uint64_t rng_seed);

// Uninformed baselines mirroring the scoring of the corresponding attack.
// Guesses are uniform draws instead of model-informed choices.
AttackOutcome random_inference_baseline(const Dataset& synthetic, const Dataset& targets, const std::string& secret,
                                        const Preprocessor& p, std::optional<double> numeric_tolerance,
                                        std::size_t n_attempts, std::uint64_t rng_seed);
AttackOutcome random_linkage_baseline(std::size_t synthetic_size, std::size_t k, std::size_t n_attempts,
                                      std::uint64_t rng_seed);
AttackOutcome random_singling_out_baseline(const Dataset& synthetic, const Dataset& real, const SinglingOutMode& mode,
                                           std::size_t n_attacks, std::uint64_t rng_seed);
AttackOutcome random_membership_baseline(std::size_t n_members, std::size_t n_non_members, std::uint64_t rng_seed);

// Runs the same attack closure against training-set targets and against
// control targets the generator never saw. The closure must bind all
// randomness so both runs share identical seeds.
using AttackClosure = std::function<AttackOutcome(const Dataset& targets)>;
std::pair<AttackOutcome, AttackOutcome> control_run(const AttackClosure& attack, const Dataset& train_targets,
                                                    const Dataset& control_targets);

struct RiskEstimate {
  enum class Baseline { random, control, absolute };
  double attack_rate = 0.0;
  double baseline_rate = 0.0;
  double risk = 0.0;   // max(0, (attack - baseline) / (1 - baseline))
  double ci_low = 0.0;
  double ci_high = 1.0;
  Baseline baseline_kind = Baseline::random;
};

const char* baseline_name(RiskEstimate::Baseline b);

// Excess success over baseline, normalized by the baseline's headroom, with
// a 95% interval propagated from Wilson intervals on both rates.
RiskEstimate risk_estimate(const AttackOutcome& attack, const AttackOutcome& baseline, RiskEstimate::Baseline kind);

// Fraction of planted canary records whose nearest synthetic row lies within
// epsilon. epsilon = 0 demands exact reproduction up to distance zero.
double canary_recovery(const Dataset& synthetic, const std::vector<Record>& canaries, const Preprocessor& p,
                       Metric spec, double epsilon = 0.0);

}  // namespace synthaudit
