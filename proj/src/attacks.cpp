#include "synthaudit/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "synthaudit/nn.hpp"
#include "synthaudit/parallel.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/stats.hpp"

namespace synthaudit {

namespace {

constexpr size_t kRarityBins = 10;

// Per-attribute bucket model behind rarity_scores: categorical values map to
// their own bucket, numeric values to one of kRarityBins equal-width bins
// over the observed range, missing to a dedicated bucket.
struct BucketModel {
  bool numeric = false;
  double lo = 0.0, hi = 0.0;
  size_t n_bins = 1;
  std::vector<size_t> bin_counts;
  std::map<std::string, size_t> cat_counts;
  size_t missing_count = 0;
  size_t bucket_total = 0;  // smoothing denominator term v

  size_t count_of(const Value& v) const {
    if (is_missing(v)) return missing_count;
    if (numeric) return bin_counts[bin_of(std::get<double>(v))];
    auto it = cat_counts.find(std::get<std::string>(v));
    return it == cat_counts.end() ? 0 : it->second;
  }

  size_t bin_of(double x) const {
    if (n_bins == 1 || hi <= lo) return 0;
    double t = (x - lo) / (hi - lo) * static_cast<double>(n_bins);
    auto b = static_cast<size_t>(std::max(0.0, t));
    return std::min(b, n_bins - 1);
  }
};

std::vector<BucketModel> fit_buckets(const Dataset& d) {
  const auto& schema = d.schema();
  std::vector<BucketModel> models(schema.size());
  for (size_t a = 0; a < schema.size(); ++a) {
    BucketModel& m = models[a];
    m.numeric = schema.at(a).is_numeric();
    if (m.numeric) {
      bool seen = false;
      for (const auto& r : d.rows()) {
        const Value& v = r.values[a];
        if (is_missing(v)) continue;
        double x = std::get<double>(v);
        if (!seen) {
          m.lo = m.hi = x;
          seen = true;
        } else {
          m.lo = std::min(m.lo, x);
          m.hi = std::max(m.hi, x);
        }
      }
      m.n_bins = (seen && m.hi > m.lo) ? kRarityBins : 1;
      m.bin_counts.assign(m.n_bins, 0);
      for (const auto& r : d.rows()) {
        const Value& v = r.values[a];
        if (is_missing(v)) {
          m.missing_count++;
        } else {
          m.bin_counts[m.bin_of(std::get<double>(v))]++;
        }
      }
      m.bucket_total = m.n_bins;
    } else {
      for (const auto& r : d.rows()) {
        const Value& v = r.values[a];
        if (is_missing(v)) {
          m.missing_count++;
        } else {
          m.cat_counts[std::get<std::string>(v)]++;
        }
      }
      size_t domain = schema.at(a).categorical().domain.size();
      m.bucket_total = std::max(domain, m.cat_counts.size());
    }
    if (m.missing_count > 0) m.bucket_total++;
  }
  return models;
}

// score = -log2((count + 1) / (n + v)) for each cell.
double rarity_term(const BucketModel& m, const Value& v, size_t n) {
  double freq = (static_cast<double>(m.count_of(v)) + 1.0) /
                (static_cast<double>(n) + static_cast<double>(m.bucket_total));
  return -std::log2(freq);
}

struct Constraint {
  size_t attr = 0;
  enum Kind { eq, missing, le, ge } kind = eq;
  std::string value;
  double threshold = 0.0;
};

struct Predicate {
  std::vector<Constraint> cs;

  bool matches(const Record& r) const {
    for (const auto& c : cs) {
      const Value& v = r.values[c.attr];
      switch (c.kind) {
        case Constraint::eq:
          if (is_missing(v) || !std::holds_alternative<std::string>(v) ||
              std::get<std::string>(v) != c.value)
            return false;
          break;
        case Constraint::missing:
          if (!is_missing(v)) return false;
          break;
        case Constraint::le:
          if (is_missing(v) || !std::holds_alternative<double>(v) || std::get<double>(v) > c.threshold)
            return false;
          break;
        case Constraint::ge:
          if (is_missing(v) || !std::holds_alternative<double>(v) || std::get<double>(v) < c.threshold)
            return false;
          break;
      }
    }
    return true;
  }

  size_t count_matches(const Dataset& d) const {
    size_t n = 0;
    for (const auto& r : d.rows())
      if (matches(r)) n++;
    return n;
  }

  std::string text(const AttributeSchema& schema) const {
    std::string out;
    for (const auto& c : cs) {
      if (!out.empty()) out += " AND ";
      out += schema.at(c.attr).name;
      switch (c.kind) {
        case Constraint::eq: out += "=" + c.value; break;
        case Constraint::missing: out += " missing"; break;
        case Constraint::le: out += "<=" + value_to_string(Value{c.threshold}); break;
        case Constraint::ge: out += ">=" + value_to_string(Value{c.threshold}); break;
      }
    }
    return out;
  }
};

// Single-constraint predicates that isolate exactly one synthetic record:
// category values observed once, observed numeric extremes attained once,
// and a lone missing cell.
std::vector<Predicate> univariate_candidates(const Dataset& synthetic) {
  const auto& schema = synthetic.schema();
  std::vector<Predicate> out;
  for (size_t a = 0; a < schema.size(); ++a) {
    size_t missing_count = 0;
    if (schema.at(a).is_categorical()) {
      std::map<std::string, size_t> counts;
      for (const auto& r : synthetic.rows()) {
        const Value& v = r.values[a];
        if (is_missing(v)) {
          missing_count++;
        } else {
          counts[std::get<std::string>(v)]++;
        }
      }
      for (const auto& [val, count] : counts)
        if (count == 1) out.push_back({{{a, Constraint::eq, val, 0.0}}});
    } else {
      double lo = 0.0, hi = 0.0;
      size_t lo_count = 0, hi_count = 0;
      for (const auto& r : synthetic.rows()) {
        const Value& v = r.values[a];
        if (is_missing(v)) {
          missing_count++;
          continue;
        }
        double x = std::get<double>(v);
        if (lo_count == 0) {
          lo = hi = x;
          lo_count = hi_count = 1;
          continue;
        }
        if (x < lo) {
          lo = x;
          lo_count = 1;
        } else if (x == lo) {
          lo_count++;
        }
        if (x > hi) {
          hi = x;
          hi_count = 1;
        } else if (x == hi) {
          hi_count++;
        }
      }
      if (lo_count == 1) out.push_back({{{a, Constraint::le, "", lo}}});
      if (hi_count == 1 && hi > lo) out.push_back({{{a, Constraint::ge, "", hi}}});
    }
    if (missing_count == 1) out.push_back({{{a, Constraint::missing, "", 0.0}}});
  }
  return out;
}

// Conjunctions over the `width` rarest attribute values of the rarest
// synthetic rows, kept when they isolate exactly one synthetic record.
std::vector<Predicate> multivariate_candidates(const Dataset& synthetic, size_t width, size_t n_attacks,
                                               uint64_t rng_seed) {
  const auto& schema = synthetic.schema();
  const size_t n = synthetic.size();
  require(width >= 1, Errc::bad_params, "singling out: width must be at least 1");
  require(width <= schema.size(), Errc::bad_params, "singling out: width exceeds attribute count");

  auto models = fit_buckets(synthetic);
  std::vector<double> totals(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t a = 0; a < schema.size(); ++a)
      totals[i] += rarity_term(models[a], synthetic.row(i).values[a], n);

  // Rarest rows first; ties broken in a seeded but deterministic order.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng shuffler(Rng::derive(rng_seed, 2));
  shuffler.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return totals[x] > totals[y]; });

  // Count of non-missing values <= / >= x, to pick the tighter side.
  auto side_counts = [&](size_t a, double x) {
    size_t le_count = 0, ge_count = 0;
    for (const auto& r : synthetic.rows()) {
      const Value& v = r.values[a];
      if (is_missing(v)) continue;
      double y = std::get<double>(v);
      if (y <= x) le_count++;
      if (y >= x) ge_count++;
    }
    return std::pair<size_t, size_t>{le_count, ge_count};
  };

  std::vector<Predicate> out;
  std::set<std::string> seen;
  for (size_t oi = 0; oi < n && out.size() < n_attacks; ++oi) {
    const Record& row = synthetic.row(order[oi]);
    std::vector<std::pair<double, size_t>> ranked;  // (-term, attr) ascending
    for (size_t a = 0; a < schema.size(); ++a)
      ranked.emplace_back(-rarity_term(models[a], row.values[a], n), a);
    std::sort(ranked.begin(), ranked.end());

    Predicate pred;
    for (size_t j = 0; j < width; ++j) {
      size_t a = ranked[j].second;
      const Value& v = row.values[a];
      Constraint c;
      c.attr = a;
      if (is_missing(v)) {
        c.kind = Constraint::missing;
      } else if (schema.at(a).is_categorical()) {
        c.kind = Constraint::eq;
        c.value = std::get<std::string>(v);
      } else {
        double x = std::get<double>(v);
        auto [le_count, ge_count] = side_counts(a, x);
        c.kind = le_count <= ge_count ? Constraint::le : Constraint::ge;
        c.threshold = x;
      }
      pred.cs.push_back(c);
    }
    std::sort(pred.cs.begin(), pred.cs.end(),
              [](const Constraint& x, const Constraint& y) { return x.attr < y.attr; });

    if (pred.count_matches(synthetic) != 1) continue;
    std::string key = pred.text(schema);
    if (seen.insert(key).second) out.push_back(std::move(pred));
  }
  return out;
}

AttackOutcome score_predicates(const std::vector<Predicate>& preds, const Dataset& real, std::string name) {
  AttackOutcome out;
  out.attack_name = std::move(name);
  for (const auto& pred : preds) {
    size_t matches = pred.count_matches(real);
    bool success = matches == 1;
    out.attempts.push_back({pred.text(real.schema()), std::to_string(matches), success});
    out.n_attempts++;
    if (success) out.n_successes++;
  }
  return out;
}

std::vector<char> attr_mask(const AttributeSchema& schema, const std::vector<std::string>& names) {
  std::vector<char> mask(schema.size(), 0);
  for (const auto& name : names) mask[schema.require_attribute(name)] = 1;
  return mask;
}

// Observed non-missing values per attribute, deduplicated and ordered.
std::vector<std::vector<Value>> observed_values(const Dataset& d) {
  std::vector<std::vector<Value>> out(d.schema().size());
  for (size_t a = 0; a < out.size(); ++a) {
    std::vector<Value> vals;
    for (const auto& r : d.rows())
      if (!is_missing(r.values[a])) vals.push_back(r.values[a]);
    std::sort(vals.begin(), vals.end(), value_less);
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](const Value& x, const Value& y) {
                             return !value_less(x, y) && !value_less(y, x);
                           }),
               vals.end());
    out[a] = std::move(vals);
  }
  return out;
}

const char* member_label(bool member) { return member ? "member" : "non_member"; }

}  // namespace

const char* box_name(ThreatModel::Box b) {
  switch (b) {
    case ThreatModel::Box::no_box: return "no_box";
    case ThreatModel::Box::black_box: return "black_box";
    case ThreatModel::Box::white_box: return "white_box";
    case ThreatModel::Box::uncertain_box: return "uncertain_box";
  }
  raise(Errc::internal_error, "unknown box");
}

const char* baseline_name(RiskEstimate::Baseline b) {
  switch (b) {
    case RiskEstimate::Baseline::random: return "random";
    case RiskEstimate::Baseline::control: return "control";
    case RiskEstimate::Baseline::absolute: return "absolute";
  }
  raise(Errc::internal_error, "unknown baseline");
}

std::vector<double> rarity_scores(const Dataset& d) {
  require(!d.empty(), Errc::empty_dataset, "rarity_scores: empty dataset");
  auto models = fit_buckets(d);
  std::vector<double> scores(d.size(), 0.0);
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t a = 0; a < models.size(); ++a)
      scores[i] += rarity_term(models[a], d.row(i).values[a], d.size());
  return scores;
}

AttackOutcome singling_out_attack(const Dataset& synthetic, const Dataset& real, const SinglingOutMode& mode,
                                  size_t n_attacks, uint64_t rng_seed) {
  require(!synthetic.empty(), Errc::empty_dataset, "singling out: empty synthetic dataset");
  require(!real.empty(), Errc::empty_dataset, "singling out: empty real dataset");
  require(synthetic.schema() == real.schema(), Errc::schema_mismatch,
          "singling out: datasets must share a schema");
  require(n_attacks >= 1, Errc::bad_params, "singling out: n_attacks must be positive");

  std::vector<Predicate> preds;
  std::string name;
  std::vector<std::string> notes;
  if (std::holds_alternative<UnivariateMode>(mode)) {
    name = "singling_out_univariate";
    auto candidates = univariate_candidates(synthetic);
    if (candidates.size() > n_attacks) {
      Rng rng(Rng::derive(rng_seed, 1));
      auto pick = rng.sample_indices(candidates.size(), n_attacks);
      std::sort(pick.begin(), pick.end());
      for (size_t i : pick) preds.push_back(std::move(candidates[i]));
    } else {
      preds = std::move(candidates);
    }
  } else {
    const auto& mv = std::get<MultivariateMode>(mode);
    name = "singling_out_multivariate";
    notes.push_back("width=" + std::to_string(mv.width));
    preds = multivariate_candidates(synthetic, mv.width, n_attacks, rng_seed);
  }

  require(!preds.empty(), Errc::not_enough_uniques, "singling out: no isolating predicate exists");
  if (preds.size() < n_attacks)
    notes.push_back("requested " + std::to_string(n_attacks) + " predicates, constructed " +
                    std::to_string(preds.size()));

  AttackOutcome out = score_predicates(preds, real, std::move(name));
  for (auto& n : notes) out.notes.push_back(std::move(n));
  return out;
}

AttackOutcome linkage_attack(const Dataset& synthetic, const Dataset& targets,
                             const std::vector<std::string>& aux_a, const std::vector<std::string>& aux_b,
                             size_t k, const Preprocessor& p, Metric spec, uint64_t rng_seed) {
  (void)rng_seed;  // search is deterministic
  require(!synthetic.empty(), Errc::empty_dataset, "linkage: empty synthetic dataset");
  require(!targets.empty(), Errc::empty_dataset, "linkage: no targets");
  require(!aux_a.empty() && !aux_b.empty(), Errc::bad_params, "linkage: empty auxiliary attribute set");
  for (const auto& name : aux_a)
    require(std::find(aux_b.begin(), aux_b.end(), name) == aux_b.end(), Errc::overlapping_aux,
            "linkage: attribute in both auxiliary sets: " + name);
  require(k >= 1, Errc::bad_params, "linkage: k must be positive");
  require(k <= synthetic.size(), Errc::k_too_large, "linkage: k exceeds synthetic dataset size");

  auto mask_a = attr_mask(targets.schema(), aux_a);
  auto mask_b = attr_mask(targets.schema(), aux_b);
  auto tq = PreparedTable::build(p, targets);
  auto tr = PreparedTable::build(p, synthetic);

  AttackOutcome out;
  out.attack_name = "linkage";
  out.notes.push_back("k=" + std::to_string(k));
  for (size_t i = 0; i < targets.size(); ++i) {
    auto na = knn_prepared(p, spec, tq, i, tr, k, &mask_a);
    auto nb = knn_prepared(p, spec, tq, i, tr, k, &mask_b);
    std::vector<size_t> ia, ib;
    for (const auto& r : na) ia.push_back(r.index);
    for (const auto& r : nb) ib.push_back(r.index);
    std::sort(ia.begin(), ia.end());
    std::sort(ib.begin(), ib.end());
    std::vector<size_t> common;
    std::set_intersection(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(common));
    bool linked = !common.empty();
    out.attempts.push_back({linked ? "synthetic row " + std::to_string(common.front()) : "none", "", linked});
    out.n_attempts++;
    if (linked) out.n_successes++;
  }
  return out;
}

AttackOutcome inference_attack(const Dataset& synthetic, const Dataset& targets,
                               const std::vector<std::string>& aux_attrs, const std::string& secret,
                               size_t k, const Preprocessor& p, Metric spec,
                               std::optional<double> numeric_tolerance) {
  require(!synthetic.empty(), Errc::empty_dataset, "inference: empty synthetic dataset");
  require(!targets.empty(), Errc::empty_dataset, "inference: no targets");
  require(!aux_attrs.empty(), Errc::bad_params, "inference: empty auxiliary attribute set");
  require(k >= 1, Errc::bad_params, "inference: k must be positive");
  require(k <= synthetic.size(), Errc::k_too_large, "inference: k exceeds synthetic dataset size");

  const auto& schema = targets.schema();
  size_t secret_idx = schema.require_attribute(secret);
  require(std::find(aux_attrs.begin(), aux_attrs.end(), secret) == aux_attrs.end(), Errc::overlapping_aux,
          "inference: secret attribute cannot be auxiliary");
  bool numeric_secret = schema.at(secret_idx).is_numeric();
  double tol = 0.0;
  if (numeric_secret) {
    tol = numeric_tolerance.value_or(0.05 * p.numeric_range(secret_idx));
    require(tol >= 0.0, Errc::bad_params, "inference: negative tolerance");
  }

  auto mask = attr_mask(schema, aux_attrs);
  auto tq = PreparedTable::build(p, targets);
  auto tr = PreparedTable::build(p, synthetic);

  AttackOutcome out;
  out.attack_name = "inference";
  size_t skipped = 0;
  for (size_t i = 0; i < targets.size(); ++i) {
    const Value& truth = targets.row(i).values[secret_idx];
    if (is_missing(truth)) {
      skipped++;
      continue;
    }
    auto neighbors = knn_prepared(p, spec, tq, i, tr, k, &mask);
    Value guess;  // stays missing when no neighbor has the secret
    bool correct = false;
    if (numeric_secret) {
      double sum = 0.0;
      size_t count = 0;
      for (const auto& nb : neighbors) {
        const Value& v = synthetic.row(nb.index).values[secret_idx];
        if (is_missing(v)) continue;
        sum += std::get<double>(v);
        count++;
      }
      if (count > 0) {
        guess = sum / static_cast<double>(count);
        correct = std::abs(std::get<double>(guess) - std::get<double>(truth)) <= tol;
      }
    } else {
      std::map<std::string, size_t> counts;
      for (const auto& nb : neighbors) {
        const Value& v = synthetic.row(nb.index).values[secret_idx];
        if (!is_missing(v)) counts[std::get<std::string>(v)]++;
      }
      if (!counts.empty()) {
        size_t best = 0;
        for (const auto& [val, c] : counts) best = std::max(best, c);
        // Ties resolve to the nearest neighbor holding a modal value.
        for (const auto& nb : neighbors) {
          const Value& v = synthetic.row(nb.index).values[secret_idx];
          if (!is_missing(v) && counts[std::get<std::string>(v)] == best) {
            guess = v;
            break;
          }
        }
        correct = std::get<std::string>(guess) == std::get<std::string>(truth);
      }
    }
    out.attempts.push_back({value_to_string(guess), value_to_string(truth), correct});
    out.n_attempts++;
    if (correct) out.n_successes++;
  }
  if (skipped > 0)
    out.notes.push_back("skipped " + std::to_string(skipped) + " targets with missing secret");
  require(out.n_attempts > 0, Errc::too_small, "inference: every target has a missing secret");
  return out;
}

namespace {

// Threshold on member-ness scores maximizing TPR - FPR; classification,
// counts and the headline rates all follow from it.
void classify_scores(AttackOutcome& out, const std::vector<double>& member_scores,
                     const std::vector<double>& non_member_scores) {
  out.auc = stats::rank_auc(member_scores, non_member_scores);

  std::vector<double> thresholds = member_scores;
  thresholds.insert(thresholds.end(), non_member_scores.begin(), non_member_scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.insert(thresholds.begin(), std::numeric_limits<double>::infinity());

  double best_j = -2.0, best_t = thresholds.front();
  size_t best_tp = 0, best_fp = 0;
  for (double t : thresholds) {
    size_t tp = 0, fp = 0;
    for (double s : member_scores) tp += s >= t;
    for (double s : non_member_scores) fp += s >= t;
    double tpr = member_scores.empty() ? 0.0 : static_cast<double>(tp) / member_scores.size();
    double fpr = non_member_scores.empty() ? 0.0 : static_cast<double>(fp) / non_member_scores.size();
    if (tpr - fpr > best_j) {
      best_j = tpr - fpr;
      best_t = t;
      best_tp = tp;
      best_fp = fp;
    }
  }

  size_t tn = non_member_scores.size() - best_fp;
  double prec = best_tp + best_fp == 0 ? 0.0 : static_cast<double>(best_tp) / (best_tp + best_fp);
  double rec = member_scores.empty() ? 0.0 : static_cast<double>(best_tp) / member_scores.size();
  out.precision = prec;
  out.recall = rec;
  out.f1 = prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
  out.n_attempts = member_scores.size() + non_member_scores.size();
  out.n_successes = best_tp + tn;

  for (double s : member_scores)
    out.attempts.push_back({member_label(s >= best_t), "member", s >= best_t});
  for (double s : non_member_scores)
    out.attempts.push_back({member_label(s >= best_t), "non_member", s < best_t});
  out.notes.push_back("threshold=" + value_to_string(Value{best_t}));
}

}  // namespace

AttackOutcome mia_distance(const Dataset& synthetic, const Dataset& members, const Dataset& non_members,
                           const Preprocessor& p, Metric spec, int threads) {
  require(!synthetic.empty(), Errc::empty_dataset, "mia: empty synthetic dataset");
  require(!members.empty() && !non_members.empty(), Errc::too_small,
          "mia: need at least one member and one non-member candidate");

  auto tr = PreparedTable::build(p, synthetic);
  auto score_all = [&](const Dataset& d) {
    auto tq = PreparedTable::build(p, d);
    std::vector<double> scores(d.size());
    parallel_for(d.size(), threads, [&](size_t i) {
      scores[i] = -knn_prepared(p, spec, tq, i, tr, 1).front().distance;
    });
    return scores;
  };

  AttackOutcome out;
  out.attack_name = "mia_distance";
  classify_scores(out, score_all(members), score_all(non_members));
  return out;
}

AttackOutcome shadow_mia(const ThreatModel& tm, const GeneratorOracle& fit_and_sample, const Dataset& population,
                         const Dataset& targets, const std::vector<char>& target_is_member,
                         const Dataset& audited_synthetic, size_t m, size_t n_train,
                         const Preprocessor& p, Metric spec, uint64_t rng_seed) {
  require(tm.box == ThreatModel::Box::black_box || tm.box == ThreatModel::Box::white_box,
          Errc::box_insufficient, "shadow mia: requires black-box or white-box generator access");
  require(static_cast<bool>(fit_and_sample), Errc::bad_params, "shadow mia: no generator oracle");
  require(m >= 2 && m % 2 == 0, Errc::bad_params, "shadow mia: m must be even and at least 2");
  require(n_train >= 1, Errc::bad_params, "shadow mia: n_train must be positive");
  require(!targets.empty(), Errc::empty_dataset, "shadow mia: no targets");
  require(targets.size() == target_is_member.size(), Errc::size_mismatch,
          "shadow mia: membership labels do not match targets");
  require(!audited_synthetic.empty(), Errc::empty_dataset, "shadow mia: empty synthetic dataset");
  require(n_train <= population.size(), Errc::too_small, "shadow mia: population smaller than n_train");

  AttackOutcome out;
  out.attack_name = "shadow_mia";
  out.notes.push_back("m=" + std::to_string(m) + " n_train=" + std::to_string(n_train));

  std::vector<double> member_like(targets.size());
  std::vector<char> decisions(targets.size());
  for (size_t ti = 0; ti < targets.size(); ++ti) {
    const Record& target = targets.row(ti);
    double observed = nearest(target, audited_synthetic, p, spec).distance;

    // Population rows equal to the target are kept out of the "excluding" pool.
    std::vector<size_t> out_pool;
    for (size_t i = 0; i < population.size(); ++i)
      if (!exact_match(population.schema(), population.row(i), target)) out_pool.push_back(i);
    require(out_pool.size() >= n_train, Errc::too_small,
            "shadow mia: population too small once the target is excluded");

    uint64_t target_seed = Rng::derive(rng_seed, ti);
    double in_sum = 0.0, out_sum = 0.0;
    for (size_t s = 0; s < m; ++s) {
      bool in_shadow = s < m / 2;
      uint64_t shadow_seed = Rng::derive(target_seed, s);
      Rng rng(shadow_seed);
      std::vector<Record> rows;
      rows.reserve(n_train);
      if (in_shadow) {
        for (size_t idx : rng.sample_indices(population.size(), n_train - 1))
          rows.push_back(population.row(idx));
        rows.push_back(target);
      } else {
        for (size_t idx : rng.sample_indices(out_pool.size(), n_train))
          rows.push_back(population.row(out_pool[idx]));
      }
      Dataset train(population.schema(), std::move(rows), population.label());
      Dataset sample = fit_and_sample(train, Rng::derive(shadow_seed, 0x5ad0));
      require(!sample.empty(), Errc::fit_failure, "shadow mia: oracle returned an empty sample");
      double feature = nearest(target, sample, p, spec).distance;
      (in_shadow ? in_sum : out_sum) += feature;
    }
    double in_mean = in_sum / static_cast<double>(m / 2);
    double out_mean = out_sum / static_cast<double>(m / 2);
    double d_in = std::abs(observed - in_mean);
    double d_out = std::abs(observed - out_mean);
    bool member = d_in <= d_out;
    decisions[ti] = member;
    member_like[ti] = d_out - d_in;

    bool truth = target_is_member[ti] != 0;
    bool correct = member == truth;
    out.attempts.push_back({member_label(member), member_label(truth), correct});
    out.n_attempts++;
    if (correct) out.n_successes++;
  }

  std::vector<double> pos, neg;
  for (size_t ti = 0; ti < targets.size(); ++ti)
    (target_is_member[ti] ? pos : neg).push_back(member_like[ti]);
  if (!pos.empty() && !neg.empty()) out.auc = stats::rank_auc(pos, neg);
  return out;
}

AttackOutcome random_inference_baseline(const Dataset& synthetic, const Dataset& targets, const std::string& secret,
                                        const Preprocessor& p, std::optional<double> numeric_tolerance,
                                        size_t n_attempts, uint64_t rng_seed) {
  require(!synthetic.empty(), Errc::empty_dataset, "random inference: empty synthetic dataset");
  require(!targets.empty(), Errc::empty_dataset, "random inference: no targets");
  require(n_attempts >= 1, Errc::bad_params, "random inference: n_attempts must be positive");

  const auto& schema = targets.schema();
  size_t secret_idx = schema.require_attribute(secret);
  bool numeric_secret = schema.at(secret_idx).is_numeric();
  double tol = 0.0;
  if (numeric_secret) {
    tol = numeric_tolerance.value_or(0.05 * p.numeric_range(secret_idx));
    require(tol >= 0.0, Errc::bad_params, "random inference: negative tolerance");
  }

  size_t synth_secret = synthetic.schema().require_attribute(secret);
  std::vector<Value> domain = observed_values(synthetic)[synth_secret];
  require(!domain.empty(), Errc::bad_domain, "random inference: no observed secret values to draw from");

  AttackOutcome out;
  out.attack_name = "random_inference";
  Rng rng(rng_seed);
  size_t skipped = 0;
  for (size_t i = 0; i < n_attempts; ++i) {
    const Value& truth = targets.row(i % targets.size()).values[secret_idx];
    if (is_missing(truth)) {
      skipped++;
      continue;
    }
    const Value& guess = domain[rng.next_below(domain.size())];
    bool correct;
    if (numeric_secret) {
      correct = std::abs(std::get<double>(guess) - std::get<double>(truth)) <= tol;
    } else {
      correct = std::get<std::string>(guess) == std::get<std::string>(truth);
    }
    out.attempts.push_back({value_to_string(guess), value_to_string(truth), correct});
    out.n_attempts++;
    if (correct) out.n_successes++;
  }
  if (skipped > 0)
    out.notes.push_back("skipped " + std::to_string(skipped) + " targets with missing secret");
  require(out.n_attempts > 0, Errc::too_small, "random inference: every target has a missing secret");
  return out;
}

AttackOutcome random_linkage_baseline(size_t synthetic_size, size_t k, size_t n_attempts, uint64_t rng_seed) {
  require(synthetic_size >= 1, Errc::empty_dataset, "random linkage: empty synthetic dataset");
  require(k >= 1, Errc::bad_params, "random linkage: k must be positive");
  require(k <= synthetic_size, Errc::k_too_large, "random linkage: k exceeds synthetic dataset size");
  require(n_attempts >= 1, Errc::bad_params, "random linkage: n_attempts must be positive");

  AttackOutcome out;
  out.attack_name = "random_linkage";
  out.notes.push_back("k=" + std::to_string(k));
  Rng rng(rng_seed);
  for (size_t i = 0; i < n_attempts; ++i) {
    auto ia = rng.sample_indices(synthetic_size, k);
    auto ib = rng.sample_indices(synthetic_size, k);
    std::sort(ia.begin(), ia.end());
    std::sort(ib.begin(), ib.end());
    std::vector<size_t> common;
    std::set_intersection(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(common));
    bool linked = !common.empty();
    out.attempts.push_back({linked ? "synthetic row " + std::to_string(common.front()) : "none", "", linked});
    out.n_attempts++;
    if (linked) out.n_successes++;
  }
  return out;
}

AttackOutcome random_singling_out_baseline(const Dataset& synthetic, const Dataset& real, const SinglingOutMode& mode,
                                           size_t n_attacks, uint64_t rng_seed) {
  require(!synthetic.empty(), Errc::empty_dataset, "random singling out: empty synthetic dataset");
  require(!real.empty(), Errc::empty_dataset, "random singling out: empty real dataset");
  require(n_attacks >= 1, Errc::bad_params, "random singling out: n_attacks must be positive");

  const auto& schema = synthetic.schema();
  auto values = observed_values(synthetic);
  std::vector<size_t> eligible;
  for (size_t a = 0; a < schema.size(); ++a)
    if (!values[a].empty()) eligible.push_back(a);
  require(!eligible.empty(), Errc::not_enough_uniques,
          "random singling out: no attribute has observed values");

  size_t width = 1;
  if (const auto* mv = std::get_if<MultivariateMode>(&mode)) {
    width = mv->width;
    require(width >= 1, Errc::bad_params, "random singling out: width must be at least 1");
    require(width <= eligible.size(), Errc::bad_params,
            "random singling out: width exceeds usable attribute count");
  }

  Rng rng(rng_seed);
  auto sample_constraint = [&](size_t a) {
    const Value& v = values[a][rng.next_below(values[a].size())];
    Constraint c;
    c.attr = a;
    if (schema.at(a).is_categorical()) {
      c.kind = Constraint::eq;
      c.value = std::get<std::string>(v);
    } else {
      c.kind = rng.next_below(2) == 0 ? Constraint::le : Constraint::ge;
      c.threshold = std::get<double>(v);
    }
    return c;
  };

  std::vector<Predicate> preds;
  for (size_t i = 0; i < n_attacks; ++i) {
    Predicate pred;
    if (width == 1) {
      pred.cs.push_back(sample_constraint(eligible[rng.next_below(eligible.size())]));
    } else {
      auto pick = rng.sample_indices(eligible.size(), width);
      std::sort(pick.begin(), pick.end());
      for (size_t j : pick) pred.cs.push_back(sample_constraint(eligible[j]));
    }
    preds.push_back(std::move(pred));
  }
  return score_predicates(preds, real, "random_singling_out");
}

AttackOutcome random_membership_baseline(size_t n_members, size_t n_non_members, uint64_t rng_seed) {
  require(n_members + n_non_members > 0, Errc::too_small, "random membership: no candidates");
  AttackOutcome out;
  out.attack_name = "random_membership";
  Rng rng(rng_seed);
  auto flip = [&](bool truth) {
    bool guess = rng.next_below(2) == 1;
    bool correct = guess == truth;
    out.attempts.push_back({member_label(guess), member_label(truth), correct});
    out.n_attempts++;
    if (correct) out.n_successes++;
  };
  for (size_t i = 0; i < n_members; ++i) flip(true);
  for (size_t i = 0; i < n_non_members; ++i) flip(false);
  return out;
}

std::pair<AttackOutcome, AttackOutcome> control_run(const AttackClosure& attack, const Dataset& train_targets,
                                                    const Dataset& control_targets) {
  require(static_cast<bool>(attack), Errc::bad_params, "control run: no attack closure");
  AttackOutcome on_train = attack(train_targets);
  AttackOutcome on_control = attack(control_targets);
  return {std::move(on_train), std::move(on_control)};
}

RiskEstimate risk_estimate(const AttackOutcome& attack, const AttackOutcome& baseline,
                           RiskEstimate::Baseline kind) {
  require(attack.n_attempts > 0, Errc::empty_outcome, "risk estimate: attack made no attempts");
  bool absolute = kind == RiskEstimate::Baseline::absolute;
  if (!absolute)
    require(baseline.n_attempts > 0, Errc::empty_outcome, "risk estimate: baseline made no attempts");

  auto excess = [](double a, double b) {
    if (1.0 - b <= 0.0) return 0.0;
    return std::clamp((a - b) / (1.0 - b), 0.0, 1.0);
  };

  RiskEstimate r;
  r.baseline_kind = kind;
  r.attack_rate = attack.success_rate();
  r.baseline_rate = absolute ? 0.0 : baseline.success_rate();
  r.risk = excess(r.attack_rate, r.baseline_rate);
  auto wa = stats::wilson(attack.n_successes, attack.n_attempts);
  if (absolute) {
    r.ci_low = wa.lo;
    r.ci_high = wa.hi;
  } else {
    auto wb = stats::wilson(baseline.n_successes, baseline.n_attempts);
    // Excess rate is increasing in the attack rate and decreasing in the
    // baseline rate, so the extremes bound the interval.
    r.ci_low = excess(wa.lo, wb.hi);
    r.ci_high = excess(wa.hi, wb.lo);
  }
  return r;
}

double canary_recovery(const Dataset& synthetic, const std::vector<Record>& canaries, const Preprocessor& p,
                       Metric spec, double epsilon) {
  require(!canaries.empty(), Errc::empty_canaries, "canary recovery: no canaries");
  require(!synthetic.empty(), Errc::empty_dataset, "canary recovery: empty synthetic dataset");
  require(epsilon >= 0.0, Errc::out_of_range, "canary recovery: negative epsilon");
  size_t recovered = 0;
  for (const auto& c : canaries)
    if (nearest(c, synthetic, p, spec).distance <= epsilon) recovered++;
  return static_cast<double>(recovered) / static_cast<double>(canaries.size());
}

}  // namespace synthaudit
