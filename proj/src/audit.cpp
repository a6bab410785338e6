#include "synthaudit/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "synthaudit/anonymity.hpp"
#include "synthaudit/csv.hpp"
#include "synthaudit/indicators.hpp"
#include "synthaudit/nn.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/stats.hpp"

namespace synthaudit {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void cfg_fail(const std::string& msg) { raise(Errc::config_error, "config: " + msg); }

void check_keys(const ojson& o, const std::string& where, std::initializer_list<const char*> allowed) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) cfg_fail("unknown key \"" + it.key() + "\" in " + where);
  }
}

const ojson* find(const ojson& o, const char* key) {
  auto it = o.find(key);
  if (it == o.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string as_string(const ojson& v, const std::string& where) {
  if (!v.is_string()) cfg_fail(where + " must be a string");
  return v.get<std::string>();
}

double as_double(const ojson& v, const std::string& where) {
  if (!v.is_number()) cfg_fail(where + " must be a number");
  return v.get<double>();
}

uint64_t as_seed(const ojson& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0)
    return static_cast<uint64_t>(v.get<int64_t>());
  cfg_fail(where + " must be a non-negative integer");
}

size_t as_size(const ojson& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<size_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0)
    return static_cast<size_t>(v.get<int64_t>());
  cfg_fail(where + " must be a non-negative integer");
}

bool as_bool(const ojson& v, const std::string& where) {
  if (!v.is_boolean()) cfg_fail(where + " must be a boolean");
  return v.get<bool>();
}

std::vector<std::string> as_string_list(const ojson& v, const std::string& where) {
  if (!v.is_array()) cfg_fail(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(as_string(e, where + " entries"));
  return out;
}

std::string resolve_path(const std::string& raw, const std::string& base_dir) {
  fs::path p(raw);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

Metric parse_metric(const ojson& v, const std::string& where) {
  std::string name = as_string(v, where);
  try {
    return metric_from_name(name);
  } catch (const Error&) {
    cfg_fail(where + ": unknown metric \"" + name + "\"");
  }
}

EvaluationStrategy parse_strategy(const ojson& o) {
  if (!o.is_object()) cfg_fail("distance.strategy must be an object");
  const ojson* kind = find(o, "kind");
  if (!kind) cfg_fail("distance.strategy.kind is required");
  std::string name = as_string(*kind, "distance.strategy.kind");
  if (name == "bin") {
    check_keys(o, "distance.strategy", {"kind", "n_bins"});
    BinStrategy s;
    if (const ojson* v = find(o, "n_bins")) s.n_bins = as_size(*v, "distance.strategy.n_bins");
    return s;
  }
  if (name == "aggregate") {
    check_keys(o, "distance.strategy",
               {"kind", "numeric", "weight_numeric", "weight_categorical", "normalize"});
    AggregateStrategy s;
    if (const ojson* v = find(o, "numeric")) s.numeric = parse_metric(*v, "distance.strategy.numeric");
    if (const ojson* v = find(o, "weight_numeric"))
      s.weight_numeric = as_double(*v, "distance.strategy.weight_numeric");
    if (const ojson* v = find(o, "weight_categorical"))
      s.weight_categorical = as_double(*v, "distance.strategy.weight_categorical");
    if (const ojson* v = find(o, "normalize")) s.normalize = as_bool(*v, "distance.strategy.normalize");
    return s;
  }
  if (name == "ignore_categorical") {
    check_keys(o, "distance.strategy", {"kind"});
    return IgnoreCategoricalStrategy{};
  }
  if (name == "embed") {
    check_keys(o, "distance.strategy", {"kind"});
    return EmbedStrategy{};
  }
  cfg_fail("distance.strategy.kind: unknown strategy \"" + name + "\"");
}

GeneratorConfig parse_generator(const ojson& o) {
  if (!o.is_object()) cfg_fail("generator must be an object");
  check_keys(o, "generator",
             {"kind", "sigma", "flip_prob", "n_modes", "fit_seed", "sample_seed", "n_sample"});
  const ojson* kind = find(o, "kind");
  if (!kind) cfg_fail("generator.kind is required");
  std::string name = as_string(*kind, "generator.kind");

  GeneratorConfig g;
  if (name == "independent_marginal") {
    g.params = IndependentMarginalParams{};
  } else if (name == "seed_based_noise") {
    SeedBasedNoiseParams p;
    if (const ojson* v = find(o, "sigma")) p.sigma = as_double(*v, "generator.sigma");
    if (const ojson* v = find(o, "flip_prob")) p.flip_prob = as_double(*v, "generator.flip_prob");
    g.params = p;
  } else if (name == "memorizing") {
    g.params = MemorizingParams{};
  } else if (name == "mode_collapsed") {
    ModeCollapsedParams p;
    if (const ojson* v = find(o, "n_modes")) p.n_modes = as_size(*v, "generator.n_modes");
    if (const ojson* v = find(o, "sigma")) p.sigma = as_double(*v, "generator.sigma");
    g.params = p;
  } else {
    cfg_fail("generator.kind: unknown generator \"" + name + "\"");
  }
  if (const ojson* v = find(o, "fit_seed")) g.fit_seed = as_seed(*v, "generator.fit_seed");
  if (const ojson* v = find(o, "sample_seed")) g.sample_seed = as_seed(*v, "generator.sample_seed");
  if (const ojson* v = find(o, "n_sample")) g.n_sample = as_size(*v, "generator.n_sample");
  return g;
}

AttackConfig parse_attack(const ojson& o, size_t index) {
  std::string where = "attacks.suite[" + std::to_string(index) + "]";
  if (!o.is_object()) cfg_fail(where + " must be an object");
  const ojson* kind = find(o, "kind");
  if (!kind) cfg_fail(where + ".kind is required");
  std::string name = as_string(*kind, where + ".kind");
  if (name == "singling_out") {
    check_keys(o, where, {"kind", "mode", "width", "n_attacks"});
    SinglingOutConfig c;
    if (const ojson* v = find(o, "mode")) {
      std::string mode = as_string(*v, where + ".mode");
      if (mode == "multivariate") {
        c.multivariate = true;
      } else if (mode != "univariate") {
        cfg_fail(where + ".mode must be \"univariate\" or \"multivariate\"");
      }
    }
    if (const ojson* v = find(o, "width")) c.width = as_size(*v, where + ".width");
    if (const ojson* v = find(o, "n_attacks")) c.n_attacks = as_size(*v, where + ".n_attacks");
    return c;
  }
  if (name == "linkage") {
    check_keys(o, where, {"kind", "aux_a", "aux_b", "k"});
    LinkageConfig c;
    const ojson* a = find(o, "aux_a");
    const ojson* b = find(o, "aux_b");
    if (!a || !b) cfg_fail(where + ": aux_a and aux_b are required");
    c.aux_a = as_string_list(*a, where + ".aux_a");
    c.aux_b = as_string_list(*b, where + ".aux_b");
    if (const ojson* v = find(o, "k")) c.k = as_size(*v, where + ".k");
    return c;
  }
  if (name == "inference") {
    check_keys(o, where, {"kind", "aux", "secret", "k", "tolerance"});
    InferenceConfig c;
    const ojson* aux = find(o, "aux");
    const ojson* secret = find(o, "secret");
    if (!aux || !secret) cfg_fail(where + ": aux and secret are required");
    c.aux = as_string_list(*aux, where + ".aux");
    c.secret = as_string(*secret, where + ".secret");
    if (const ojson* v = find(o, "k")) c.k = as_size(*v, where + ".k");
    if (const ojson* v = find(o, "tolerance")) c.tolerance = as_double(*v, where + ".tolerance");
    return c;
  }
  if (name == "mia_distance") {
    check_keys(o, where, {"kind"});
    return MiaDistanceConfig{};
  }
  if (name == "shadow_mia") {
    check_keys(o, where, {"kind", "m", "n_train"});
    ShadowMiaConfig c;
    if (const ojson* v = find(o, "m")) c.m = as_size(*v, where + ".m");
    if (const ojson* v = find(o, "n_train")) c.n_train = as_size(*v, where + ".n_train");
    return c;
  }
  cfg_fail(where + ".kind: unknown attack \"" + name + "\"");
}

// Doubles rounded to 12 significant digits before they enter the report, so
// serialization is stable and platform differences in the last bits of long
// computations cannot flip a byte in the output.
double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

ojson jnum(double x) {
  if (std::isnan(x)) return nullptr;
  return round12(x);
}

ojson profile_summary(const DistanceProfile& prof) {
  ojson o;
  o["n"] = prof.values.size();
  o["mean"] = jnum(stats::mean(prof.values));
  o["median"] = jnum(stats::median(prof.values));
  o["stddev"] = jnum(stats::stddev(prof.values));
  ojson pct;
  for (double q : kReportedPercentiles)
    pct["p" + value_to_string(Value{q})] = jnum(stats::percentile(prof.values, q));
  o["percentiles"] = std::move(pct);
  o["self_excluded"] = prof.self_excluded;
  o["accelerated"] = prof.accelerated;
  return o;
}

ojson outcome_summary(const AttackOutcome& a) {
  ojson o;
  o["name"] = a.attack_name;
  o["n_attempts"] = a.n_attempts;
  o["n_successes"] = a.n_successes;
  o["success_rate"] = jnum(a.success_rate());
  if (a.auc) o["auc"] = jnum(*a.auc);
  if (a.precision) o["precision"] = jnum(*a.precision);
  if (a.recall) o["recall"] = jnum(*a.recall);
  if (a.f1) o["f1"] = jnum(*a.f1);
  if (!a.notes.empty()) o["notes"] = a.notes;
  return o;
}

ojson risk_summary(const RiskEstimate& r) {
  ojson o;
  o["baseline"] = baseline_name(r.baseline_kind);
  o["attack_rate"] = jnum(r.attack_rate);
  o["baseline_rate"] = jnum(r.baseline_rate);
  o["risk"] = jnum(r.risk);
  o["ci_low"] = jnum(r.ci_low);
  o["ci_high"] = jnum(r.ci_high);
  return o;
}

Dataset subsample(const Dataset& d, size_t n, uint64_t seed) {
  require(n <= d.size(), Errc::too_small, "subsample larger than dataset");
  Rng rng(seed);
  auto idx = rng.sample_indices(d.size(), n);
  std::sort(idx.begin(), idx.end());
  std::vector<Record> rows;
  rows.reserve(n);
  for (size_t i : idx) rows.push_back(d.row(i));
  return Dataset(d.schema(), std::move(rows), d.label());
}

// Random in-bounds records used as canaries; values drawn uniformly over the
// training data's observed ranges and declared domains.
std::vector<Record> craft_canaries(const Dataset& train, size_t n, uint64_t seed) {
  const auto& schema = train.schema();
  std::vector<std::pair<double, double>> ranges(schema.size(), {0.0, 1.0});
  for (size_t a = 0; a < schema.size(); ++a) {
    if (!schema.at(a).is_numeric()) continue;
    bool seen = false;
    double lo = 0.0, hi = 1.0;
    for (const auto& r : train.rows()) {
      if (is_missing(r.values[a])) continue;
      double x = std::get<double>(r.values[a]);
      if (!seen) {
        lo = hi = x;
        seen = true;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    const auto& nk = schema.at(a).numeric();
    if (!seen) {
      lo = nk.min.value_or(0.0);
      hi = nk.max.value_or(lo + 1.0);
    }
    ranges[a] = {lo, hi};
  }

  Rng rng(seed);
  std::vector<Record> out;
  for (size_t c = 0; c < n; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      Record rec;
      rec.values.resize(schema.size());
      for (size_t a = 0; a < schema.size(); ++a) {
        if (schema.at(a).is_numeric()) {
          auto [lo, hi] = ranges[a];
          rec.values[a] = lo + (hi - lo) * rng.next_double();
        } else {
          const auto& dom = schema.at(a).categorical().domain;
          require(!dom.empty(), Errc::bad_domain,
                  "canaries: categorical attribute with an empty domain: " + schema.at(a).name);
          rec.values[a] = dom[rng.next_below(dom.size())];
        }
      }
      bool duplicate = false;
      for (const auto& r : train.rows())
        if (exact_match(schema, r, rec)) {
          duplicate = true;
          break;
        }
      for (const auto& r : out)
        if (!duplicate && exact_match(schema, r, rec)) duplicate = true;
      if (!duplicate) {
        out.push_back(std::move(rec));
        placed = true;
      }
    }
    require(placed, Errc::duplicate_canary, "canaries: could not craft a record absent from the data");
  }
  return out;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

AuditConfig parse_config(const ojson& j, const std::string& base_dir) {
  if (!j.is_object()) cfg_fail("top level must be an object");
  check_keys(j, "top level",
             {"real", "synthetic", "schema", "splits", "distance", "generator", "indicators",
              "anonymity", "attacks", "canary"});

  AuditConfig cfg;
  cfg.raw = j;

  const ojson* real = find(j, "real");
  if (!real) cfg_fail("\"real\" path is required");
  cfg.real_path = resolve_path(as_string(*real, "real"), base_dir);
  if (const ojson* v = find(j, "synthetic"))
    cfg.synthetic_path = resolve_path(as_string(*v, "synthetic"), base_dir);
  if (const ojson* v = find(j, "schema"))
    cfg.schema_path = resolve_path(as_string(*v, "schema"), base_dir);

  if (const ojson* sp = find(j, "splits")) {
    check_keys(*sp, "splits", {"holdout_fraction", "holdout_seed", "control_fraction", "control_seed"});
    if (const ojson* v = find(*sp, "holdout_fraction"))
      cfg.holdout_fraction = as_double(*v, "splits.holdout_fraction");
    if (const ojson* v = find(*sp, "holdout_seed")) cfg.holdout_seed = as_seed(*v, "splits.holdout_seed");
    if (const ojson* v = find(*sp, "control_fraction"))
      cfg.control_fraction = as_double(*v, "splits.control_fraction");
    if (const ojson* v = find(*sp, "control_seed")) cfg.control_seed = as_seed(*v, "splits.control_seed");
  }
  if (cfg.holdout_fraction < 0.0 || cfg.holdout_fraction >= 1.0)
    cfg_fail("splits.holdout_fraction must lie in [0, 1)");
  if (cfg.control_fraction < 0.0 || cfg.control_fraction >= 1.0)
    cfg_fail("splits.control_fraction must lie in [0, 1)");

  if (const ojson* d = find(j, "distance")) {
    check_keys(*d, "distance", {"metric", "strategy"});
    if (const ojson* v = find(*d, "metric")) cfg.metric = parse_metric(*v, "distance.metric");
    if (const ojson* v = find(*d, "strategy")) cfg.strategy = parse_strategy(*v);
  }
  try {
    validate_strategy(cfg.strategy);
  } catch (const Error& e) {
    cfg_fail(e.what());
  }

  if (const ojson* v = find(j, "generator")) cfg.generator = parse_generator(*v);

  if (const ojson* ind = find(j, "indicators")) {
    check_keys(*ind, "indicators",
               {"enabled", "q_percentile", "ks_alpha", "mmd", "tcap", "seed_based"});
    if (const ojson* v = find(*ind, "enabled")) cfg.indicators.enabled = as_bool(*v, "indicators.enabled");
    if (const ojson* v = find(*ind, "q_percentile"))
      cfg.indicators.q_percentile = as_double(*v, "indicators.q_percentile");
    if (const ojson* v = find(*ind, "ks_alpha")) cfg.indicators.ks_alpha = as_double(*v, "indicators.ks_alpha");
    if (const ojson* v = find(*ind, "mmd")) cfg.indicators.mmd = as_bool(*v, "indicators.mmd");
    if (const ojson* v = find(*ind, "seed_based"))
      cfg.indicators.seed_based = as_bool(*v, "indicators.seed_based");
    if (const ojson* v = find(*ind, "tcap")) {
      check_keys(*v, "indicators.tcap", {"keys", "target"});
      TcapConfig t;
      const ojson* keys = find(*v, "keys");
      const ojson* target = find(*v, "target");
      if (!keys || !target) cfg_fail("indicators.tcap: keys and target are required");
      t.keys = as_string_list(*keys, "indicators.tcap.keys");
      t.target = as_string(*target, "indicators.tcap.target");
      cfg.indicators.tcap = std::move(t);
    }
    if (cfg.indicators.q_percentile < 0.0 || cfg.indicators.q_percentile > 100.0)
      cfg_fail("indicators.q_percentile must lie in [0, 100]");
    if (cfg.indicators.ks_alpha <= 0.0 || cfg.indicators.ks_alpha >= 1.0)
      cfg_fail("indicators.ks_alpha must lie in (0, 1)");
  }

  if (const ojson* an = find(j, "anonymity")) {
    check_keys(*an, "anonymity", {"enabled", "quasi_identifiers", "sensitive", "plausible_deniability"});
    AnonymityConfig a;
    if (const ojson* v = find(*an, "enabled")) a.enabled = as_bool(*v, "anonymity.enabled");
    const ojson* qi = find(*an, "quasi_identifiers");
    if (!qi) cfg_fail("anonymity.quasi_identifiers is required");
    a.quasi_identifiers = as_string_list(*qi, "anonymity.quasi_identifiers");
    if (const ojson* v = find(*an, "sensitive")) a.sensitive = as_string(*v, "anonymity.sensitive");
    if (const ojson* v = find(*an, "plausible_deniability")) {
      check_keys(*v, "anonymity.plausible_deniability", {"k", "gamma", "n_candidates", "seed"});
      PdConfig pd;
      if (const ojson* w = find(*v, "k")) pd.k = as_size(*w, "anonymity.plausible_deniability.k");
      if (const ojson* w = find(*v, "gamma"))
        pd.gamma = as_double(*w, "anonymity.plausible_deniability.gamma");
      if (const ojson* w = find(*v, "n_candidates"))
        pd.n_candidates = as_size(*w, "anonymity.plausible_deniability.n_candidates");
      if (const ojson* w = find(*v, "seed")) pd.seed = as_seed(*w, "anonymity.plausible_deniability.seed");
      a.pd = pd;
    }
    cfg.anonymity = std::move(a);
  }

  if (const ojson* at = find(j, "attacks")) {
    check_keys(*at, "attacks", {"enabled", "master_seed", "n_targets", "suite"});
    if (const ojson* v = find(*at, "enabled")) cfg.attacks.enabled = as_bool(*v, "attacks.enabled");
    if (const ojson* v = find(*at, "master_seed"))
      cfg.attacks.master_seed = as_seed(*v, "attacks.master_seed");
    if (const ojson* v = find(*at, "n_targets")) cfg.attacks.n_targets = as_size(*v, "attacks.n_targets");
    if (const ojson* v = find(*at, "suite")) {
      if (!v->is_array()) cfg_fail("attacks.suite must be an array");
      for (size_t i = 0; i < v->size(); ++i) cfg.attacks.suite.push_back(parse_attack((*v)[i], i));
    }
  }

  if (const ojson* ca = find(j, "canary")) {
    check_keys(*ca, "canary", {"enabled", "n_canaries", "seed", "epsilon"});
    CanaryConfig c;
    if (const ojson* v = find(*ca, "enabled")) c.enabled = as_bool(*v, "canary.enabled");
    if (const ojson* v = find(*ca, "n_canaries")) c.n_canaries = as_size(*v, "canary.n_canaries");
    if (const ojson* v = find(*ca, "seed")) c.seed = as_seed(*v, "canary.seed");
    if (const ojson* v = find(*ca, "epsilon")) c.epsilon = as_double(*v, "canary.epsilon");
    if (c.epsilon < 0.0) cfg_fail("canary.epsilon must be non-negative");
    cfg.canary = c;
  }

  if (!cfg.synthetic_path && !cfg.generator)
    cfg_fail("either a \"synthetic\" path or a \"generator\" section is required");
  return cfg;
}

AuditConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_error, "cannot open config file: " + path);
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const std::exception& e) {
    cfg_fail(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string());
}

namespace {

struct AuditState {
  PrivacyReport report;
  std::vector<std::string> warnings;

  void item_error(const std::string& item, const Error& e) {
    report.item_errors.push_back({item, errc_name(e.code()), e.what()});
  }

  template <class Fn>
  bool guard(const std::string& item, Fn&& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      item_error(item, e);
    } catch (const std::exception& e) {
      report.item_errors.push_back({item, "InternalError", e.what()});
    }
    return false;
  }
};

void validate_attribute_refs(const AuditConfig& cfg, const AttributeSchema& schema) {
  auto need = [&](const std::string& name, const std::string& where) {
    if (!schema.index_of(name))
      cfg_fail("unknown attribute \"" + name + "\" in " + where);
  };
  if (cfg.indicators.tcap) {
    for (const auto& k : cfg.indicators.tcap->keys) need(k, "indicators.tcap.keys");
    need(cfg.indicators.tcap->target, "indicators.tcap.target");
  }
  if (cfg.anonymity) {
    for (const auto& q : cfg.anonymity->quasi_identifiers) need(q, "anonymity.quasi_identifiers");
    if (cfg.anonymity->sensitive) need(*cfg.anonymity->sensitive, "anonymity.sensitive");
  }
  for (size_t i = 0; i < cfg.attacks.suite.size(); ++i) {
    std::string where = "attacks.suite[" + std::to_string(i) + "]";
    if (const auto* l = std::get_if<LinkageConfig>(&cfg.attacks.suite[i])) {
      for (const auto& a : l->aux_a) need(a, where + ".aux_a");
      for (const auto& b : l->aux_b) need(b, where + ".aux_b");
    } else if (const auto* inf = std::get_if<InferenceConfig>(&cfg.attacks.suite[i])) {
      for (const auto& a : inf->aux) need(a, where + ".aux");
      need(inf->secret, where + ".secret");
    }
  }
}

}  // namespace

PrivacyReport run_audit(const AuditConfig& cfg, unsigned sections, int threads) {
  Timer total_timer;
  AuditState st;
  ojson& body = st.report.body;
  ojson& timings = st.report.timings;

  body["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  body["config"] = cfg.raw.is_null() ? ojson::object() : cfg.raw;

  // ---- setup: load, split, generate, preprocess (failures are fatal) ----
  Timer load_timer;
  AttributeSchema schema;
  std::string schema_source;
  Dataset real;
  std::optional<Dataset> synth_from_file;
  if (cfg.schema_path) {
    schema = load_schema_json(*cfg.schema_path);
    schema_source = "file";
    real = load_csv(cfg.real_path, schema, "real");
    if (cfg.synthetic_path) synth_from_file = load_csv(*cfg.synthetic_path, schema, "synthetic");
  } else {
    schema_source = "inferred";
    real = load_csv(cfg.real_path, InferSchema{}, "real");
    schema = real.schema();
    if (cfg.synthetic_path) {
      synth_from_file = load_csv(*cfg.synthetic_path, InferSchema{}, "synthetic");
      schema = unify_schemas(schema, synth_from_file->schema());
      real = real.with_schema(schema);
      synth_from_file = synth_from_file->with_schema(schema);
    }
  }
  validate_attribute_refs(cfg, schema);

  Dataset train_pool = real;
  Dataset control(schema, {}, "control");
  if (cfg.control_fraction > 0.0) {
    auto parts = split(real, {cfg.control_fraction, cfg.control_seed, SplitPurpose::control});
    control = std::move(parts.first);
    train_pool = std::move(parts.second);
  }
  Dataset train = train_pool;
  Dataset holdout(schema, {}, "holdout");
  if (cfg.holdout_fraction > 0.0) {
    auto parts = split(train_pool, {cfg.holdout_fraction, cfg.holdout_seed, SplitPurpose::holdout});
    holdout = std::move(parts.first);
    train = std::move(parts.second);
  }
  require(!train.empty(), Errc::too_small, "training partition is empty after splits");

  std::optional<Generator> gen;
  if (cfg.generator) gen = Generator::fit(train, cfg.generator->params, cfg.generator->fit_seed);

  bool seed_paired = false;
  std::string synthetic_source;
  Dataset synthetic;
  if (synth_from_file) {
    synthetic = synth_from_file->relabeled("synthetic");
    synthetic_source = "file";
  } else {
    size_t n = cfg.generator->n_sample.value_or(train.size());
    if (gen->kind() == GeneratorKind::seed_based_noise && n == train.size()) {
      synthetic = gen->seed_generate(train, cfg.generator->sample_seed);
      seed_paired = true;
    } else {
      synthetic = gen->sample(n, cfg.generator->sample_seed);
    }
    synthetic_source = "generator";
  }
  require(!synthetic.empty(), Errc::empty_dataset, "synthetic dataset is empty");

  Preprocessor prep = Preprocessor::fit(cfg.strategy, cfg.metric, real, synthetic);
  for (const auto& w : prep.warnings()) st.warnings.push_back(w);
  timings["load_ms"] = round12(load_timer.ms());

  ojson data;
  data["real_rows"] = real.size();
  data["train_rows"] = train.size();
  data["holdout_rows"] = holdout.size();
  data["control_rows"] = control.size();
  data["synthetic_rows"] = synthetic.size();
  data["synthetic_source"] = synthetic_source;
  data["schema_source"] = schema_source;
  data["seed_paired"] = seed_paired;
  ojson attrs = ojson::array();
  for (const auto& a : schema.attributes()) {
    ojson e;
    e["name"] = a.name;
    e["kind"] = a.is_numeric() ? "numeric" : "categorical";
    if (a.is_categorical()) e["domain_size"] = a.categorical().domain.size();
    attrs.push_back(std::move(e));
  }
  data["attributes"] = std::move(attrs);
  body["data"] = std::move(data);

  // ---- profiles (needed by the indicator section too) ----
  bool need_profiles = (sections & kSectionProfiles) || ((sections & kSectionIndicators) && cfg.indicators.enabled);
  std::optional<DistanceProfile> srd, ssd, rsd, rrd;
  bool holdout_used = false;
  if (need_profiles) {
    Timer t;
    st.guard("profiles", [&] {
      srd = profile(synthetic, train, ProfileKind::srd, prep, cfg.metric, threads);
      ssd = profile(synthetic, synthetic, ProfileKind::ssd, prep, cfg.metric, threads);
      rsd = profile(train, synthetic, ProfileKind::rsd, prep, cfg.metric, threads);
      if (!holdout.empty()) {
        rrd = profile(train, holdout, ProfileKind::rrd, prep, cfg.metric, threads);
        holdout_used = true;
      } else {
        rrd = profile(train, train, ProfileKind::rrd, prep, cfg.metric, threads);
        st.warnings.push_back(
            "no holdout split: RRD falls back to leave-one-out distances within the training data");
      }
    });
    timings["profiles_ms"] = round12(t.ms());
    if (srd) {
      ojson prof;
      prof["metric"] = metric_name(cfg.metric);
      prof["strategy"] = strategy_name(cfg.strategy);
      prof["holdout_used"] = holdout_used;
      prof["srd"] = profile_summary(*srd);
      prof["ssd"] = profile_summary(*ssd);
      prof["rsd"] = profile_summary(*rsd);
      prof["rrd"] = profile_summary(*rrd);
      if (sections & kSectionProfiles) body["profiles"] = std::move(prof);
      st.report.profile_columns.emplace_back("srd", srd->values);
      st.report.profile_columns.emplace_back("ssd", ssd->values);
      st.report.profile_columns.emplace_back("rsd", rsd->values);
      st.report.profile_columns.emplace_back("rrd", rrd->values);
    }
  }

  // ---- indicators ----
  if ((sections & kSectionIndicators) && cfg.indicators.enabled) {
    Timer t;
    ojson ind;
    st.guard("indicators.ims", [&] { ind["ims"] = jnum(ims(train, synthetic)); });
    if (srd && rrd) {
      st.guard("indicators.dcr", [&] {
        DcrSummary dcr = dcr_summary(*srd, *rrd);
        ojson o;
        o["proportion_at_risk"] = jnum(dcr.proportion_at_risk);
        o["holdout_used"] = dcr.holdout_used;
        size_t flagged = 0;
        for (char f : dcr.at_risk) flagged += f != 0;
        o["n_flagged"] = flagged;
        ind["dcr"] = std::move(o);
      });
      st.guard("indicators.below_percentile_share", [&] {
        ojson o;
        o["q"] = jnum(cfg.indicators.q_percentile);
        o["share"] = jnum(below_percentile_share(*srd, *rrd, cfg.indicators.q_percentile));
        ind["below_percentile_share"] = std::move(o);
      });
      st.guard("indicators.ks", [&] {
        KsResult ks = ks_two_sample(srd->values, rrd->values, cfg.indicators.ks_alpha);
        ojson o;
        o["statistic"] = jnum(ks.statistic);
        o["p_value"] = jnum(ks.p_value);
        o["p_method"] = ks.p_method;
        o["alpha"] = jnum(ks.alpha);
        o["reject"] = ks.reject;
        o["reject_at_005"] = ks.reject_at_005;
        o["reject_at_001"] = ks.reject_at_001;
        ind["ks_srd_vs_rrd"] = std::move(o);
      });
    } else {
      st.report.item_errors.push_back(
          {"indicators.dcr", "ProfileMismatch", "distance profiles unavailable"});
    }
    st.guard("indicators.adversarial_accuracy", [&] {
      AaPlResult aa_train = adversarial_accuracy(train, synthetic, prep, cfg.metric, threads);
      ojson o;
      o["train"] = jnum(aa_train.adversarial_accuracy);
      o["train_component_real"] = jnum(aa_train.component_real);
      o["train_component_synthetic"] = jnum(aa_train.component_synthetic);
      if (!holdout.empty()) {
        AaPlResult aa_hold = adversarial_accuracy(holdout, synthetic, prep, cfg.metric, threads);
        o["holdout"] = jnum(aa_hold.adversarial_accuracy);
        o["privacy_loss"] = jnum(privacy_loss(aa_train, aa_hold));
      }
      ind["adversarial_accuracy"] = std::move(o);
    });
    if (cfg.indicators.tcap) {
      st.guard("indicators.tcap", [&] {
        TcapResult r = tcap(train, synthetic, cfg.indicators.tcap->keys, cfg.indicators.tcap->target);
        ojson o;
        o["keys"] = cfg.indicators.tcap->keys;
        o["target"] = cfg.indicators.tcap->target;
        o["value"] = jnum(r.value);
        o["matched"] = r.matched;
        o["unmatched"] = r.unmatched;
        ind["tcap"] = std::move(o);
      });
    }
    if (cfg.indicators.mmd) {
      st.guard("indicators.mmd", [&] { ind["mmd2"] = jnum(mmd(train, synthetic, prep)); });
    }
    if (cfg.indicators.seed_based) {
      if (seed_paired) {
        st.guard("indicators.seed_based", [&] {
          SeedIndicators si = seed_indicators(train, synthetic, prep, cfg.metric, threads);
          ojson o;
          o["dbrl_rate"] = jnum(si.dbrl_rate);
          o["hidden_rate"] = jnum(si.hidden_rate);
          double mean_lc = 0.0;
          for (size_t c : si.local_cloaking) mean_lc += static_cast<double>(c);
          o["mean_local_cloaking"] = jnum(si.local_cloaking.empty() ? 0.0 : mean_lc / si.local_cloaking.size());
          ind["seed_based"] = std::move(o);
        });
      } else {
        st.warnings.push_back(
            "seed-paired indicators skipped: the synthetic sample is not seed-paired with the training data");
      }
    }
    body["indicators"] = std::move(ind);
    timings["indicators_ms"] = round12(t.ms());
  }

  // ---- anonymity ----
  if ((sections & kSectionAnonymity) && cfg.anonymity && cfg.anonymity->enabled) {
    Timer t;
    ojson an;
    const auto& ac = *cfg.anonymity;
    st.guard("anonymity.k_anonymity", [&] {
      auto part = equivalence_classes(synthetic, ac.quasi_identifiers);
      size_t kmin = synthetic.empty() ? 0 : SIZE_MAX;
      for (const auto& c : part.classes) kmin = std::min(kmin, c.rows.size());
      an["quasi_identifiers"] = ac.quasi_identifiers;
      an["n_classes"] = part.classes.size();
      an["k_anonymity"] = kmin == SIZE_MAX ? 0 : kmin;
    });
    if (ac.sensitive) {
      st.guard("anonymity.l_diversity", [&] {
        an["sensitive"] = *ac.sensitive;
        an["l_diversity"] = l_diversity(synthetic, ac.quasi_identifiers, *ac.sensitive);
      });
    }
    if (ac.pd) {
      st.guard("anonymity.plausible_deniability", [&] {
        require(gen && gen->kind() == GeneratorKind::seed_based_noise, Errc::config_error,
                "plausible deniability requires a seed-based generator with a density oracle");
        require(seed_paired, Errc::config_error,
                "plausible deniability requires a seed-paired synthetic sample");
        DensityOracle oracle = [&](const Record& seed, const Record& output) {
          return gen->density(seed, output);
        };
        size_t n = std::min(ac.pd->n_candidates, synthetic.size());
        require(n > 0, Errc::too_small, "plausible deniability: no candidate records");
        Rng rng(ac.pd->seed);
        auto idx = rng.sample_indices(synthetic.size(), n);
        std::sort(idx.begin(), idx.end());
        size_t releasable = 0;
        PdParams params{ac.pd->k, ac.pd->gamma};
        for (size_t i : idx)
          if (pd_check(oracle, train, synthetic.row(i), i, params).releasable) releasable++;
        ojson o;
        o["k"] = ac.pd->k;
        o["gamma"] = jnum(ac.pd->gamma);
        o["n_checked"] = n;
        o["n_releasable"] = releasable;
        o["releasable_share"] = jnum(static_cast<double>(releasable) / static_cast<double>(n));
        an["plausible_deniability"] = std::move(o);
      });
    }
    body["anonymity"] = std::move(an);
    timings["anonymity_ms"] = round12(t.ms());
  }

  // ---- attacks ----
  if ((sections & kSectionAttacks) && cfg.attacks.enabled && !cfg.attacks.suite.empty()) {
    Timer t;
    ojson attacks = ojson::array();
    uint64_t master = cfg.attacks.master_seed;

    std::optional<Dataset> train_targets, control_targets;
    st.guard("attacks.targets", [&] {
      size_t n_t = std::min(cfg.attacks.n_targets, train.size());
      require(n_t > 0, Errc::too_small, "attacks: no training targets available");
      train_targets = subsample(train, n_t, Rng::derive(master, 9001));
      if (!control.empty()) {
        size_t n_c = std::min(cfg.attacks.n_targets, control.size());
        control_targets = subsample(control, n_c, Rng::derive(master, 9002));
      }
    });

    for (size_t ai = 0; ai < cfg.attacks.suite.size(); ++ai) {
      uint64_t attack_seed = Rng::derive(master, ai);
      std::string label = "attacks.suite[" + std::to_string(ai) + "]";
      ojson entry;
      entry["index"] = ai;
      entry["seed"] = attack_seed;

      auto log = [&](const AttackOutcome& o) {
        st.report.attack_log.emplace_back(std::to_string(ai) + ":" + o.attack_name, o);
      };

      bool ok = st.guard(label, [&] {
        const AttackConfig& acfg = cfg.attacks.suite[ai];
        if (const auto* so = std::get_if<SinglingOutConfig>(&acfg)) {
          SinglingOutMode mode;
          if (so->multivariate) {
            mode = MultivariateMode{so->width};
          } else {
            mode = UnivariateMode{};
          }
          AttackOutcome attack = singling_out_attack(synthetic, train, mode, so->n_attacks, attack_seed);
          AttackOutcome rnd = random_singling_out_baseline(synthetic, train, mode, attack.n_attempts,
                                                           Rng::derive(attack_seed, 1));
          entry["kind"] = "singling_out";
          entry["mode"] = so->multivariate ? "multivariate" : "univariate";
          if (so->multivariate) entry["width"] = so->width;
          entry["outcome"] = outcome_summary(attack);
          entry["baselines"] = ojson{{"random", outcome_summary(rnd)}};
          entry["risk"] = ojson{{"vs_random",
                                 risk_summary(risk_estimate(attack, rnd, RiskEstimate::Baseline::random))}};
          entry["notes"] = ojson::array({"control baseline not applicable: the attack has no target list"});
          log(attack);
          log(rnd);
        } else if (const auto* lk = std::get_if<LinkageConfig>(&acfg)) {
          require(train_targets.has_value(), Errc::too_small, "linkage: no targets");
          AttackClosure closure = [&](const Dataset& targets) {
            return linkage_attack(synthetic, targets, lk->aux_a, lk->aux_b, lk->k, prep, cfg.metric,
                                  attack_seed);
          };
          AttackOutcome attack = closure(*train_targets);
          AttackOutcome rnd = random_linkage_baseline(synthetic.size(), lk->k, attack.n_attempts,
                                                      Rng::derive(attack_seed, 1));
          entry["kind"] = "linkage";
          entry["outcome"] = outcome_summary(attack);
          ojson baselines{{"random", outcome_summary(rnd)}};
          ojson risk{{"vs_random",
                      risk_summary(risk_estimate(attack, rnd, RiskEstimate::Baseline::random))}};
          log(attack);
          log(rnd);
          if (control_targets) {
            AttackOutcome ctl = closure(*control_targets);
            baselines["control"] = outcome_summary(ctl);
            risk["vs_control"] = risk_summary(risk_estimate(attack, ctl, RiskEstimate::Baseline::control));
            log(ctl);
          }
          entry["baselines"] = std::move(baselines);
          entry["risk"] = std::move(risk);
        } else if (const auto* inf = std::get_if<InferenceConfig>(&acfg)) {
          require(train_targets.has_value(), Errc::too_small, "inference: no targets");
          AttackClosure closure = [&](const Dataset& targets) {
            return inference_attack(synthetic, targets, inf->aux, inf->secret, inf->k, prep, cfg.metric,
                                    inf->tolerance);
          };
          AttackOutcome attack = closure(*train_targets);
          AttackOutcome rnd = random_inference_baseline(synthetic, *train_targets, inf->secret, prep,
                                                        inf->tolerance, attack.n_attempts,
                                                        Rng::derive(attack_seed, 1));
          entry["kind"] = "inference";
          entry["secret"] = inf->secret;
          entry["outcome"] = outcome_summary(attack);
          ojson baselines{{"random", outcome_summary(rnd)}};
          ojson risk{{"vs_random",
                      risk_summary(risk_estimate(attack, rnd, RiskEstimate::Baseline::random))}};
          log(attack);
          log(rnd);
          if (control_targets) {
            AttackOutcome ctl = closure(*control_targets);
            baselines["control"] = outcome_summary(ctl);
            risk["vs_control"] = risk_summary(risk_estimate(attack, ctl, RiskEstimate::Baseline::control));
            log(ctl);
          }
          entry["baselines"] = std::move(baselines);
          entry["risk"] = std::move(risk);
        } else if (std::holds_alternative<MiaDistanceConfig>(acfg)) {
          require(train_targets.has_value(), Errc::too_small, "mia: no targets");
          require(control_targets.has_value(), Errc::too_small,
                  "mia: membership inference needs a control split for non-member candidates");
          AttackOutcome attack = mia_distance(synthetic, *train_targets, *control_targets, prep,
                                              cfg.metric, threads);
          AttackOutcome rnd = random_membership_baseline(train_targets->size(), control_targets->size(),
                                                         Rng::derive(attack_seed, 1));
          entry["kind"] = "mia_distance";
          entry["outcome"] = outcome_summary(attack);
          entry["baselines"] = ojson{{"random", outcome_summary(rnd)}};
          entry["risk"] = ojson{{"vs_random",
                                 risk_summary(risk_estimate(attack, rnd, RiskEstimate::Baseline::random))}};
          log(attack);
          log(rnd);
        } else if (const auto* sm = std::get_if<ShadowMiaConfig>(&acfg)) {
          require(gen.has_value(), Errc::box_insufficient,
                  "shadow mia: requires a generator section (black-box access)");
          require(train_targets.has_value(), Errc::too_small, "shadow mia: no targets");
          require(control_targets.has_value(), Errc::too_small,
                  "shadow mia: needs a control split for non-member candidates");
          std::vector<Record> rows;
          std::vector<char> is_member;
          for (const auto& r : train_targets->rows()) {
            rows.push_back(r);
            is_member.push_back(1);
          }
          for (const auto& r : control_targets->rows()) {
            rows.push_back(r);
            is_member.push_back(0);
          }
          Dataset targets(schema, std::move(rows), "real");
          ThreatModel tm;
          tm.box = ThreatModel::Box::black_box;
          GeneratorParams params = cfg.generator->params;
          size_t sample_n = synthetic.size();
          GeneratorOracle oracle = [params, sample_n](const Dataset& shadow_train, uint64_t seed) {
            Generator g = Generator::fit(shadow_train, params, Rng::derive(seed, 1));
            return g.sample(sample_n, Rng::derive(seed, 2));
          };
          size_t n_train = sm->n_train.value_or(train.size());
          AttackOutcome attack = shadow_mia(tm, oracle, real, targets, is_member, synthetic, sm->m,
                                            n_train, prep, cfg.metric, attack_seed);
          AttackOutcome rnd = random_membership_baseline(train_targets->size(), control_targets->size(),
                                                         Rng::derive(attack_seed, 1));
          entry["kind"] = "shadow_mia";
          entry["m"] = sm->m;
          entry["n_train"] = n_train;
          entry["outcome"] = outcome_summary(attack);
          entry["baselines"] = ojson{{"random", outcome_summary(rnd)}};
          entry["risk"] = ojson{{"vs_random",
                                 risk_summary(risk_estimate(attack, rnd, RiskEstimate::Baseline::random))}};
          log(attack);
          log(rnd);
        }
      });
      if (!ok) entry["error"] = st.report.item_errors.back().code;
      attacks.push_back(std::move(entry));
    }
    body["attacks"] = std::move(attacks);
    timings["attacks_ms"] = round12(t.ms());
  }

  // ---- canary workflow: plant, refit, regenerate, measure recovery ----
  if ((sections & kSectionCanary) && cfg.canary && cfg.canary->enabled) {
    Timer t;
    st.guard("canary", [&] {
      require(gen.has_value(), Errc::config_error,
              "canary workflow requires a generator section (the generator is refit on planted data)");
      require(cfg.canary->n_canaries > 0, Errc::empty_canaries, "canary: n_canaries must be positive");
      auto canaries = craft_canaries(train, cfg.canary->n_canaries, cfg.canary->seed);
      CanaryInsertion planted = insert_canaries(train, canaries, Rng::derive(cfg.canary->seed, 1));
      Generator refit = Generator::fit(planted.dataset, cfg.generator->params, cfg.generator->fit_seed);
      Dataset resample;
      if (refit.kind() == GeneratorKind::seed_based_noise) {
        resample = refit.seed_generate(planted.dataset, cfg.generator->sample_seed);
      } else {
        resample = refit.sample(synthetic.size(), cfg.generator->sample_seed);
      }
      double rate = canary_recovery(resample, canaries, prep, cfg.metric, cfg.canary->epsilon);
      ojson o;
      o["n_canaries"] = cfg.canary->n_canaries;
      o["epsilon"] = jnum(cfg.canary->epsilon);
      o["recovery_rate"] = jnum(rate);
      body["canary"] = std::move(o);
    });
    timings["canary_ms"] = round12(t.ms());
  }

  body["warnings"] = st.warnings;
  ojson errors = ojson::array();
  for (const auto& e : st.report.item_errors)
    errors.push_back(ojson{{"item", e.item}, {"code", e.code}, {"message", e.message}});
  body["errors"] = std::move(errors);
  timings["total_ms"] = round12(total_timer.ms());
  return st.report;
}

void emit(const PrivacyReport& report, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, Errc::io_error, "cannot create output directory: " + out_dir);

  auto write_file = [&](const std::string& name, const std::string& content) {
    fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::io_error, "cannot write " + path.string());
    out << content;
    out.flush();
    require(out.good(), Errc::io_error, "write failed: " + path.string());
  };

  write_file("report.json", report.body.dump(2) + "\n");
  write_file("timings.json", report.timings.dump(2) + "\n");

  std::string profiles;
  {
    std::vector<std::string> names;
    size_t max_len = 0;
    for (const auto& [name, values] : report.profile_columns) {
      names.push_back(name);
      max_len = std::max(max_len, values.size());
    }
    for (size_t c = 0; c < names.size(); ++c) profiles += (c ? "," : "") + names[c];
    profiles += "\n";
    for (size_t i = 0; i < max_len; ++i) {
      for (size_t c = 0; c < report.profile_columns.size(); ++c) {
        const auto& values = report.profile_columns[c].second;
        if (c) profiles += ',';
        if (i < values.size()) profiles += value_to_string(Value{values[i]});
      }
      profiles += "\n";
    }
  }
  write_file("profiles.csv", profiles);

  std::string attacks = "attack,attempt,guess,truth,correct\n";
  for (const auto& [label, outcome] : report.attack_log) {
    for (size_t i = 0; i < outcome.attempts.size(); ++i) {
      const auto& at = outcome.attempts[i];
      attacks += csv_escape(label) + "," + std::to_string(i) + "," + csv_escape(at.guess) + "," +
                 csv_escape(at.truth) + "," + (at.correct ? "true" : "false") + "\n";
    }
  }
  write_file("attacks.csv", attacks);
}

}  // namespace synthaudit
