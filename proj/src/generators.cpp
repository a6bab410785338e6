#include "synthaudit/generators.hpp"

#include <algorithm>
#include <cmath>

#include "synthaudit/rng.hpp"

namespace synthaudit {

namespace {

constexpr size_t kHistogramBins = 20;

struct NumericMarginal {
  std::vector<double> edges;   // kHistogramBins+1 (or 2 when degenerate)
  std::vector<double> counts;  // per bin
  double total = 0.0;          // non-missing observations
  double missing = 0.0;        // missing observations
};

struct CategoricalMarginal {
  std::vector<double> counts;  // per domain code
  double total = 0.0;
  double missing = 0.0;
};

double gaussian_pdf(double gap, double sd) {
  return std::exp(-0.5 * (gap / sd) * (gap / sd)) / (sd * std::sqrt(2.0 * M_PI));
}

}  // namespace

struct Generator::State {
  GeneratorKind kind = GeneratorKind::memorizing;
  GeneratorParams params;
  AttributeSchema schema;
  // IndependentMarginal
  std::vector<NumericMarginal> numeric_marginals;        // indexed by attribute
  std::vector<CategoricalMarginal> categorical_marginals;
  // Memorizing / SeedBasedNoise (seed list) / general fallback
  std::vector<Record> rows;
  // SeedBasedNoise
  std::vector<double> noise_sd;  // per attribute, numeric only
  // ModeCollapsed
  std::vector<Record> mode_rows;
};

const char* generator_kind_name(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::independent_marginal: return "independent_marginal";
    case GeneratorKind::seed_based_noise: return "seed_based_noise";
    case GeneratorKind::memorizing: return "memorizing";
    case GeneratorKind::mode_collapsed: return "mode_collapsed";
  }
  return "?";
}

GeneratorKind generator_kind_from_name(std::string_view name) {
  if (name == "independent_marginal") return GeneratorKind::independent_marginal;
  if (name == "seed_based_noise") return GeneratorKind::seed_based_noise;
  if (name == "memorizing") return GeneratorKind::memorizing;
  if (name == "mode_collapsed") return GeneratorKind::mode_collapsed;
  raise(Errc::bad_params, "unknown generator kind '" + std::string(name) + "'");
}

Generator Generator::fit(const Dataset& train, const GeneratorParams& params, uint64_t rng_seed) {
  require(!train.empty(), Errc::empty_train, "generator fit on an empty training set");
  auto st = std::make_shared<State>();
  st->params = params;
  st->schema = train.schema();
  size_t n_attr = train.schema().size();

  if (std::holds_alternative<IndependentMarginalParams>(params)) {
    st->kind = GeneratorKind::independent_marginal;
    st->numeric_marginals.resize(n_attr);
    st->categorical_marginals.resize(n_attr);
    for (size_t a = 0; a < n_attr; ++a) {
      const Attribute& attr = train.schema().at(a);
      if (attr.is_numeric()) {
        NumericMarginal& m = st->numeric_marginals[a];
        double lo = 0.0, hi = 0.0;
        size_t n = 0;
        for (const Record& r : train.rows()) {
          const Value& v = r.values[a];
          if (is_missing(v)) {
            m.missing += 1.0;
            continue;
          }
          double x = std::get<double>(v);
          if (n == 0) lo = hi = x;
          lo = std::min(lo, x);
          hi = std::max(hi, x);
          ++n;
        }
        size_t bins = (n == 0 || hi == lo) ? 1 : kHistogramBins;
        m.edges.resize(bins + 1);
        for (size_t k = 0; k <= bins; ++k) {
          m.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
        }
        m.counts.assign(bins, 0.0);
        for (const Record& r : train.rows()) {
          const Value& v = r.values[a];
          if (is_missing(v)) continue;
          double x = std::get<double>(v);
          size_t idx = 0;
          if (hi > lo) {
            idx = static_cast<size_t>(std::clamp(
                static_cast<long>(std::floor((x - lo) / (hi - lo) * static_cast<double>(bins))),
                0L, static_cast<long>(bins) - 1));
          }
          m.counts[idx] += 1.0;
          m.total += 1.0;
        }
      } else {
        CategoricalMarginal& m = st->categorical_marginals[a];
        m.counts.assign(attr.categorical().domain.size(), 0.0);
        for (const Record& r : train.rows()) {
          const Value& v = r.values[a];
          if (is_missing(v)) {
            m.missing += 1.0;
            continue;
          }
          auto code = train.schema().domain_code(a, std::get<std::string>(v));
          m.counts[*code] += 1.0;
          m.total += 1.0;
        }
      }
    }
  } else if (const auto* sp = std::get_if<SeedBasedNoiseParams>(&params)) {
    require(sp->sigma > 0.0, Errc::bad_params, "SeedBasedNoise.sigma must be > 0");
    require(sp->flip_prob >= 0.0 && sp->flip_prob < 1.0, Errc::bad_params,
            "SeedBasedNoise.flip_prob must lie in [0, 1)");
    st->kind = GeneratorKind::seed_based_noise;
    st->rows = train.rows();
    st->noise_sd.assign(n_attr, 0.0);
    st->categorical_marginals.resize(n_attr);
    for (size_t a = 0; a < n_attr; ++a) {
      const Attribute& attr = train.schema().at(a);
      if (attr.is_numeric()) {
        double sum = 0.0, ss = 0.0;
        size_t n = 0;
        for (const Record& r : train.rows()) {
          if (is_missing(r.values[a])) continue;
          sum += std::get<double>(r.values[a]);
          ++n;
        }
        double mean = n ? sum / static_cast<double>(n) : 0.0;
        for (const Record& r : train.rows()) {
          if (is_missing(r.values[a])) continue;
          double d = std::get<double>(r.values[a]) - mean;
          ss += d * d;
        }
        double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        // A constant attribute would give a degenerate (zero-width) noise
        // distribution; fall back to sigma itself so the density stays
        // strictly positive.
        st->noise_sd[a] = sd > 0.0 ? sp->sigma * sd : sp->sigma;
      } else {
        CategoricalMarginal& m = st->categorical_marginals[a];
        m.counts.assign(attr.categorical().domain.size(), 0.0);
        for (const Record& r : train.rows()) {
          if (is_missing(r.values[a])) continue;
          auto code = train.schema().domain_code(a, std::get<std::string>(r.values[a]));
          m.counts[*code] += 1.0;
          m.total += 1.0;
        }
      }
    }
  } else if (std::holds_alternative<MemorizingParams>(params)) {
    st->kind = GeneratorKind::memorizing;
    st->rows = train.rows();
  } else {
    const auto& mp = std::get<ModeCollapsedParams>(params);
    require(mp.n_modes >= 1, Errc::bad_params, "ModeCollapsed.n_modes must be >= 1");
    require(mp.n_modes <= train.size(), Errc::bad_params,
            "ModeCollapsed.n_modes exceeds the training size");
    require(mp.sigma >= 0.0, Errc::bad_params, "ModeCollapsed.sigma must be >= 0");
    st->kind = GeneratorKind::mode_collapsed;
    Rng rng(rng_seed);
    std::vector<size_t> picks = rng.sample_indices(train.size(), mp.n_modes);
    std::sort(picks.begin(), picks.end());
    for (size_t i : picks) st->mode_rows.push_back(train.row(i));
  }

  Generator g;
  g.state_ = std::move(st);
  return g;
}

GeneratorKind Generator::kind() const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  return state_->kind;
}

const GeneratorParams& Generator::parameters() const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  return state_->params;
}

const AttributeSchema& Generator::schema() const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  return state_->schema;
}

const std::vector<Record>& Generator::modes() const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  require(state_->kind == GeneratorKind::mode_collapsed, Errc::bad_params,
          "modes() applies only to ModeCollapsed generators");
  return state_->mode_rows;
}

namespace {

// Clamp to declared schema bounds so noisy values still validate.
Value clamp_numeric(const Attribute& attr, double x) {
  const NumericKind& nk = attr.numeric();
  if (nk.min) x = std::max(x, *nk.min);
  if (nk.max) x = std::min(x, *nk.max);
  return x;
}

Value sample_categorical(const CategoricalMarginal& m, const Attribute& attr, Rng& rng) {
  double pick = rng.next_double() * m.total;
  double acc = 0.0;
  for (size_t c = 0; c < m.counts.size(); ++c) {
    acc += m.counts[c];
    if (pick < acc) return attr.categorical().domain[c];
  }
  for (size_t c = m.counts.size(); c > 0; --c) {
    if (m.counts[c - 1] > 0.0) return attr.categorical().domain[c - 1];
  }
  raise(Errc::internal_error, "empty categorical marginal");
}

}  // namespace

Dataset Generator::sample(size_t n, uint64_t rng_seed) const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  require(n >= 1, Errc::out_of_range, "sample: n must be >= 1");
  const State& st = *state_;
  Rng rng(rng_seed);
  std::vector<Record> out;
  out.reserve(n);

  switch (st.kind) {
    case GeneratorKind::independent_marginal: {
      for (size_t i = 0; i < n; ++i) {
        Record r;
        r.values.reserve(st.schema.size());
        for (size_t a = 0; a < st.schema.size(); ++a) {
          const Attribute& attr = st.schema.at(a);
          if (attr.is_numeric()) {
            const NumericMarginal& m = st.numeric_marginals[a];
            double all = m.total + m.missing;
            if (m.total == 0.0 || rng.next_double() * all < m.missing) {
              r.values.emplace_back(std::monostate{});
              continue;
            }
            double pick = rng.next_double() * m.total;
            double acc = 0.0;
            size_t bin = m.counts.size() - 1;
            for (size_t k = 0; k < m.counts.size(); ++k) {
              acc += m.counts[k];
              if (pick < acc) {
                bin = k;
                break;
              }
            }
            double lo = m.edges[bin], hi = m.edges[bin + 1];
            r.values.emplace_back(lo + rng.next_double() * (hi - lo));
          } else {
            const CategoricalMarginal& m = st.categorical_marginals[a];
            double all = m.total + m.missing;
            if (m.total == 0.0 || rng.next_double() * all < m.missing) {
              r.values.emplace_back(std::monostate{});
              continue;
            }
            r.values.push_back(sample_categorical(m, attr, rng));
          }
        }
        out.push_back(std::move(r));
      }
      break;
    }
    case GeneratorKind::memorizing: {
      for (size_t i = 0; i < n; ++i) {
        out.push_back(st.rows[rng.next_below(st.rows.size())]);
      }
      break;
    }
    case GeneratorKind::mode_collapsed: {
      const auto& mp = std::get<ModeCollapsedParams>(st.params);
      for (size_t i = 0; i < n; ++i) {
        Record r = st.mode_rows[rng.next_below(st.mode_rows.size())];
        if (mp.sigma > 0.0) {
          for (size_t a = 0; a < st.schema.size(); ++a) {
            const Attribute& attr = st.schema.at(a);
            if (!attr.is_numeric() || is_missing(r.values[a])) continue;
            double x = std::get<double>(r.values[a]) + rng.next_normal() * mp.sigma;
            r.values[a] = clamp_numeric(attr, x);
          }
        }
        out.push_back(std::move(r));
      }
      break;
    }
    case GeneratorKind::seed_based_noise: {
      // Bootstrap a seed, then apply the seed noise channel.
      const auto& sp = std::get<SeedBasedNoiseParams>(st.params);
      for (size_t i = 0; i < n; ++i) {
        const Record& seed = st.rows[rng.next_below(st.rows.size())];
        out.push_back(apply_noise_row(st, sp, seed, rng));
      }
      break;
    }
  }
  return Dataset(st.schema, std::move(out), "synthetic");
}

// Defined out of line so sample() and seed_generate() share it exactly.
Record Generator::apply_noise_row(const State& st, const SeedBasedNoiseParams& sp,
                                  const Record& seed, Rng& rng) {
  Record r = seed;
  for (size_t a = 0; a < st.schema.size(); ++a) {
    const Attribute& attr = st.schema.at(a);
    if (is_missing(r.values[a])) continue;  // missing stays missing
    if (attr.is_numeric()) {
      double x = std::get<double>(r.values[a]) + rng.next_normal() * st.noise_sd[a];
      r.values[a] = clamp_numeric(attr, x);
    } else {
      double u = rng.next_double();
      const CategoricalMarginal& m = st.categorical_marginals[a];
      if (u < sp.flip_prob && m.total > 0.0) {
        r.values[a] = sample_categorical(m, attr, rng);
      }
    }
  }
  return r;
}

Dataset Generator::seed_generate(const Dataset& seeds, uint64_t rng_seed) const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  const State& st = *state_;
  require(st.kind == GeneratorKind::seed_based_noise, Errc::bad_params,
          "seed_generate applies only to SeedBasedNoise generators");
  require(seeds.schema() == st.schema, Errc::schema_mismatch,
          "seed dataset schema differs from the training schema");
  require(!seeds.empty(), Errc::empty_dataset, "seed_generate: empty seed dataset");
  const auto& sp = std::get<SeedBasedNoiseParams>(st.params);
  Rng rng(rng_seed);
  std::vector<Record> out;
  out.reserve(seeds.size());
  for (const Record& seed : seeds.rows()) out.push_back(apply_noise_row(st, sp, seed, rng));
  return Dataset(st.schema, std::move(out), "synthetic");
}

double Generator::density(const Record& seed, const Record& output) const {
  require(fitted(), Errc::not_fitted, "generator is not fitted");
  const State& st = *state_;
  require(st.kind == GeneratorKind::seed_based_noise, Errc::bad_params,
          "density applies only to SeedBasedNoise generators");
  Dataset::validate_record(st.schema, seed, 0);
  Dataset::validate_record(st.schema, output, 0);
  const auto& sp = std::get<SeedBasedNoiseParams>(st.params);
  double dens = 1.0;
  for (size_t a = 0; a < st.schema.size(); ++a) {
    const Attribute& attr = st.schema.at(a);
    const Value& vs = seed.values[a];
    const Value& vo = output.values[a];
    if (is_missing(vs) || is_missing(vo)) {
      // The noise channel never creates or removes missingness.
      if (is_missing(vs) != is_missing(vo)) return 0.0;
      continue;
    }
    if (attr.is_numeric()) {
      double gap = std::get<double>(vo) - std::get<double>(vs);
      dens *= gaussian_pdf(gap, st.noise_sd[a]);
    } else {
      const CategoricalMarginal& m = st.categorical_marginals[a];
      auto code = st.schema.domain_code(a, std::get<std::string>(vo));
      double p_marg = m.total > 0.0 ? m.counts[*code] / m.total : 0.0;
      bool unchanged = std::get<std::string>(vo) == std::get<std::string>(vs);
      double p = unchanged ? (1.0 - sp.flip_prob) + sp.flip_prob * p_marg
                           : sp.flip_prob * p_marg;
      dens *= p;
    }
  }
  return dens;
}

}  // namespace synthaudit
