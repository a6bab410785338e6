#include "synthaudit/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace synthaudit {

namespace {

constexpr double kOneHotScale = M_SQRT1_2;  // 1/sqrt(2)
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_numeric_schema(const AttributeSchema& s) {
  for (const Attribute& a : s.attributes()) {
    if (!a.is_numeric()) return false;
  }
  return true;
}

// Strategy/metric compatibility. `need_fitted` additionally demands a fitted
// covariance for Mahalanobis; fit() turns it off because the covariance is
// estimated right after this check.
void check_compatible(const PreprocessorState& st, Metric spec, bool need_fitted = true) {
  const char* sname = strategy_name(st.strategy);
  auto fail = [&] {
    raise(Errc::incompatible_metric,
          std::string(metric_name(spec)) + " is not usable with the " + sname + " strategy");
  };
  if (std::holds_alternative<BinStrategy>(st.strategy)) {
    if (spec != Metric::hamming) fail();
  } else if (const auto* agg = std::get_if<AggregateStrategy>(&st.strategy)) {
    if (spec == Metric::gower) return;
    if ((spec == Metric::l1 || spec == Metric::euclidean) && spec == agg->numeric &&
        all_numeric_schema(st.schema)) {
      return;
    }
    fail();
  } else if (std::holds_alternative<IgnoreCategoricalStrategy>(st.strategy)) {
    if (spec != Metric::l1 && spec != Metric::euclidean && spec != Metric::cosine) fail();
  } else {
    if (spec == Metric::mahalanobis) {
      require(!need_fitted || !st.cholesky.empty(), Errc::incompatible_metric,
              "Mahalanobis needs a preprocessor fitted for it (no covariance present)");
      return;
    }
    if (spec != Metric::l1 && spec != Metric::euclidean && spec != Metric::cosine) fail();
  }
}

std::vector<double> cholesky_lower(const std::vector<double>& a, size_t d) {
  std::vector<double> l(d * d, 0.0);
  for (size_t j = 0; j < d; ++j) {
    double s = a[j * d + j];
    for (size_t k = 0; k < j; ++k) s -= l[j * d + k] * l[j * d + k];
    require(s > 0.0, Errc::fit_failure, "covariance matrix is not positive definite");
    l[j * d + j] = std::sqrt(s);
    for (size_t i = j + 1; i < d; ++i) {
      double t = a[i * d + j];
      for (size_t k = 0; k < j; ++k) t -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = t / l[j * d + j];
    }
  }
  return l;
}

void encode_row(const PreprocessorState& st, const Record& r, size_t i, PreparedTable& t) {
  size_t n_attr = st.schema.size();
  bool missing_any = false;
  for (size_t a = 0; a < n_attr; ++a) {
    const Value& v = r.values[a];
    const AttrPrep& ap = st.attrs[a];
    bool miss = is_missing(v);
    if (miss) missing_any = true;
    if (ap.numeric) {
      t.cat[i * n_attr + a] = -2;
      t.num[i * n_attr + a] = miss ? kNaN : std::get<double>(v);
    } else {
      t.num[i * n_attr + a] = kNaN;
      if (miss) {
        t.cat[i * n_attr + a] = -1;
      } else {
        auto code = st.schema.domain_code(a, std::get<std::string>(v));
        require(code.has_value(), Errc::schema_violation,
                "value outside domain of '" + st.schema.at(a).name + "'");
        t.cat[i * n_attr + a] = static_cast<int32_t>(*code);
      }
    }
    if (!t.bin.empty()) {
      int32_t code = -1;
      if (!miss) {
        if (ap.numeric) {
          const auto& e = ap.bin_edges;
          double val = std::get<double>(v);
          size_t nb = e.size() - 1;
          double width = (e.back() - e.front()) / static_cast<double>(nb);
          double raw = (val - e.front()) / width;
          long idx = static_cast<long>(std::floor(raw));
          idx = std::clamp(idx, 0L, static_cast<long>(nb) - 1);
          code = static_cast<int32_t>(idx);
        } else {
          code = t.cat[i * n_attr + a];
        }
      }
      t.bin[i * n_attr + a] = code;
    }
    if (!t.emb.empty() && ap.emb_len > 0) {
      double* out = &t.emb[i * st.emb_dim + ap.emb_offset];
      if (miss) {
        for (size_t k = 0; k < ap.emb_len; ++k) out[k] = kNaN;
      } else if (ap.numeric) {
        out[0] = (std::get<double>(v) - ap.mean) / ap.stddev;
      } else {
        for (size_t k = 0; k < ap.emb_len; ++k) out[k] = 0.0;
        out[static_cast<size_t>(t.cat[i * n_attr + a])] = kOneHotScale;
      }
    }
  }
  t.row_missing[i] = missing_any ? 1 : 0;
  if (missing_any) t.any_missing = true;
}

inline bool attr_missing(const PreparedTable& t, size_t i, size_t a, bool numeric) {
  if (numeric) return std::isnan(t.num[i * t.n_attr + a]);
  return t.cat[i * t.n_attr + a] < 0;
}

double eval_hamming(const PreprocessorState& st, const PreparedTable& ta, size_t i,
                    const PreparedTable& tb, size_t j, const std::vector<char>* mask) {
  size_t n_attr = st.schema.size();
  double acc = 0.0;
  for (size_t a = 0; a < n_attr; ++a) {
    if (mask && !(*mask)[a]) continue;
    int32_t ca = ta.bin[i * n_attr + a];
    int32_t cb = tb.bin[j * n_attr + a];
    if (ca < 0 && cb < 0) continue;
    if (ca < 0 || cb < 0) {
      acc += 1.0;
    } else if (ca != cb) {
      acc += 1.0;
    }
  }
  return acc;
}

double eval_aggregate(const PreprocessorState& st, const PreparedTable& ta, size_t i,
                      const PreparedTable& tb, size_t j, const std::vector<char>* mask) {
  const auto& agg = std::get<AggregateStrategy>(st.strategy);
  size_t n_attr = st.schema.size();
  double cat_sum = 0.0;
  double num_acc = 0.0;
  size_t n_eff = 0;
  for (size_t a = 0; a < n_attr; ++a) {
    if (mask && !(*mask)[a]) continue;
    const AttrPrep& ap = st.attrs[a];
    bool am = attr_missing(ta, i, a, ap.numeric);
    bool bm = attr_missing(tb, j, a, ap.numeric);
    if (am && bm) continue;
    ++n_eff;
    if (!ap.numeric) {
      if (am || bm) {
        cat_sum += 1.0;
      } else if (ta.cat[i * n_attr + a] != tb.cat[j * n_attr + a]) {
        cat_sum += 1.0;
      }
      continue;
    }
    double gap;
    if (am || bm) {
      gap = agg.normalize ? 1.0 : ap.range;
    } else {
      gap = std::fabs(ta.num[i * n_attr + a] - tb.num[j * n_attr + a]);
      if (agg.normalize) gap = ap.range > 0.0 ? gap / ap.range : 0.0;
    }
    if (agg.numeric == Metric::euclidean) {
      num_acc += gap * gap;
    } else {
      num_acc += gap;
    }
  }
  double num_dist = agg.numeric == Metric::euclidean ? std::sqrt(num_acc) : num_acc;
  double total = agg.weight_numeric * num_dist + agg.weight_categorical * cat_sum;
  if (agg.normalize && n_eff > 0) total /= static_cast<double>(n_eff);
  return total;
}

double eval_raw_numeric(const PreprocessorState& st, Metric spec, const PreparedTable& ta,
                        size_t i, const PreparedTable& tb, size_t j,
                        const std::vector<char>* mask) {
  size_t n_attr = st.schema.size();
  double acc = 0.0;
  for (size_t a = 0; a < n_attr; ++a) {
    if (mask && !(*mask)[a]) continue;
    const AttrPrep& ap = st.attrs[a];
    if (!ap.numeric) continue;
    bool am = attr_missing(ta, i, a, true);
    bool bm = attr_missing(tb, j, a, true);
    if (am && bm) continue;
    double gap = (am || bm) ? ap.range
                            : std::fabs(ta.num[i * n_attr + a] - tb.num[j * n_attr + a]);
    acc += spec == Metric::euclidean ? gap * gap : gap;
  }
  return spec == Metric::euclidean ? std::sqrt(acc) : acc;
}

double eval_embedded(const PreprocessorState& st, Metric spec, const PreparedTable& ta, size_t i,
                     const PreparedTable& tb, size_t j, const std::vector<char>* mask) {
  size_t n_attr = st.schema.size();
  size_t dim = st.emb_dim;
  const double* ea = &ta.emb[i * dim];
  const double* eb = &tb.emb[j * dim];
  // Fast path: identical summation order to the per-attribute loop, because
  // embedded coordinates are laid out in attribute order.
  if (!mask && !ta.row_missing[i] && !tb.row_missing[j]) {
    double acc = 0.0;
    if (spec == Metric::euclidean) {
      for (size_t k = 0; k < dim; ++k) {
        double d = ea[k] - eb[k];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    for (size_t k = 0; k < dim; ++k) acc += std::fabs(ea[k] - eb[k]);
    return acc;
  }
  double acc = 0.0;
  for (size_t a = 0; a < n_attr; ++a) {
    if (mask && !(*mask)[a]) continue;
    const AttrPrep& ap = st.attrs[a];
    if (ap.emb_len == 0) continue;
    bool am = attr_missing(ta, i, a, ap.numeric);
    bool bm = attr_missing(tb, j, a, ap.numeric);
    if (am && bm) continue;
    if (am || bm) {
      if (ap.numeric) {
        acc += spec == Metric::euclidean ? ap.emb_gap * ap.emb_gap : ap.emb_gap;
      } else {
        acc += spec == Metric::euclidean ? 1.0 : M_SQRT2;
      }
      continue;
    }
    for (size_t k = ap.emb_offset; k < ap.emb_offset + ap.emb_len; ++k) {
      double d = ea[k] - eb[k];
      acc += spec == Metric::euclidean ? d * d : std::fabs(d);
    }
  }
  return spec == Metric::euclidean ? std::sqrt(acc) : acc;
}

double eval_cosine(const PreprocessorState& st, const PreparedTable& ta, size_t i,
                   const PreparedTable& tb, size_t j, const std::vector<char>* mask) {
  size_t n_attr = st.schema.size();
  bool embedded = std::holds_alternative<EmbedStrategy>(st.strategy);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t a = 0; a < n_attr; ++a) {
    if (mask && !(*mask)[a]) continue;
    const AttrPrep& ap = st.attrs[a];
    if (!embedded && !ap.numeric) continue;
    if (embedded && ap.emb_len == 0) continue;
    if (attr_missing(ta, i, a, ap.numeric) || attr_missing(tb, j, a, ap.numeric)) continue;
    if (embedded) {
      for (size_t k = ap.emb_offset; k < ap.emb_offset + ap.emb_len; ++k) {
        double x = ta.emb[i * st.emb_dim + k];
        double y = tb.emb[j * st.emb_dim + k];
        dot += x * y;
        na += x * x;
        nb += y * y;
      }
    } else {
      double x = ta.num[i * n_attr + a];
      double y = tb.num[j * n_attr + a];
      dot += x * y;
      na += x * x;
      nb += y * y;
    }
  }
  require(na > 0.0 && nb > 0.0, Errc::zero_vector, "cosine similarity of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double eval_mahalanobis(const PreprocessorState& st, const PreparedTable& ta, size_t i,
                        const PreparedTable& tb, size_t j) {
  size_t dim = st.emb_dim;
  std::vector<double> diff(dim, 0.0);
  for (size_t a = 0; a < st.schema.size(); ++a) {
    const AttrPrep& ap = st.attrs[a];
    if (ap.emb_len == 0) continue;
    bool am = attr_missing(ta, i, a, ap.numeric);
    bool bm = attr_missing(tb, j, a, ap.numeric);
    if (am && bm) continue;
    if (am || bm) {
      double gap = ap.numeric ? ap.emb_gap : kOneHotScale;
      for (size_t k = ap.emb_offset; k < ap.emb_offset + ap.emb_len; ++k) diff[k] = gap;
      continue;
    }
    for (size_t k = ap.emb_offset; k < ap.emb_offset + ap.emb_len; ++k) {
      diff[k] = ta.emb[i * dim + k] - tb.emb[j * dim + k];
    }
  }
  // Solve L y = diff, distance = |y| since S^-1 = L^-T L^-1.
  const std::vector<double>& l = st.cholesky;
  std::vector<double> y(dim, 0.0);
  for (size_t r = 0; r < dim; ++r) {
    double s = diff[r];
    for (size_t c = 0; c < r; ++c) s -= l[r * dim + c] * y[c];
    y[r] = s / l[r * dim + r];
  }
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return std::sqrt(acc);
}

double eval(const PreprocessorState& st, Metric spec, const PreparedTable& ta, size_t i,
            const PreparedTable& tb, size_t j, const std::vector<char>* mask) {
  check_compatible(st, spec);
  if (mask) {
    require(mask->size() == st.schema.size(), Errc::size_mismatch,
            "attribute mask length differs from schema");
    require(spec != Metric::mahalanobis, Errc::incompatible_metric,
            "masked distance is not defined for Mahalanobis");
  }
  switch (spec) {
    case Metric::hamming:
      return eval_hamming(st, ta, i, tb, j, mask);
    case Metric::gower:
      return eval_aggregate(st, ta, i, tb, j, mask);
    case Metric::cosine:
      return eval_cosine(st, ta, i, tb, j, mask);
    case Metric::mahalanobis:
      return eval_mahalanobis(st, ta, i, tb, j);
    case Metric::l1:
    case Metric::euclidean:
      if (std::holds_alternative<EmbedStrategy>(st.strategy)) {
        return eval_embedded(st, spec, ta, i, tb, j, mask);
      }
      if (std::holds_alternative<AggregateStrategy>(st.strategy)) {
        return eval_aggregate(st, ta, i, tb, j, mask);
      }
      return eval_raw_numeric(st, spec, ta, i, tb, j, mask);
  }
  raise(Errc::internal_error, "unhandled metric");
}

}  // namespace

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::l1: return "l1";
    case Metric::euclidean: return "euclidean";
    case Metric::hamming: return "hamming";
    case Metric::cosine: return "cosine";
    case Metric::mahalanobis: return "mahalanobis";
    case Metric::gower: return "gower";
  }
  return "?";
}

Metric metric_from_name(std::string_view name) {
  if (name == "l1") return Metric::l1;
  if (name == "euclidean") return Metric::euclidean;
  if (name == "hamming") return Metric::hamming;
  if (name == "cosine") return Metric::cosine;
  if (name == "mahalanobis") return Metric::mahalanobis;
  if (name == "gower") return Metric::gower;
  raise(Errc::bad_params, "unknown metric '" + std::string(name) + "'");
}

const char* strategy_name(const EvaluationStrategy& s) {
  if (std::holds_alternative<BinStrategy>(s)) return "bin";
  if (std::holds_alternative<AggregateStrategy>(s)) return "aggregate";
  if (std::holds_alternative<IgnoreCategoricalStrategy>(s)) return "ignore_categorical";
  return "embed";
}

void validate_strategy(const EvaluationStrategy& s) {
  if (const auto* bin = std::get_if<BinStrategy>(&s)) {
    require(bin->n_bins >= 2, Errc::bad_params, "Bin.n_bins must be at least 2");
  } else if (const auto* agg = std::get_if<AggregateStrategy>(&s)) {
    require(agg->numeric == Metric::l1 || agg->numeric == Metric::euclidean, Errc::bad_params,
            "Aggregate.numeric must be l1 or euclidean");
    require(agg->categorical == Metric::hamming, Errc::bad_params,
            "Aggregate.categorical must be hamming");
    require(agg->weight_numeric >= 0.0 && agg->weight_categorical >= 0.0, Errc::bad_params,
            "Aggregate weights must be non-negative");
    require(agg->weight_numeric > 0.0 || agg->weight_categorical > 0.0, Errc::bad_params,
            "Aggregate weights must not both be zero");
  }
}

Preprocessor Preprocessor::fit(const EvaluationStrategy& strategy, Metric metric,
                               const Dataset& real, const Dataset& synthetic) {
  validate_strategy(strategy);
  require(real.schema() == synthetic.schema(), Errc::schema_mismatch,
          "fit_preprocessor: datasets do not share a schema");
  require(!real.empty() && !synthetic.empty(), Errc::empty_dataset,
          "fit_preprocessor: empty dataset");

  auto st = std::make_shared<PreprocessorState>();
  st->schema = real.schema();
  st->strategy = strategy;
  st->metric = metric;
  size_t n_attr = st->schema.size();
  st->attrs.resize(n_attr);

  const Dataset* pool[2] = {&real, &synthetic};
  for (size_t a = 0; a < n_attr; ++a) {
    AttrPrep& ap = st->attrs[a];
    const Attribute& attr = st->schema.at(a);
    ap.numeric = attr.is_numeric();
    if (!ap.numeric) {
      ap.domain_size = attr.categorical().domain.size();
      continue;
    }
    double lo = 0.0, hi = 0.0, sum = 0.0;
    size_t n = 0;
    for (const Dataset* d : pool) {
      for (const Record& r : d->rows()) {
        const Value& v = r.values[a];
        if (is_missing(v)) continue;
        double x = std::get<double>(v);
        if (n == 0) {
          lo = hi = x;
        } else {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
        sum += x;
        ++n;
      }
    }
    ap.n_values = n;
    if (n > 0) {
      ap.min = lo;
      ap.max = hi;
      ap.range = hi - lo;
      ap.mean = sum / static_cast<double>(n);
      if (n > 1) {
        double ss = 0.0;
        for (const Dataset* d : pool) {
          for (const Record& r : d->rows()) {
            const Value& v = r.values[a];
            if (is_missing(v)) continue;
            double dx = std::get<double>(v) - ap.mean;
            ss += dx * dx;
          }
        }
        ap.stddev = std::sqrt(ss / static_cast<double>(n - 1));
      }
    }
  }

  bool is_bin = std::holds_alternative<BinStrategy>(strategy);
  bool is_embed = std::holds_alternative<EmbedStrategy>(strategy);
  bool is_ignore = std::holds_alternative<IgnoreCategoricalStrategy>(strategy);

  if (is_bin) {
    size_t n_bins = std::get<BinStrategy>(strategy).n_bins;
    for (size_t a = 0; a < n_attr; ++a) {
      AttrPrep& ap = st->attrs[a];
      if (!ap.numeric) continue;
      if (ap.n_values == 0 || ap.range == 0.0) {
        double center = ap.n_values ? ap.min : 0.0;
        ap.bin_edges = {center - 0.5, center + 0.5};
        st->warnings.push_back("attribute '" + st->schema.at(a).name +
                               "' is constant; single bin used");
        continue;
      }
      ap.bin_edges.resize(n_bins + 1);
      for (size_t k = 0; k <= n_bins; ++k) {
        ap.bin_edges[k] =
            ap.min + (ap.range * static_cast<double>(k)) / static_cast<double>(n_bins);
      }
    }
  }

  if (is_ignore) {
    bool any_numeric = false;
    for (const AttrPrep& ap : st->attrs) any_numeric = any_numeric || ap.numeric;
    require(any_numeric, Errc::degenerate_attribute,
            "ignore_categorical strategy on a schema without numeric attributes");
  }

  if (is_embed) {
    size_t offset = 0;
    for (size_t a = 0; a < n_attr; ++a) {
      AttrPrep& ap = st->attrs[a];
      if (ap.numeric) {
        if (ap.n_values == 0 || ap.stddev == 0.0) {
          ap.dropped = true;
          ap.emb_len = 0;
          st->warnings.push_back("attribute '" + st->schema.at(a).name +
                                 "' has zero pooled variance; coordinate dropped");
          continue;
        }
        ap.emb_offset = offset;
        ap.emb_len = 1;
        ap.emb_gap = ap.range / ap.stddev;
        offset += 1;
      } else {
        ap.emb_offset = offset;
        ap.emb_len = ap.domain_size;
        ap.emb_gap = kOneHotScale;
        offset += ap.domain_size;
      }
    }
    st->emb_dim = offset;
    require(st->emb_dim > 0, Errc::degenerate_attribute,
            "all embedded coordinates dropped (every attribute degenerate)");
  }

  check_compatible(*st, metric, false);

  if (metric == Metric::mahalanobis) {
    // Sample covariance of the pooled embedded rows that have no missing
    // values among the embedded attributes.
    size_t dim = st->emb_dim;
    std::vector<std::vector<double>> rows;
    Preprocessor tmp;
    tmp.state_ = st;
    for (const Dataset* d : pool) {
      for (const Record& r : d->rows()) {
        std::vector<double> e = tmp.embed(r);
        bool complete = true;
        for (double x : e) complete = complete && !std::isnan(x);
        if (complete) rows.push_back(std::move(e));
      }
    }
    require(rows.size() >= 2, Errc::fit_failure,
            "need at least 2 complete rows to estimate a covariance matrix");
    std::vector<double> mean(dim, 0.0);
    for (const auto& r : rows) {
      for (size_t k = 0; k < dim; ++k) mean[k] += r[k];
    }
    for (double& m : mean) m /= static_cast<double>(rows.size());
    std::vector<double> cov(dim * dim, 0.0);
    for (const auto& r : rows) {
      for (size_t x = 0; x < dim; ++x) {
        double dx = r[x] - mean[x];
        for (size_t y = x; y < dim; ++y) {
          cov[x * dim + y] += dx * (r[y] - mean[y]);
        }
      }
    }
    double denom = static_cast<double>(rows.size() - 1);
    for (size_t x = 0; x < dim; ++x) {
      for (size_t y = x; y < dim; ++y) {
        cov[x * dim + y] /= denom;
        cov[y * dim + x] = cov[x * dim + y];
      }
    }
    double trace = 0.0;
    for (size_t k = 0; k < dim; ++k) trace += cov[k * dim + k];
    double lambda = 1e-6 * trace / static_cast<double>(dim);
    if (lambda <= 0.0) lambda = 1e-6;
    for (size_t k = 0; k < dim; ++k) cov[k * dim + k] += lambda;
    st->lambda = lambda;
    st->covariance = cov;
    st->cholesky = cholesky_lower(cov, dim);
  }

  Preprocessor p;
  p.state_ = std::move(st);
  return p;
}

double Preprocessor::numeric_range(size_t attr) const {
  const AttrPrep& ap = state_->attrs.at(attr);
  require(ap.numeric, Errc::bad_attribute, "numeric_range of a categorical attribute");
  return ap.range;
}

std::vector<double> Preprocessor::embed(const Record& r) const {
  const PreprocessorState& st = *state_;
  require(std::holds_alternative<EmbedStrategy>(st.strategy), Errc::incompatible_metric,
          "embed() requires the embed strategy");
  Dataset::validate_record(st.schema, r, 0);
  std::vector<double> out(st.emb_dim, kNaN);
  for (size_t a = 0; a < st.schema.size(); ++a) {
    const AttrPrep& ap = st.attrs[a];
    if (ap.emb_len == 0) continue;
    const Value& v = r.values[a];
    if (is_missing(v)) continue;
    if (ap.numeric) {
      out[ap.emb_offset] = (std::get<double>(v) - ap.mean) / ap.stddev;
    } else {
      for (size_t k = 0; k < ap.emb_len; ++k) out[ap.emb_offset + k] = 0.0;
      auto code = st.schema.domain_code(a, std::get<std::string>(v));
      out[ap.emb_offset + *code] = kOneHotScale;
    }
  }
  return out;
}

Preprocessor Preprocessor::with_covariance(const std::vector<double>& matrix) const {
  const PreprocessorState& st = *state_;
  require(st.metric == Metric::mahalanobis, Errc::incompatible_metric,
          "with_covariance applies only to Mahalanobis preprocessors");
  require(matrix.size() == st.emb_dim * st.emb_dim, Errc::size_mismatch,
          "covariance matrix has wrong dimensions");
  auto next = std::make_shared<PreprocessorState>(st);
  next->covariance = matrix;
  next->cholesky = cholesky_lower(matrix, st.emb_dim);
  next->lambda = 0.0;
  Preprocessor p;
  p.state_ = std::move(next);
  return p;
}

PreparedTable PreparedTable::build(const Preprocessor& p, const Dataset& d) {
  const PreprocessorState& st = p.state();
  require(d.schema() == st.schema, Errc::schema_mismatch,
          "dataset schema differs from the preprocessor's");
  PreparedTable t;
  t.n = d.size();
  t.n_attr = st.schema.size();
  t.emb_dim = st.emb_dim;
  t.cat.assign(t.n * t.n_attr, -2);
  t.num.assign(t.n * t.n_attr, kNaN);
  if (std::holds_alternative<BinStrategy>(st.strategy)) t.bin.assign(t.n * t.n_attr, -1);
  if (std::holds_alternative<EmbedStrategy>(st.strategy)) t.emb.assign(t.n * t.emb_dim, kNaN);
  t.row_missing.assign(t.n, 0);
  for (size_t i = 0; i < t.n; ++i) encode_row(st, d.row(i), i, t);
  return t;
}

double pair_distance(const Preprocessor& p, Metric spec, const PreparedTable& ta, size_t i,
                     const PreparedTable& tb, size_t j) {
  return eval(p.state(), spec, ta, i, tb, j, nullptr);
}

double pair_distance_masked(const Preprocessor& p, Metric spec, const PreparedTable& ta, size_t i,
                            const PreparedTable& tb, size_t j, const std::vector<char>& mask) {
  return eval(p.state(), spec, ta, i, tb, j, &mask);
}

namespace {

PreparedTable one_row_table(const Preprocessor& p, const Record& r) {
  const PreprocessorState& st = p.state();
  Dataset::validate_record(st.schema, r, 0);
  PreparedTable t;
  t.n = 1;
  t.n_attr = st.schema.size();
  t.emb_dim = st.emb_dim;
  t.cat.assign(t.n_attr, -2);
  t.num.assign(t.n_attr, kNaN);
  if (std::holds_alternative<BinStrategy>(st.strategy)) t.bin.assign(t.n_attr, -1);
  if (std::holds_alternative<EmbedStrategy>(st.strategy)) t.emb.assign(t.emb_dim, kNaN);
  t.row_missing.assign(1, 0);
  encode_row(st, r, 0, t);
  return t;
}

}  // namespace

double distance(const Preprocessor& p, Metric spec, const Record& a, const Record& b) {
  PreparedTable ta = one_row_table(p, a);
  PreparedTable tb = one_row_table(p, b);
  return eval(p.state(), spec, ta, 0, tb, 0, nullptr);
}

double distance_masked(const Preprocessor& p, Metric spec, const Record& a, const Record& b,
                       const std::vector<char>& mask) {
  PreparedTable ta = one_row_table(p, a);
  PreparedTable tb = one_row_table(p, b);
  return eval(p.state(), spec, ta, 0, tb, 0, &mask);
}

double as_distance(Metric spec, double value) {
  if (spec == Metric::cosine) {
    require(value >= -1.0 - 1e-9 && value <= 1.0 + 1e-9, Errc::out_of_range,
            "cosine similarity outside [-1, 1]");
    return 1.0 - std::clamp(value, -1.0, 1.0);
  }
  require(value >= 0.0, Errc::out_of_range, "negative value for a distance metric");
  return value;
}

}  // namespace synthaudit
