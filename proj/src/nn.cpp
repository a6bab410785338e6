#include "synthaudit/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "synthaudit/parallel.hpp"

namespace synthaudit {

namespace {

constexpr size_t kNoIndex = std::numeric_limits<size_t>::max();
constexpr size_t kLeafSize = 16;

struct Best {
  double d = std::numeric_limits<double>::infinity();
  size_t i = kNoIndex;

  void offer(double nd, size_t ni) {
    if (nd < d || (nd == d && ni < i)) {
      d = nd;
      i = ni;
    }
  }
};

void brute_nearest(const Preprocessor& p, Metric spec, const PreparedTable& qt, size_t qi,
                   const PreparedTable& rt, std::optional<size_t> exclude, Best& best) {
  for (size_t j = 0; j < rt.n; ++j) {
    if (exclude && j == *exclude) continue;
    double d = as_distance(spec, pair_distance(p, spec, qt, qi, rt, j));
    if (d < best.d) {
      best.d = d;
      best.i = j;
    }
  }
}

// Spatial index over the embedded representation. Exact: the same pairwise
// kernel as brute force scores every candidate, bounds only prune subtrees
// that provably cannot beat the current best.
class KdTree {
 public:
  KdTree(const Preprocessor& p, Metric spec, const PreparedTable& table)
      : p_(p), spec_(spec), table_(table), dim_(table.emb_dim) {
    idx_.resize(table.n);
    for (size_t i = 0; i < table.n; ++i) idx_[i] = i;
    nodes_.reserve(2 * table.n / kLeafSize + 4);
    build(0, table.n);
  }

  void search(const PreparedTable& qt, size_t qi, std::optional<size_t> exclude,
              Best& best) const {
    const double* q = &qt.emb[qi * dim_];
    visit(0, q, qt, qi, exclude, best);
  }

 private:
  struct Node {
    size_t begin = 0, end = 0;
    ptrdiff_t left = -1, right = -1;
    std::vector<double> bb_min, bb_max;
  };

  size_t build(size_t begin, size_t end) {
    size_t me = nodes_.size();
    nodes_.emplace_back();
    Node& n = nodes_.back();
    n.begin = begin;
    n.end = end;
    n.bb_min.assign(dim_, std::numeric_limits<double>::infinity());
    n.bb_max.assign(dim_, -std::numeric_limits<double>::infinity());
    for (size_t t = begin; t < end; ++t) {
      const double* row = &table_.emb[idx_[t] * dim_];
      for (size_t k = 0; k < dim_; ++k) {
        n.bb_min[k] = std::min(n.bb_min[k], row[k]);
        n.bb_max[k] = std::max(n.bb_max[k], row[k]);
      }
    }
    if (end - begin <= kLeafSize) return me;
    size_t split_dim = 0;
    double widest = -1.0;
    for (size_t k = 0; k < dim_; ++k) {
      double extent = n.bb_max[k] - n.bb_min[k];
      if (extent > widest) {
        widest = extent;
        split_dim = k;
      }
    }
    if (widest <= 0.0) return me;  // all points identical; keep as leaf
    size_t mid = begin + (end - begin) / 2;
    std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                     [&](size_t a, size_t b) {
                       double xa = table_.emb[a * dim_ + split_dim];
                       double xb = table_.emb[b * dim_ + split_dim];
                       if (xa != xb) return xa < xb;
                       return a < b;
                     });
    ptrdiff_t left = static_cast<ptrdiff_t>(build(begin, mid));
    ptrdiff_t right = static_cast<ptrdiff_t>(build(mid, end));
    nodes_[me].left = left;
    nodes_[me].right = right;
    return me;
  }

  double bound(const Node& n, const double* q) const {
    double acc = 0.0;
    if (spec_ == Metric::euclidean) {
      for (size_t k = 0; k < dim_; ++k) {
        double g = 0.0;
        if (q[k] < n.bb_min[k]) g = n.bb_min[k] - q[k];
        else if (q[k] > n.bb_max[k]) g = q[k] - n.bb_max[k];
        acc += g * g;
      }
      return std::sqrt(acc);
    }
    for (size_t k = 0; k < dim_; ++k) {
      if (q[k] < n.bb_min[k]) acc += n.bb_min[k] - q[k];
      else if (q[k] > n.bb_max[k]) acc += q[k] - n.bb_max[k];
    }
    return acc;
  }

  void visit(size_t node, const double* q, const PreparedTable& qt, size_t qi,
             std::optional<size_t> exclude, Best& best) const {
    const Node& n = nodes_[node];
    if (n.left < 0) {
      for (size_t t = n.begin; t < n.end; ++t) {
        size_t j = idx_[t];
        if (exclude && j == *exclude) continue;
        double d = pair_distance(p_, spec_, qt, qi, table_, j);
        best.offer(d, j);
      }
      return;
    }
    double bl = bound(nodes_[static_cast<size_t>(n.left)], q);
    double br = bound(nodes_[static_cast<size_t>(n.right)], q);
    size_t first = static_cast<size_t>(n.left);
    size_t second = static_cast<size_t>(n.right);
    double bf = bl, bs = br;
    if (br < bl) {
      std::swap(first, second);
      std::swap(bf, bs);
    }
    if (bf <= best.d) visit(first, q, qt, qi, exclude, best);
    if (bs <= best.d) visit(second, q, qt, qi, exclude, best);
  }

  const Preprocessor& p_;
  Metric spec_;
  const PreparedTable& table_;
  size_t dim_;
  std::vector<size_t> idx_;
  std::vector<Node> nodes_;
};

bool can_accelerate(const Preprocessor& p, Metric spec, const PreparedTable& qt,
                    const PreparedTable& rt) {
  if (spec != Metric::l1 && spec != Metric::euclidean) return false;
  if (!std::holds_alternative<EmbedStrategy>(p.strategy())) return false;
  return !qt.any_missing && !rt.any_missing;
}

Dataset single_row_dataset(const Preprocessor& p, const Record& query) {
  return Dataset(p.schema(), {query}, "query");
}

}  // namespace

const char* profile_kind_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::srd: return "srd";
    case ProfileKind::ssd: return "ssd";
    case ProfileKind::rsd: return "rsd";
    case ProfileKind::rrd: return "rrd";
  }
  return "?";
}

NearestResult nearest(const Record& query, const Dataset& reference, const Preprocessor& p,
                      Metric spec, std::optional<size_t> exclude_index) {
  require(!reference.empty(), Errc::empty_reference, "nearest: empty reference");
  if (exclude_index) {
    require(*exclude_index < reference.size(), Errc::out_of_range,
            "nearest: exclude_index out of range");
    require(reference.size() >= 2, Errc::empty_reference,
            "nearest: nothing left after excluding the only reference row");
  }
  PreparedTable qt = PreparedTable::build(p, single_row_dataset(p, query));
  PreparedTable rt = PreparedTable::build(p, reference);
  Best best;
  brute_nearest(p, spec, qt, 0, rt, exclude_index, best);
  return {best.i, best.d};
}

std::vector<NearestResult> knn_prepared(const Preprocessor& p, Metric spec,
                                        const PreparedTable& queries, size_t query_index,
                                        const PreparedTable& reference, size_t k,
                                        const std::vector<char>* attr_mask,
                                        std::optional<size_t> exclude_index) {
  require(k >= 1, Errc::out_of_range, "knn: k must be positive");
  size_t available = reference.n - (exclude_index && *exclude_index < reference.n ? 1 : 0);
  require(k <= available, Errc::k_too_large,
          "knn: k = " + std::to_string(k) + " exceeds " + std::to_string(available) +
              " reference rows");
  std::vector<NearestResult> all;
  all.reserve(reference.n);
  for (size_t j = 0; j < reference.n; ++j) {
    if (exclude_index && j == *exclude_index) continue;
    double raw = attr_mask
                     ? pair_distance_masked(p, spec, queries, query_index, reference, j, *attr_mask)
                     : pair_distance(p, spec, queries, query_index, reference, j);
    all.push_back({j, as_distance(spec, raw)});
  }
  std::sort(all.begin(), all.end(), [](const NearestResult& a, const NearestResult& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  all.resize(k);
  return all;
}

std::vector<NearestResult> knn(const Record& query, const Dataset& reference, size_t k,
                               const Preprocessor& p, Metric spec) {
  require(!reference.empty(), Errc::empty_reference, "knn: empty reference");
  PreparedTable qt = PreparedTable::build(p, single_row_dataset(p, query));
  PreparedTable rt = PreparedTable::build(p, reference);
  return knn_prepared(p, spec, qt, 0, rt, k);
}

DistanceProfile profile(const Dataset& queries, const Dataset& reference, ProfileKind kind,
                        const Preprocessor& p, Metric spec, int threads,
                        bool force_brute_force) {
  bool q_synth = queries.label() == "synthetic";
  bool r_synth = reference.label() == "synthetic";
  bool same_object = &queries == &reference;
  bool self_exclude = false;
  auto labels = [&] {
    return " (labels '" + queries.label() + "' -> '" + reference.label() + "')";
  };
  switch (kind) {
    case ProfileKind::srd:
      require(q_synth && !r_synth, Errc::label_mismatch,
              "SRD expects synthetic queries against a real reference" + labels());
      break;
    case ProfileKind::ssd:
      require(q_synth && same_object, Errc::label_mismatch,
              "SSD expects the synthetic dataset queried against itself (pass the same object "
              "twice)" + labels());
      self_exclude = true;
      break;
    case ProfileKind::rsd:
      require(!q_synth && r_synth, Errc::label_mismatch,
              "RSD expects real queries against the synthetic reference" + labels());
      break;
    case ProfileKind::rrd:
      require(!q_synth && !r_synth, Errc::label_mismatch,
              "RRD expects real queries against a real reference" + labels());
      self_exclude = same_object;
      break;
  }
  require(!reference.empty(), Errc::empty_reference, "profile: empty reference");
  if (self_exclude) {
    require(reference.size() >= 2, Errc::empty_reference,
            "profile: self-excluding profile needs at least 2 rows");
  }

  PreparedTable qt = PreparedTable::build(p, queries);
  PreparedTable rt_own;
  const PreparedTable* rt = &qt;
  if (!same_object) {
    rt_own = PreparedTable::build(p, reference);
    rt = &rt_own;
  }

  DistanceProfile out;
  out.kind = kind;
  out.metric = spec;
  out.strategy = p.strategy();
  out.self_excluded = self_exclude;
  out.values.resize(queries.size());
  out.argmin_index.resize(queries.size());

  bool accelerated = !force_brute_force && can_accelerate(p, spec, qt, *rt);
  out.accelerated = accelerated;
  std::optional<KdTree> tree;
  if (accelerated) tree.emplace(p, spec, *rt);

  parallel_for(queries.size(), threads, [&](size_t i) {
    std::optional<size_t> exclude;
    if (self_exclude) exclude = i;
    Best best;
    if (accelerated) {
      tree->search(qt, i, exclude, best);
    } else {
      brute_nearest(p, spec, qt, i, *rt, exclude, best);
    }
    out.values[i] = best.d;
    out.argmin_index[i] = best.i;
  });
  return out;
}

}  // namespace synthaudit
