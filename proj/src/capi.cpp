#include "synthaudit.h"

#include <string>

#include "json.hpp"
#include "synthaudit/audit.hpp"
#include "synthaudit/csv.hpp"
#include "synthaudit/dataset.hpp"
#include "synthaudit/generators.hpp"

using namespace synthaudit;

struct sa_dataset {
  Dataset d;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_code;

int fail(const char* code, const std::string& msg) {
  g_last_code = code;
  g_last_error = msg;
  return SA_ERROR;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_code.clear();
    g_last_error.clear();
    return SA_OK;
  } catch (const Error& e) {
    return fail(errc_name(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  } catch (...) {
    return fail("InternalError", "unknown failure");
  }
}

int require_arg(bool ok, const char* what) {
  if (ok) return SA_OK;
  return fail("BadParams", std::string("null argument: ") + what);
}

}  // namespace

extern "C" {

const char* sa_version(void) { return kToolVersion; }
const char* sa_last_error(void) { return g_last_error.c_str(); }
const char* sa_last_error_code(void) { return g_last_code.c_str(); }

int sa_dataset_load_csv(const char* csv_path, const char* schema_path, const char* label,
                        sa_dataset** out) {
  if (require_arg(csv_path && label && out, "sa_dataset_load_csv")) return SA_ERROR;
  return guarded([&] {
    Dataset d = schema_path ? load_csv(csv_path, load_schema_json(schema_path), label)
                            : load_csv(csv_path, InferSchema{}, label);
    *out = new sa_dataset{std::move(d)};
  });
}

int sa_dataset_save_csv(const sa_dataset* d, const char* csv_path) {
  if (require_arg(d && csv_path, "sa_dataset_save_csv")) return SA_ERROR;
  return guarded([&] { save_csv(d->d, csv_path); });
}

void sa_dataset_free(sa_dataset* d) { delete d; }

size_t sa_dataset_rows(const sa_dataset* d) { return d ? d->d.size() : 0; }

size_t sa_dataset_attributes(const sa_dataset* d) { return d ? d->d.schema().size() : 0; }

const char* sa_dataset_label(const sa_dataset* d) { return d ? d->d.label().c_str() : ""; }

int sa_split(const sa_dataset* d, double fraction, uint64_t seed, const char* purpose,
             sa_dataset** first, sa_dataset** second) {
  if (require_arg(d && purpose && first && second, "sa_split")) return SA_ERROR;
  return guarded([&] {
    std::string p(purpose);
    SplitSpec spec;
    spec.fraction = fraction;
    spec.rng_seed = seed;
    if (p == "holdout") {
      spec.purpose = SplitPurpose::holdout;
    } else if (p == "control") {
      spec.purpose = SplitPurpose::control;
    } else {
      raise(Errc::bad_params, "split purpose must be \"holdout\" or \"control\"");
    }
    auto parts = split(d->d, spec);
    *first = new sa_dataset{std::move(parts.first)};
    *second = new sa_dataset{std::move(parts.second)};
  });
}

int sa_generate(const sa_dataset* train, const char* kind, const char* params_json, size_t n,
                uint64_t fit_seed, uint64_t sample_seed, sa_dataset** out) {
  if (require_arg(train && kind && out, "sa_generate")) return SA_ERROR;
  return guarded([&] {
    nlohmann::json pj = nlohmann::json::object();
    if (params_json && *params_json) {
      try {
        pj = nlohmann::json::parse(params_json);
      } catch (const std::exception& e) {
        raise(Errc::bad_params, std::string("invalid params_json: ") + e.what());
      }
      require(pj.is_object(), Errc::bad_params, "params_json must be a JSON object");
    }
    GeneratorKind k = generator_kind_from_name(kind);
    GeneratorParams params;
    switch (k) {
      case GeneratorKind::independent_marginal:
        params = IndependentMarginalParams{};
        break;
      case GeneratorKind::seed_based_noise: {
        SeedBasedNoiseParams p;
        if (pj.contains("sigma")) p.sigma = pj["sigma"].get<double>();
        if (pj.contains("flip_prob")) p.flip_prob = pj["flip_prob"].get<double>();
        params = p;
        break;
      }
      case GeneratorKind::memorizing:
        params = MemorizingParams{};
        break;
      case GeneratorKind::mode_collapsed: {
        ModeCollapsedParams p;
        if (pj.contains("n_modes")) p.n_modes = pj["n_modes"].get<size_t>();
        if (pj.contains("sigma")) p.sigma = pj["sigma"].get<double>();
        params = p;
        break;
      }
    }
    Generator g = Generator::fit(train->d, params, fit_seed);
    *out = new sa_dataset{g.sample(n, sample_seed)};
  });
}

int sa_audit_run(const char* config_path, const char* out_dir, unsigned sections, int threads,
                 size_t* item_error_count) {
  if (require_arg(config_path && out_dir, "sa_audit_run")) return SA_ERROR;
  return guarded([&] {
    AuditConfig cfg = load_config(config_path);
    PrivacyReport report = run_audit(cfg, sections, threads);
    emit(report, out_dir);
    if (item_error_count) *item_error_count = report.item_errors.size();
  });
}

}  // extern "C"
