/* C interface to the synthetic-data privacy auditor. All functions return
 * SA_OK or SA_ERROR; on SA_ERROR, sa_last_error() / sa_last_error_code()
 * describe the failure (thread-local). Objects returned through out-params
 * are owned by the caller and released with the matching _free function. */
#ifndef SYNTHAUDIT_H
#define SYNTHAUDIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SA_OK 0
#define SA_ERROR 1

typedef struct sa_dataset sa_dataset;

const char* sa_version(void);
/* Message and PascalCase code of the last failure on this thread ("" if none). */
const char* sa_last_error(void);
const char* sa_last_error_code(void);

/* schema_path may be NULL: the schema is then inferred from the file. */
int sa_dataset_load_csv(const char* csv_path, const char* schema_path, const char* label,
                        sa_dataset** out);
int sa_dataset_save_csv(const sa_dataset* d, const char* csv_path);
void sa_dataset_free(sa_dataset* d);
size_t sa_dataset_rows(const sa_dataset* d);
size_t sa_dataset_attributes(const sa_dataset* d);
const char* sa_dataset_label(const sa_dataset* d);

/* Random disjoint partition; the first part gets round(fraction * n) rows
 * and the purpose ("holdout" or "control") as its label. */
int sa_split(const sa_dataset* d, double fraction, uint64_t seed, const char* purpose,
             sa_dataset** first, sa_dataset** second);

/* Fits a toy generator on `train` and samples n rows labeled "synthetic".
 * kind: independent_marginal | seed_based_noise | memorizing | mode_collapsed.
 * params_json (optional, may be NULL): {"sigma":..,"flip_prob":..,"n_modes":..} */
int sa_generate(const sa_dataset* train, const char* kind, const char* params_json, size_t n,
                uint64_t fit_seed, uint64_t sample_seed, sa_dataset** out);

/* Audit sections, combinable. */
#define SA_SECTION_PROFILES 0x01u
#define SA_SECTION_INDICATORS 0x02u
#define SA_SECTION_ANONYMITY 0x04u
#define SA_SECTION_ATTACKS 0x08u
#define SA_SECTION_CANARY 0x10u
#define SA_SECTION_ALL 0x1fu

/* Runs the audit described by the JSON config and writes report.json,
 * profiles.csv, attacks.csv and timings.json into out_dir. Failures inside
 * individual sections do not abort the run; their count is returned through
 * item_error_count (may be NULL). SA_ERROR means a fatal setup problem. */
int sa_audit_run(const char* config_path, const char* out_dir, unsigned sections, int threads,
                 size_t* item_error_count);

#ifdef __cplusplus
}
#endif

#endif /* SYNTHAUDIT_H */
