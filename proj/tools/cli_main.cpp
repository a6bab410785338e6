// Command-line front end. Talks to the library exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "synthaudit.h"

namespace {

int fatal() {
  std::fprintf(stderr, "error [%s]: %s\n", sa_last_error_code(), sa_last_error());
  return 2;
}

int run_audit_cmd(const std::string& config, const std::string& out, unsigned sections, int threads) {
  size_t item_errors = 0;
  if (sa_audit_run(config.c_str(), out.c_str(), sections, threads, &item_errors) != SA_OK) return fatal();
  if (item_errors > 0) {
    std::fprintf(stderr, "completed with %zu item error(s); see %s/report.json\n", item_errors,
                 out.c_str());
    return 1;
  }
  std::printf("report written to %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy audit for synthetic tabular data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sa_version()));

  std::string config, out_dir;
  int threads = 1;

  auto add_audit_like = [&](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config, "audit config (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    return cmd;
  };

  CLI::App* audit = add_audit_like("audit", "run the full audit");
  CLI::App* indicators = add_audit_like("indicators", "distance profiles and statistical indicators only");
  CLI::App* attacks = add_audit_like("attacks", "simulated attacks only");
  CLI::App* anonymity = add_audit_like("anonymity", "anonymity checks only");

  std::string gen_kind, gen_train, gen_schema, gen_out, gen_params;
  size_t gen_n = 0;
  uint64_t gen_seed = 1, gen_fit_seed = 0;
  bool gen_fit_seed_set = false;
  double gen_sigma = -1.0, gen_flip = -1.0;
  size_t gen_modes = 0;
  CLI::App* generate = app.add_subcommand("generate", "fit a toy generator and sample synthetic rows");
  generate->add_option("--kind", gen_kind,
                       "independent_marginal | seed_based_noise | memorizing | mode_collapsed")
      ->required();
  generate->add_option("--train", gen_train, "training CSV")->required();
  generate->add_option("--schema", gen_schema, "schema JSON (inferred when absent)");
  generate->add_option("--n", gen_n, "rows to sample")->required();
  generate->add_option("--seed", gen_seed, "sampling seed")->required();
  generate->add_option("--fit-seed", gen_fit_seed, "fitting seed (defaults to --seed)");
  generate->add_option("--sigma", gen_sigma, "noise scale (seed_based_noise, mode_collapsed)");
  generate->add_option("--flip-prob", gen_flip, "categorical flip probability (seed_based_noise)");
  generate->add_option("--n-modes", gen_modes, "anchor count (mode_collapsed)");
  generate->add_option("--out", gen_out, "output CSV")->required();
  generate->callback([&] { gen_fit_seed_set = generate->count("--fit-seed") > 0; });

  std::string split_in, split_schema, split_purpose = "holdout", split_first, split_second;
  double split_fraction = 0.5;
  uint64_t split_seed = 1;
  CLI::App* split = app.add_subcommand("split", "random disjoint partition of a CSV");
  split->add_option("--in", split_in, "input CSV")->required();
  split->add_option("--schema", split_schema, "schema JSON (inferred when absent)");
  split->add_option("--fraction", split_fraction, "share of rows in the first (split-off) part")->required();
  split->add_option("--seed", split_seed, "rng seed")->required();
  split->add_option("--purpose", split_purpose, "holdout | control")
      ->check(CLI::IsMember({"holdout", "control"}));
  split->add_option("--out-first", split_first, "output CSV for the first part")->required();
  split->add_option("--out-second", split_second, "output CSV for the second part")->required();

  CLI11_PARSE(app, argc, argv);

  if (audit->parsed()) return run_audit_cmd(config, out_dir, SA_SECTION_ALL, threads);
  if (indicators->parsed())
    return run_audit_cmd(config, out_dir, SA_SECTION_PROFILES | SA_SECTION_INDICATORS, threads);
  if (attacks->parsed()) return run_audit_cmd(config, out_dir, SA_SECTION_ATTACKS, threads);
  if (anonymity->parsed()) return run_audit_cmd(config, out_dir, SA_SECTION_ANONYMITY, threads);

  if (generate->parsed()) {
    std::string params = "{";
    auto append = [&params](const std::string& key, const std::string& value) {
      if (params.size() > 1) params += ",";
      params += "\"" + key + "\":" + value;
    };
    if (gen_sigma >= 0.0) append("sigma", std::to_string(gen_sigma));
    if (gen_flip >= 0.0) append("flip_prob", std::to_string(gen_flip));
    if (gen_modes > 0) append("n_modes", std::to_string(gen_modes));
    params += "}";

    sa_dataset* train = nullptr;
    if (sa_dataset_load_csv(gen_train.c_str(), gen_schema.empty() ? nullptr : gen_schema.c_str(),
                            "real", &train) != SA_OK)
      return fatal();
    sa_dataset* sample = nullptr;
    uint64_t fit_seed = gen_fit_seed_set ? gen_fit_seed : gen_seed;
    if (sa_generate(train, gen_kind.c_str(), params.c_str(), gen_n, fit_seed, gen_seed, &sample) !=
        SA_OK) {
      sa_dataset_free(train);
      return fatal();
    }
    int rc = sa_dataset_save_csv(sample, gen_out.c_str());
    sa_dataset_free(sample);
    sa_dataset_free(train);
    if (rc != SA_OK) return fatal();
    std::printf("wrote %zu rows to %s\n", gen_n, gen_out.c_str());
    return 0;
  }

  if (split->parsed()) {
    sa_dataset* in = nullptr;
    if (sa_dataset_load_csv(split_in.c_str(), split_schema.empty() ? nullptr : split_schema.c_str(),
                            "real", &in) != SA_OK)
      return fatal();
    sa_dataset* first = nullptr;
    sa_dataset* second = nullptr;
    if (sa_split(in, split_fraction, split_seed, split_purpose.c_str(), &first, &second) != SA_OK) {
      sa_dataset_free(in);
      return fatal();
    }
    int rc = sa_dataset_save_csv(first, split_first.c_str());
    if (rc == SA_OK) rc = sa_dataset_save_csv(second, split_second.c_str());
    std::printf("%zu + %zu rows\n", sa_dataset_rows(first), sa_dataset_rows(second));
    sa_dataset_free(first);
    sa_dataset_free(second);
    sa_dataset_free(in);
    return rc == SA_OK ? 0 : fatal();
  }

  return 2;
}
