#pragma once

#include <stdexcept>
#include <string>

namespace synthaudit {

enum class Errc {
  ok = 0,
  io_error,
  schema_violation,
  empty_dataset,
  too_small,
  duplicate_canary,
  schema_mismatch,
  degenerate_attribute,
  degenerate_bandwidth,
  incompatible_metric,
  zero_vector,
  out_of_range,
  empty_reference,
  label_mismatch,
  k_too_large,
  profile_mismatch,
  empty_sample,
  size_mismatch,
  no_matches,
  not_enough_uniques,
  bad_attribute,
  too_few_seeds,
  zero_density,
  overlapping_aux,
  bad_domain,
  box_insufficient,
  fit_failure,
  empty_outcome,
  empty_canaries,
  not_fitted,
  empty_train,
  bad_params,
  config_error,
  internal_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, Errc code, const std::string& message) {
  if (!cond) raise(code, message);
}

}  // namespace synthaudit
