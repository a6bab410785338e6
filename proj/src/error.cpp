#include "synthaudit/error.hpp"

namespace synthaudit {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ok: return "Ok";
    case Errc::io_error: return "IoError";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::too_small: return "TooSmall";
    case Errc::duplicate_canary: return "DuplicateCanary";
    case Errc::schema_mismatch: return "SchemaMismatch";
    case Errc::degenerate_attribute: return "DegenerateAttribute";
    case Errc::degenerate_bandwidth: return "DegenerateBandwidth";
    case Errc::incompatible_metric: return "IncompatibleMetric";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::empty_reference: return "EmptyReference";
    case Errc::label_mismatch: return "LabelMismatch";
    case Errc::k_too_large: return "KTooLarge";
    case Errc::profile_mismatch: return "ProfileMismatch";
    case Errc::empty_sample: return "EmptySample";
    case Errc::size_mismatch: return "SizeMismatch";
    case Errc::no_matches: return "NoMatches";
    case Errc::not_enough_uniques: return "NotEnoughUniques";
    case Errc::bad_attribute: return "BadAttribute";
    case Errc::too_few_seeds: return "TooFewSeeds";
    case Errc::zero_density: return "ZeroDensity";
    case Errc::overlapping_aux: return "OverlappingAux";
    case Errc::bad_domain: return "BadDomain";
    case Errc::box_insufficient: return "BoxInsufficient";
    case Errc::fit_failure: return "FitFailure";
    case Errc::empty_outcome: return "EmptyOutcome";
    case Errc::empty_canaries: return "EmptyCanaries";
    case Errc::not_fitted: return "NotFitted";
    case Errc::empty_train: return "EmptyTrain";
    case Errc::bad_params: return "BadParams";
    case Errc::config_error: return "ConfigError";
    case Errc::internal_error: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace synthaudit
