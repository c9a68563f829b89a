#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace patanalog {

enum class ErrorCode {
    unsupported_format,
    encoding_error,
    language_mismatch,
    empty_vocabulary,
    domain_error,
    dimension_mismatch,
    unknown_term,
    zero_vector,
    degenerate_center,
    degenerate_mean,
    malformed_model_file,
    empty_term_array,
    empty_store,
    missing_field,
    not_found,
    storage_corruption,
    unknown_service_id,
    empty_service_set,
    unknown_function,
    not_executable,
    stage_error,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::unsupported_format: return "UnsupportedFormat";
        case ErrorCode::encoding_error: return "EncodingError";
        case ErrorCode::language_mismatch: return "LanguageMismatch";
        case ErrorCode::empty_vocabulary: return "EmptyVocabulary";
        case ErrorCode::domain_error: return "DomainError";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::unknown_term: return "UnknownTerm";
        case ErrorCode::zero_vector: return "ZeroVector";
        case ErrorCode::degenerate_center: return "DegenerateCenter";
        case ErrorCode::degenerate_mean: return "DegenerateMean";
        case ErrorCode::malformed_model_file: return "MalformedModelFile";
        case ErrorCode::empty_term_array: return "EmptyTermArray";
        case ErrorCode::empty_store: return "EmptyStore";
        case ErrorCode::missing_field: return "MissingField";
        case ErrorCode::not_found: return "NotFound";
        case ErrorCode::storage_corruption: return "StorageCorruption";
        case ErrorCode::unknown_service_id: return "UnknownServiceId";
        case ErrorCode::empty_service_set: return "EmptyServiceSet";
        case ErrorCode::unknown_function: return "UnknownFunction";
        case ErrorCode::not_executable: return "NotExecutable";
        case ErrorCode::stage_error: return "StageError";
    }
    return "UnknownError";
}

/// Library-wide exception. `details` carries structured payload such as
/// missing service ids or missing template fields.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::vector<std::string> details = {})
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code),
          details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    std::vector<std::string> details_;
};

}  // namespace patanalog
