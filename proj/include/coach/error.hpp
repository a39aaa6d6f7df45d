#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coach {

enum class Errc {
    parse_error,
    cycle_detected,
    duplicate_word_entry,
    undeclared_parent_tag,
    invalid_pattern,
    invalid_tree,
    unresolved_subschema,
    dangling_ask,
    schema_cycle,
    no_topics_remaining,
    non_monotonic_timestamp,
    non_finite_feature,
    invalid_model,
    empty_sequence,
    invalid_timeline,
    interval_out_of_span,
    threshold_exceeds_raters,
    insufficient_data,
    missing_class,
    misaligned_lengths,
    invalid_config,
    model_load_failure,
    session_not_active,
    session_expired,
    unknown_session,
    malformed_message,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace coach
