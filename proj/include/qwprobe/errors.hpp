// errors.hpp
// Exception types raised by the walk engine. Every error derives from
// qwprobe::error so callers can catch the whole family at once.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qwprobe {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QWPROBE_DEFINE_ERROR(name)                                            \
    class name : public error {                                               \
    public:                                                                   \
        using error::error;                                                   \
    }

QWPROBE_DEFINE_ERROR(dimension_mismatch);
QWPROBE_DEFINE_ERROR(not_normalized);
QWPROBE_DEFINE_ERROR(invalid_dimension);
QWPROBE_DEFINE_ERROR(non_finite_parameter);
QWPROBE_DEFINE_ERROR(invalid_size);
QWPROBE_DEFINE_ERROR(duplicate_edge);
QWPROBE_DEFINE_ERROR(label_out_of_range);
QWPROBE_DEFINE_ERROR(non_injective_label_map);
QWPROBE_DEFINE_ERROR(index_out_of_range);
QWPROBE_DEFINE_ERROR(invalid_sigma);
QWPROBE_DEFINE_ERROR(invalid_argument);
QWPROBE_DEFINE_ERROR(horizon_exceeded);
QWPROBE_DEFINE_ERROR(outside_reachable_subspace);
QWPROBE_DEFINE_ERROR(non_positive_fisher);
QWPROBE_DEFINE_ERROR(unnormalized_profile);
QWPROBE_DEFINE_ERROR(too_large_for_dense);

#undef QWPROBE_DEFINE_ERROR

/// Graph DSL syntax error; line and column are 1-based.
class parse_error : public error {
public:
    parse_error(std::size_t line, std::size_t column, const std::string& what)
        : error("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Experiment configuration error; `field` is the offending key.
class config_error : public error {
public:
    config_error(std::string field, const std::string& what)
        : error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace qwprobe
