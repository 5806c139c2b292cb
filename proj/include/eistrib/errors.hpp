#pragma once

#include <stdexcept>
#include <string>

namespace eistrib {

/// Raised when a closed-form model is evaluated outside the geometry it is
/// valid for (e.g. a surround capacitance that would come out non-positive,
/// or a diverging cylinder capacitance).
class model_validity_error : public std::runtime_error {
public:
    explicit model_validity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an inversion target lies outside the attainable range of the
/// forward model over the search bracket. Carries the attainable range so
/// callers can report it.
class no_solution_error : public std::runtime_error {
public:
    no_solution_error(const std::string& what, double attainable_min, double attainable_max)
        : std::runtime_error(what), attainable_min(attainable_min), attainable_max(attainable_max) {}

    double attainable_min;
    double attainable_max;
};

/// Raised when a dataset join is ambiguous (one row matches several
/// candidates within tolerance).
class join_error : public std::runtime_error {
public:
    explicit join_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when calibration data cannot form a valid thickness model
/// (non-monotone after aggregation, too few film-bearing records).
class model_build_error : public std::runtime_error {
public:
    explicit model_build_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by file readers on malformed input. Carries the offending line
/// number (1-based; 0 when not line-specific).
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}

    std::size_t line;
};

} // namespace eistrib
