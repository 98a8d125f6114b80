#pragma once

#include <stdexcept>
#include <string>

namespace deforge {

// Violation of a structural precondition (dimension mismatch, wrong bidegree,
// non-canonical input, ...).  Always indicates a caller bug, never bad data.
struct InvariantViolation : std::logic_error {
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

// Operands have incompatible (bi)degrees for the requested identity or
// operator.
struct DegreeMismatch : std::logic_error {
    explicit DegreeMismatch(const std::string& what) : std::logic_error(what) {}
};

// The frame endomorphism 1 - conj(phi) phi (or a composite built from it) is
// singular, so the requested change of frame does not exist.
struct FrameDegenerate : std::runtime_error {
    explicit FrameDegenerate(const std::string& what) : std::runtime_error(what) {}
};

// An operation that requires an integrable Beltrami differential received a
// non-integrable one.
struct IntegrabilityViolation : std::runtime_error {
    explicit IntegrabilityViolation(const std::string& what) : std::runtime_error(what) {}
};

// Textual input (catalog file, scalar literal, CLI argument) failed to parse.
struct ParseError : std::runtime_error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& what, int line_, int col_)
        : std::runtime_error(what + " at line " + std::to_string(line_) + ", column " +
                             std::to_string(col_)),
          line(line_),
          col(col_) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Lookup of a named catalog entry or builtin failed.
struct UnknownName : std::runtime_error {
    explicit UnknownName(const std::string& what) : std::runtime_error(what) {}
};

// A randomized search exhausted its retry budget without producing a witness.
struct ConstructionFailed : std::runtime_error {
    explicit ConstructionFailed(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace deforge
