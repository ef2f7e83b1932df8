#pragma once

#include <stdexcept>
#include <string>

namespace matchstat {

// Every thrown error carries a machine-readable kind string; the CLI maps
// kinds to exit codes (validation-like -> 2, precision/convergence -> 3,
// capacity -> 4).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error("capacity", what) {}
};

class PrecisionError : public Error {
public:
    PrecisionError(const std::string& what, long suggested_bits = 0)
        : Error("precision", what), suggested_bits_(suggested_bits) {}
    long suggested_bits() const noexcept { return suggested_bits_; }

private:
    long suggested_bits_;
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error("convergence", what) {}
};

class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& what) : Error("singularity", what) {}
};

class RangeError : public Error {
public:
    explicit RangeError(const std::string& what) : Error("range", what) {}
};

class DegenerateFitError : public Error {
public:
    explicit DegenerateFitError(const std::string& what) : Error("degenerate_fit", what) {}
};

class InsufficientAcceptanceError : public Error {
public:
    explicit InsufficientAcceptanceError(const std::string& what)
        : Error("insufficient_acceptance", what) {}
};

inline int exit_code_for(const Error& e) {
    const std::string& k = e.kind();
    if (k == "precision" || k == "convergence" || k == "insufficient_acceptance") return 3;
    if (k == "capacity") return 4;
    return 2;
}

}  // namespace matchstat
