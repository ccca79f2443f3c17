#pragma once

#include <stdexcept>
#include <string>

namespace optoamp {

// Parameter validation failures.
struct NonPositiveRate : std::invalid_argument {
    explicit NonPositiveRate(const std::string& what) : std::invalid_argument(what) {}
};
struct NegativeValue : std::invalid_argument {
    explicit NegativeValue(const std::string& what) : std::invalid_argument(what) {}
};

// The resolvent iw + M is numerically singular (condition estimate above the
// guard threshold); signals operation at or beyond an instability point.
struct NearSingular : std::runtime_error {
    explicit NearSingular(const std::string& what) : std::runtime_error(what) {}
};

struct Kappa2NotZero : std::invalid_argument {
    explicit Kappa2NotZero(const std::string& what) : std::invalid_argument(what) {}
};
struct DenominatorUnderflow : std::runtime_error {
    explicit DenominatorUnderflow(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyGrid : std::invalid_argument {
    explicit EmptyGrid(const std::string& what) : std::invalid_argument(what) {}
};
struct UnknownParam : std::invalid_argument {
    explicit UnknownParam(const std::string& what) : std::invalid_argument(what) {}
};
struct UnknownMetric : std::invalid_argument {
    explicit UnknownMetric(const std::string& what) : std::invalid_argument(what) {}
};

struct NoPeakInBracket : std::runtime_error {
    explicit NoPeakInBracket(const std::string& what) : std::runtime_error(what) {}
};
struct MultiplePeaks : std::runtime_error {
    explicit MultiplePeaks(const std::string& what) : std::runtime_error(what) {}
};

struct EigenSolverFailure : std::runtime_error {
    explicit EigenSolverFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NotStable : std::runtime_error {
    explicit NotStable(const std::string& what) : std::runtime_error(what) {}
};
struct StepTooLarge : std::runtime_error {
    explicit StepTooLarge(const std::string& what) : std::runtime_error(what) {}
};

} // namespace optoamp
