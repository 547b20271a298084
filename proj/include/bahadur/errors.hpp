#pragma once

#include <stdexcept>
#include <string>

namespace bahadur {

// Invalid model or schedule parameters, rejected at construction.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A rate function was asked for outside the range where it is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Sum of |a_i|^e over i >= n does not converge.
class DivergentTail : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A recursion produced inf/nan.
class NonFinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Conditional quantities requested from a sample without lagged locations.
class MissingLags : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Marginal density at the quantile is too small relative to oracle noise.
class DensityTooSmall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateTrim : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NonPositiveStatistic : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Dichotomy branch requested too close to the 4*beta - 3 = gamma boundary.
class BoundaryRefusal : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Config file problems. `where` is "section.key" or "line N".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace bahadur
