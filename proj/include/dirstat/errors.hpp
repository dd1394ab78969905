#pragma once

#include <stdexcept>
#include <string>

namespace dirstat {

/// A numerical argument lies outside the domain an operation supports
/// (negative chi-squared abscissa, Kummer argument beyond the supported
/// range, unsupported dimension, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input data violates a structural contract: mixed dimensions, malformed
/// CSV rows, missing columns, weights that do not sum to one.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void throw_domain(const std::string& what) { throw DomainError(what); }
[[noreturn]] inline void throw_data(const std::string& what) { throw DataError(what); }

}  // namespace detail
}  // namespace dirstat
