#pragma once

#include <stdexcept>
#include <string>

namespace ssmic {

/// Malformed input files, invalid parameters, inconsistent dimensions.
/// The command-line front end maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: eigensolver non-convergence, unusable eigenvalues,
/// degenerate systems. Maps to exit code 1.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssmic
