#pragma once

#include <stdexcept>
#include <string>

namespace presuppose {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (empty label list, k out of
// range, ...). Always a bug upstream, never a data problem.
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace presuppose
