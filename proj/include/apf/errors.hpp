#pragma once

#include <stdexcept>
#include <string>

namespace apf {

// Malformed input data: parse failures, invalid instances, bad cost values.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated an operation precondition (out-of-bounds node, bad config).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Broken internal invariant, e.g. a cyclic parent chain.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace apf
