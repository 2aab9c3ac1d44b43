#pragma once

#include <stdexcept>
#include <string>

namespace bids {

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct LeafBin : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotAtBoundary : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotInitialized : std::logic_error {
    using std::logic_error::logic_error;
};

struct DegenerateDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AcceptanceTooLow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyDataset : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateInterval : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bids
