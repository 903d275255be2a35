#pragma once

#include <stdexcept>
#include <string>

namespace geosugg {

/// File missing, unreadable or unwritable.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input present but not in the expected syntax.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parsed but violates a structural invariant.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage could not produce a result from valid input.
class pipeline_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace geosugg
