#pragma once

#include <stdexcept>
#include <string>

namespace loopmod {

// Violated graph or matrix invariant (non-partitioning legs, duplicate holocolor, ...).
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A configured resource limit was hit. `dimension` is -1 when not tied to one.
class CapacityError : public std::runtime_error {
public:
    CapacityError(const std::string& what, int dimension = -1)
        : std::runtime_error(what), dimension_(dimension) {}

    int dimension() const noexcept { return dimension_; }

private:
    int dimension_;
};

}  // namespace loopmod
