#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geostat {

// Invalid user input or violated precondition (CLI exit code 2).
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (CLI exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Cholesky hit a nonpositive pivot. `pivot` is the global row index of the
// failing diagonal entry. The MLE driver maps this to a -inf objective.
struct not_positive_definite : numeric_error {
    explicit not_positive_definite(std::int64_t pivot_index)
        : numeric_error("matrix not positive definite at pivot " + std::to_string(pivot_index)),
          pivot(pivot_index) {}
    std::int64_t pivot;
};

// A prediction target coincides with a data location, so E_t = 0 and the
// loss-of-efficiency ratio is undefined.
struct degenerate_target : numeric_error {
    explicit degenerate_target(std::int64_t target_index)
        : numeric_error("assessment target " + std::to_string(target_index) +
                        " coincides with a data location"),
          target(target_index) {}
    std::int64_t target;
};

// File / parse problem (CLI exit code 4).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace geostat
