#pragma once
#include <stdexcept>
#include <string>

namespace gl2 {

// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation exceeded what this build is prepared to do (CLI exit code 4).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gl2
