#ifndef ELPROC_ERROR_HPP
#define ELPROC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace elproc {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Fewer than two lines of one orientation were detected; the perspective
// parameters cannot be estimated.
struct InsufficientLines : Error {
    explicit InsufficientLines(const std::string& msg) : Error(msg) {}
};

// Regression lines are near-parallel; quadrangle corners run off to infinity.
struct DegenerateQuadrangle : Error {
    explicit DegenerateQuadrangle(const std::string& msg) : Error(msg) {}
};

// Pattern score fell below the detectability floor.
struct ModuleNotFound : Error {
    explicit ModuleNotFound(const std::string& msg) : Error(msg) {}
};

}  // namespace elproc

#endif
