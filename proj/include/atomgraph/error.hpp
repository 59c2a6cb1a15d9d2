#pragma once

#include <stdexcept>
#include <string>

namespace atomgraph {

enum class Errc {
    invalid_argument,
    unsupported,
    arity_too_large,
    too_many_edges,
    unbounded_kernel,
    intensity_overflow,
    max_iter_exceeded,
    divergent_kernel,
    no_threshold,
    undefined_for_no_paths,
    degenerate_degrees,
    io,
};

const char* to_string(Errc code);

/// Process exit status used by the command-line tool for each error class:
/// 2 for bad input, 3 for numeric non-convergence, 4 for I/O.
int exit_code(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(Errc::invalid_argument, what);
}

}  // namespace atomgraph
