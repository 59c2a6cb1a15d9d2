#include "atomgraph/error.hpp"

namespace atomgraph {

const char* to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::unsupported: return "Unsupported";
        case Errc::arity_too_large: return "ArityTooLarge";
        case Errc::too_many_edges: return "TooManyEdges";
        case Errc::unbounded_kernel: return "UnboundedKernel";
        case Errc::intensity_overflow: return "IntensityOverflow";
        case Errc::max_iter_exceeded: return "MaxIterExceeded";
        case Errc::divergent_kernel: return "DivergentKernel";
        case Errc::no_threshold: return "NoThreshold";
        case Errc::undefined_for_no_paths: return "UndefinedForNoPaths";
        case Errc::degenerate_degrees: return "DegenerateDegrees";
        case Errc::io: return "IoError";
    }
    return "Unknown";
}

int exit_code(Errc code) {
    switch (code) {
        case Errc::max_iter_exceeded:
        case Errc::divergent_kernel:
        case Errc::no_threshold:
        case Errc::undefined_for_no_paths:
        case Errc::degenerate_degrees:
            return 3;
        case Errc::io:
            return 4;
        default:
            return 2;
    }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace atomgraph
