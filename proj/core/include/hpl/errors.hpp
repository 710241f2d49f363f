#pragma once

#include <stdexcept>
#include <string>

namespace hpl {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_argument : error {
    using error::error;
};

struct coprimality_violation : invalid_argument {
    using invalid_argument::invalid_argument;
};

struct out_of_range_error : error {
    using error::error;
};

struct precondition_violation : error {
    using error::error;
};

// poly_bad_set: the window start r is too small for the requested epsilon
struct window_too_early : precondition_violation {
    using precondition_violation::precondition_violation;
};

struct classification_unstable : error {
    using error::error;
};

struct marker_required : error {
    using error::error;
};

struct selection_failure : error {
    using error::error;
};

struct degenerate_measure : invalid_argument {
    using invalid_argument::invalid_argument;
};

struct hypothesis_violation : error {
    using error::error;
};

struct unsupported_set : invalid_argument {
    using invalid_argument::invalid_argument;
};

struct internal_error : error {
    using error::error;
};

} // namespace hpl
