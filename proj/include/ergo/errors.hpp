// Exception types shared across the library.

#ifndef ERGO_ERRORS_HPP
#define ERGO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ergo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad word, bad config, precondition violated.
struct InvalidArgument : Error {
    using Error::Error;
};

// Block decode hit a block that is not in the code image.
struct CodeError : Error {
    using Error::Error;
};

// A constant cylinder was passed where the construction needs a mixed one
// and automatic pre-refinement was disabled.
struct ConstantWordError : Error {
    using Error::Error;
};

// Internal re-verification of a freshly built certificate failed.  This
// indicates a bug in the construction, not bad input; callers must abort.
struct CertificateFailure : Error {
    using Error::Error;
};

// Displacement witness search exhausted max_depth.  Does not distinguish
// "hypotheses violated" from "witness deeper than the cutoff".
struct DepthExceeded : Error {
    using Error::Error;
};

// Requested computation is beyond a documented limit (degree, horizon, ...).
struct Unsupported : Error {
    using Error::Error;
};

// An ambiguous frequency decomposition was found where dissociateness
// promised uniqueness.
struct IntegrityError : Error {
    using Error::Error;
};

// Rejection sampler acceptance rate collapsed; reduce depth or r.
struct EnvelopeTooLoose : Error {
    using Error::Error;
};

}  // namespace ergo

#endif
