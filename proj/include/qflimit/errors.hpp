#pragma once

#include <stdexcept>
#include <string>

namespace qflimit {

/// Root of the library's exception hierarchy. Everything thrown on purpose
/// derives from this, so callers can separate domain failures from genuine
/// programming errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- graph construction / indexing -----------------------------------------
struct DuplicateEdge : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
/// |E| = 0 is rejected wherever the statistic's 1/sqrt(|E|) scaling is needed.
struct EmptyGraph : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InvalidThreshold : Error { using Error::Error; };

// ---- generators / specs -----------------------------------------------------
struct InvalidParameter : Error { using Error::Error; };
/// A random draw produced a graph with no edges; the caller retries with a
/// fresh seed.
struct RandomGraphEmpty : Error { using Error::Error; };
struct NoClosedForm : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };

// ---- numerics ---------------------------------------------------------------
struct TooLarge : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct TooLargeForOracle : Error { using Error::Error; };
struct DegenerateTruncation : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct InfiniteFourthMoment : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };

// ---- I/O --------------------------------------------------------------------
struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace qflimit
