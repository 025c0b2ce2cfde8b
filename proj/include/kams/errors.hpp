#pragma once

#include <stdexcept>
#include <string>

namespace kams {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// distribution fitting
struct TooFewBins : Error { using Error::Error; };
struct FitDiverged : Error { using Error::Error; };

// fluid engine
struct NegativeDt : Error { using Error::Error; };

// analytic solution
struct UnstableSystem : Error { using Error::Error; };
struct NumericalDegeneracy : Error { using Error::Error; };

// analysis
struct EmptyAfterWarmup : Error { using Error::Error; };
struct BinMismatch : Error { using Error::Error; };
struct NoQualifyingPoints : Error { using Error::Error; };
struct ZeroReference : Error { using Error::Error; };
struct DegenerateSpectrum : Error { using Error::Error; };
struct ZeroOverflow : Error { using Error::Error; };
struct EmptyWindow : Error { using Error::Error; };

}  // namespace kams
