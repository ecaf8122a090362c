#pragma once

#include <stdexcept>
#include <string>

namespace macrosig {

// Base of every library error. Subclasses carry no extra state; the type
// itself is the classification and the message names the offending input.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// dataset
struct MalformedDate : Error { using Error::Error; };
struct MalformedNumber : Error { using Error::Error; };
struct NonContiguousDates : Error { using Error::Error; };
struct InteriorMissingValue : Error { using Error::Error; };
struct InsufficientHistory : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct CoverageGap : Error { using Error::Error; };
struct NonBinaryLabel : Error { using Error::Error; };
struct TooFewRows : Error { using Error::Error; };

// stattests
struct TooFewObservations : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct RankDeficientDesign : Error { using Error::Error; };

// arima
struct TooShort : Error { using Error::Error; };
struct OptimizerDivergence : Error { using Error::Error; };
struct AllFitsFailed : Error { using Error::Error; };
struct NoMissingHead : Error { using Error::Error; };

// featsel / ensembles
struct ZeroVarianceColumn : Error { using Error::Error; };
struct SingleClassLabel : Error { using Error::Error; };
struct TooFewFeatures : Error { using Error::Error; };
struct EmptyData : Error { using Error::Error; };

// linmodels
struct RankDeficient : Error { using Error::Error; };
struct PerfectSeparation : Error { using Error::Error; };
struct SingularInformation : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// neural
struct NonFiniteLoss : Error { using Error::Error; };

// eval
struct LengthMismatch : Error { using Error::Error; };
struct NonBinaryInput : Error { using Error::Error; };
struct EmptyMatrix : Error { using Error::Error; };
struct KTooLarge : Error { using Error::Error; };
struct CvFoldError : Error { using Error::Error; };

// pipeline
struct ConfigError : Error { using Error::Error; };
struct StageError : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

}  // namespace macrosig
