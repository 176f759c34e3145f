#pragma once

#include <stdexcept>
#include <string>

namespace qcdiff {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidLetter : Error { using Error::Error; };
struct AllIdentity : Error { using Error::Error; };
struct TooManyQubits : Error { using Error::Error; };
struct MissingParameter : Error { using Error::Error; };
struct EmptyCircuit : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct EmptyDecode : Error { using Error::Error; };
struct InvalidRange : Error { using Error::Error; };
struct BadTimestep : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct CorruptCheckpoint : Error { using Error::Error; };
struct QubitMismatch : Error { using Error::Error; };
struct NonHermitianResidue : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct EmptyPopulation : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace qcdiff
