#pragma once

#include <stdexcept>
#include <string>

namespace semibloch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateLatticeError : public Error { using Error::Error; };
class LatticeMismatchError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class DegenerateBandError : public Error { using Error::Error; };
class RefineGridError : public Error { using Error::Error; };
class GridShapeError : public Error { using Error::Error; };
class FieldPresetError : public Error { using Error::Error; };
class NondegeneracyError : public Error { using Error::Error; };
class SingularJacobianError : public Error { using Error::Error; };
class UnsupportedGaugeError : public Error { using Error::Error; };
class PacketWidthError : public Error { using Error::Error; };
class ModeBudgetError : public Error { using Error::Error; };
class NonHermitianError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };
class BasisTruncationError : public Error { using Error::Error; };

}  // namespace semibloch
