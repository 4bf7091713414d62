#pragma once

#include <stdexcept>
#include <string>

namespace mms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error { public: using Error::Error; };
class NonFiniteInput : public Error { public: using Error::Error; };
class EmptyInput : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class NotAFaceCandidate : public Error { public: using Error::Error; };

/// A nearest-point or distance query was sent to an oracle holding the other point variant.
class VariantMismatch : public Error { public: using Error::Error; };

/// The round discipline of the oracle was broken (double open, read before submit, ...).
class AdaptivityViolation : public Error { public: using Error::Error; };

class NoSuchPrefix : public Error { public: using Error::Error; };
class IterationBudgetExceeded : public Error { public: using Error::Error; };
class DimensionCapExceeded : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };

} // namespace mms
