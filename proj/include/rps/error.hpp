#ifndef RPS_ERROR_HPP
#define RPS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rps {

enum class Err {
    AlreadyHasOmega,
    NoOmega,
    DivisionByZero,
    FieldMismatch,
    NotApplicable,
    CharThree,
    SyntaxError,
    AmbiguousProduct,
    UnknownVariable,
    ArityMismatch,
    CapExceeded,
    NotMultilinear,
    SmallCharacteristic,
    TheoremViolation,
    BadInput,
};

inline const char* err_name(Err e)
{
    switch (e) {
        case Err::AlreadyHasOmega: return "AlreadyHasOmega";
        case Err::NoOmega: return "NoOmega";
        case Err::DivisionByZero: return "DivisionByZero";
        case Err::FieldMismatch: return "FieldMismatch";
        case Err::NotApplicable: return "NotApplicable";
        case Err::CharThree: return "CharThree";
        case Err::SyntaxError: return "SyntaxError";
        case Err::AmbiguousProduct: return "AmbiguousProduct";
        case Err::UnknownVariable: return "UnknownVariable";
        case Err::ArityMismatch: return "ArityMismatch";
        case Err::CapExceeded: return "CapExceeded";
        case Err::NotMultilinear: return "NotMultilinear";
        case Err::SmallCharacteristic: return "SmallCharacteristic";
        case Err::TheoremViolation: return "TheoremViolation";
        case Err::BadInput: return "BadInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what)
        : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code)
    {
    }

    Err code() const { return code_; }

private:
    Err code_;
};

/// Parse failure with a byte offset into the input text.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& what)
        : Error(Err::SyntaxError, what + " (at offset " + std::to_string(position) + ")"),
          position_(position)
    {
    }

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

} // namespace rps

#endif // RPS_ERROR_HPP
