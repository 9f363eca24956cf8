#pragma once

#include <stdexcept>
#include <string>

namespace wb {

enum class ErrorKind {
    SyntaxError,
    UnknownSymbol,
    ArityMismatch,
    PivotNotFree,
    PStillPresent,
    InvalidDepth,
    InvalidArity,
    SignatureClash,
    SymbolClash,
    SignatureMismatch,
    UnboundVariable,
    NotEquivalence,
    NotCongruence,
    EmptyDomain,
    CapExceeded,
    HeightIllFormed,
    BadInput,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::UnknownSymbol: return "UnknownSymbol";
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::PivotNotFree: return "PivotNotFree";
        case ErrorKind::PStillPresent: return "PStillPresent";
        case ErrorKind::InvalidDepth: return "InvalidDepth";
        case ErrorKind::InvalidArity: return "InvalidArity";
        case ErrorKind::SignatureClash: return "SignatureClash";
        case ErrorKind::SymbolClash: return "SymbolClash";
        case ErrorKind::SignatureMismatch: return "SignatureMismatch";
        case ErrorKind::UnboundVariable: return "UnboundVariable";
        case ErrorKind::NotEquivalence: return "NotEquivalence";
        case ErrorKind::NotCongruence: return "NotCongruence";
        case ErrorKind::EmptyDomain: return "EmptyDomain";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::HeightIllFormed: return "HeightIllFormed";
        case ErrorKind::BadInput: return "BadInput";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Enumeration limits. Everything here fails loudly (CapExceeded) instead of
// silently truncating.
struct Caps {
    std::size_t max_tuples = std::size_t{1} << 16;  // arity-tuple universe for orbit enumeration
    std::size_t max_orbits = 16;                    // 2^orbits invariant relations get listed
    std::size_t max_invariant_classes = 20;         // subset enumeration in strong-model checks
    std::size_t max_partial_maps = 1'000'000;       // back-and-forth fixpoint
    std::size_t max_class_members = std::size_t{1} << 16;  // per-arity members of a class family
};

} // namespace wb
