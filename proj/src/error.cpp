#include "hjscc/error.hpp"

namespace hjscc {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NegativeMass: return "NEGATIVE_MASS";
        case Errc::NotNormalized: return "NOT_NORMALIZED";
        case Errc::NotStochastic: return "NOT_STOCHASTIC";
        case Errc::AlphabetMismatch: return "ALPHABET_MISMATCH";
        case Errc::UnknownAxis: return "UNKNOWN_AXIS";
        case Errc::OverlappingSets: return "OVERLAPPING_SETS";
        case Errc::TensorTooLarge: return "TENSOR_TOO_LARGE";
        case Errc::InvalidArgument: return "INVALID_ARGUMENT";
        case Errc::NoConvergence: return "NO_CONVERGENCE";
        case Errc::SymbolOutOfRange: return "SYMBOL_OUT_OF_RANGE";
        case Errc::NoFeasiblePoint: return "NO_FEASIBLE_POINT";
        case Errc::SizeExplosion: return "SIZE_EXPLOSION";
        case Errc::BudgetExceeded: return "BUDGET_EXCEEDED";
        case Errc::Parse: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace hjscc
