#pragma once

#include <stdexcept>
#include <string>

namespace hjscc {

enum class Errc {
    NegativeMass,
    NotNormalized,
    NotStochastic,
    AlphabetMismatch,
    UnknownAxis,
    OverlappingSets,
    TensorTooLarge,
    InvalidArgument,
    NoConvergence,
    SymbolOutOfRange,
    NoFeasiblePoint,
    SizeExplosion,
    BudgetExceeded,
    Parse,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace hjscc
