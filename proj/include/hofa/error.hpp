#pragma once

#include <stdexcept>
#include <string>

namespace hofa {

struct Error : std::runtime_error {
    explicit Error(const std::string& m) : std::runtime_error(m) {}
};

// |H| (or a table) exceeds the configured cap.
struct SizeError : Error {
    using Error::Error;
};
// operation applied outside its domain (mask violations etc.)
struct DomainError : Error {
    using Error::Error;
};
// malformed argument (bad face, width mismatch, non-invertible unit, ...)
struct ArgumentError : Error {
    using Error::Error;
};
// an input violates a stated contract (slice sums, missing b-data, ...)
struct ContractError : Error {
    using Error::Error;
};
// randomized procedure exhausted its retry budget
struct StochasticFailure : Error {
    using Error::Error;
};
// derived parameter is too weak for the construction (delta >= 1, delta' <= 0)
struct ParameterTooWeakError : Error {
    using Error::Error;
};
// measured operator contraction >= 1
struct NotContractiveError : Error {
    using Error::Error;
};
struct ReductionFailure : Error {
    using Error::Error;
};
// no strict majority in a vote that the hypotheses guarantee
struct AmbiguityError : Error {
    using Error::Error;
};

}  // namespace hofa
