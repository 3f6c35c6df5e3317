#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crn {

// Root of every exception thrown by the library. Callers that only need a
// message can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that can never form a valid network or run configuration.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidReaction : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// rank(S) < M. `dependent` names the reactions whose stoichiometric columns
// are linear combinations of earlier ones.
class RankDeficient : public InvalidInput {
public:
    RankDeficient(std::string what, std::vector<std::string> dependent)
        : InvalidInput(std::move(what)), dependent_(std::move(dependent)) {}

    const std::vector<std::string>& dependent() const noexcept { return dependent_; }

private:
    std::vector<std::string> dependent_;
};

// Argument outside the domain of a function (log of a nonpositive number,
// point outside the admissible region).
class DomainError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace crn
