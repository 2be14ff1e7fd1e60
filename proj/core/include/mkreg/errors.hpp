#pragma once

#include <stdexcept>
#include <string>

namespace mkreg {

// Bad user input: invalid points, out-of-range parameters, malformed configs.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// A quantity was requested outside the validity range of the formula that
// computes it (e.g. the off-diagonal comparison bound past the conjugate radius).
class OutOfValidity : public std::domain_error {
public:
    explicit OutOfValidity(const std::string& msg) : std::domain_error(msg) {}
};

// A spectrally-represented function lies outside the kernel's RKHS
// (nonzero coefficient on a level where the spectral filter vanishes).
class NotInRkhs : public std::domain_error {
public:
    explicit NotInRkhs(const std::string& msg) : std::domain_error(msg) {}
};

// Linear-algebra failure: non-finite entries, singular solves.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mkreg
