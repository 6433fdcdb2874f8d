#pragma once

#include <stdexcept>
#include <string>

namespace cfml {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (message carries the offending line number).
class ParseError : public Error {
public:
    using Error::Error;
};

// A value or configuration violates a declared contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Wrong arguments to an API call (unknown ids, schema mismatch, bad enum).
class UsageError : public Error {
public:
    using Error::Error;
};

// Data is structurally unusable: empty dataset, infeasible split,
// empty sample, insufficient meta-examples, landmarker-infeasible sample.
class DataError : public Error {
public:
    using Error::Error;
};

// Training or evaluation could not produce a value.
class EvalError : public Error {
public:
    using Error::Error;
};

// Two tables that must cover identical ids do not.
class AlignmentError : public Error {
public:
    using Error::Error;
};

} // namespace cfml
