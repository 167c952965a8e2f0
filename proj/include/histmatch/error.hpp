#ifndef HISTMATCH_ERROR_HPP
#define HISTMATCH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace histmatch {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Histogram / LUT math.
class EmptyInput : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};
class ZeroTotal : public Error {
public:
    using Error::Error;
};
class BinMismatch : public Error {
public:
    using Error::Error;
};

// File and stream handling.
class IoError : public Error {
public:
    using Error::Error;
};
class ParseError : public Error {
public:
    using Error::Error;
};
class VersionMismatch : public Error {
public:
    using Error::Error;
};

/// Image file could not be decoded; the message names the offending path.
class DecodeError : public Error {
public:
    using Error::Error;
};
class EmptyDataset : public Error {
public:
    using Error::Error;
};

// Manifest / fold handling.
class UnknownLabel : public ParseError {
public:
    using ParseError::ParseError;
};
class DuplicatePath : public ParseError {
public:
    using ParseError::ParseError;
};
class FoldOutOfRange : public ParseError {
public:
    using ParseError::ParseError;
};
class InvalidK : public Error {
public:
    using Error::Error;
};

// Augmentation.
class PoolLoadError : public Error {
public:
    using Error::Error;
};

// Metrics.
class EmptyClass : public Error {
public:
    using Error::Error;
};
class TooFewSamples : public Error {
public:
    using Error::Error;
};

} // namespace histmatch

#endif // HISTMATCH_ERROR_HPP
