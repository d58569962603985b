#ifndef FERN_ERROR_HPP
#define FERN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fern {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class ZeroVectorError : public Error {
public:
    using Error::Error;
};

/// Two support vectors are identical, so they do not define a hyperplane.
class DegenerateHyperplane : public Error {
public:
    using Error::Error;
};

class EmptyIndexError : public Error {
public:
    using Error::Error;
};

class EmptyStoreError : public Error {
public:
    using Error::Error;
};

/// Malformed, truncated or inconsistent on-disk data.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Caller passed an out-of-range count, size or option.
class ArgumentError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace fern

#endif
