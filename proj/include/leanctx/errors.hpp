#pragma once

#include <stdexcept>
#include <string>

namespace leanctx {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyDocument : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class EmptyStore : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidThreshold : public Error {
public:
    using Error::Error;
};

class InvalidRate : public Error {
public:
    using Error::Error;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class InvalidReward : public Error {
public:
    using Error::Error;
};

class InvalidIndex : public Error {
public:
    using Error::Error;
};

class TemplateArityError : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class CorruptAgentFile : public Error {
public:
    using Error::Error;
};

class CorruptStoreFile : public Error {
public:
    using Error::Error;
};

class ContextTooLarge : public Error {
public:
    using Error::Error;
};

// Transport or protocol failure from a remote provider. `retryable` marks
// failures worth retrying (timeouts, 429, 5xx); `status` is the HTTP status
// code, or 0 when the request never completed.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, bool retryable_, int status_ = 0)
        : Error(what), retryable(retryable_), status(status_) {}

    bool retryable;
    int status;
};

} // namespace leanctx
