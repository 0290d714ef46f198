#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class domain_error : public error {
public:
    using error::error;
};

class precision_exhausted : public error {
public:
    using error::error;
};

class overflow_error : public error {
public:
    using error::error;
};

class table_too_short : public error {
public:
    using error::error;
};

class non_monotone_lift : public error {
public:
    using error::error;
};

class series_diverged : public error {
public:
    using error::error;
};

class no_crossing : public error {
public:
    using error::error;
};

class transversality_lost : public error {
public:
    using error::error;
};

} // namespace torusflow
