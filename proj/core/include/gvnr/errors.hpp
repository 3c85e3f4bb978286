#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gvnr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A parameter or input lies outside the domain an operation accepts.
class DomainError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A parameter became NaN or infinite during training.
class TrainingDiverged : public Error {
public:
    TrainingDiverged(std::size_t epoch, double learning_rate)
        : Error(describe(epoch, learning_rate)), epoch_(epoch),
          learning_rate_(learning_rate) {}

    std::size_t epoch() const noexcept { return epoch_; }
    double learning_rate() const noexcept { return learning_rate_; }

private:
    static std::string describe(std::size_t epoch, double learning_rate) {
        std::ostringstream os;
        os << "training diverged: non-finite parameter after epoch " << epoch << " with learning rate "
           << learning_rate << "; lower --lr or check the input matrix";
        return os.str();
    }

    std::size_t epoch_;
    double learning_rate_;
};

}  // namespace gvnr
