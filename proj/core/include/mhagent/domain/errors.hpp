#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mhagent {

// Root of every error the library throws. Callers that only want to report
// and continue can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied an argument that violates a precondition.
class InputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed file or payload. `field` names the offending element when known.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// load_profile on a path that does not exist. Callers create a fresh profile.
class NoProfileError : public Error {
public:
    explicit NoProfileError(const std::string& path) : Error("no profile at " + path) {}
};

// A value parsed fine but falls outside its allowed range.
class RangeError : public Error {
public:
    using Error::Error;
};

class ContractViolation : public Error {
public:
    using Error::Error;
};

// Model server could not be reached after all retry attempts.
class TransportError : public Error {
public:
    TransportError(const std::string& message, int attempts)
        : Error(message + " (after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

// The backend answered but reported a failure; carries the server message.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& server_message)
        : Error("backend error: " + server_message), server_message_(server_message) {}

    const std::string& server_message() const noexcept { return server_message_; }

private:
    std::string server_message_;
};

// A stream broke off after some chunks had already been delivered.
class PartialOutputError : public Error {
public:
    PartialOutputError(const std::string& message, std::vector<std::string> chunks)
        : Error(message), chunks_(std::move(chunks)) {}

    const std::vector<std::string>& chunks() const noexcept { return chunks_; }
    std::string partial_text() const {
        std::string out;
        for (const auto& c : chunks_) out += c;
        return out;
    }

private:
    std::vector<std::string> chunks_;
};

class AssessmentError : public Error {
public:
    using Error::Error;
};

class LabelError : public Error {
public:
    using Error::Error;
};

class SynthesisError : public Error {
public:
    using Error::Error;
};

class AggregateError : public Error {
public:
    using Error::Error;
};

}  // namespace mhagent
