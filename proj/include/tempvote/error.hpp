#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tempvote {

/// Instance data violating the model (shape mismatch, empty ballots, unknown labels).
class InvalidInstance : public std::invalid_argument {
public:
        using std::invalid_argument::invalid_argument;
};

/// An exhaustive enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
public:
        CapExceeded(const std::string& what, std::size_t requested, std::size_t cap)
            : std::runtime_error(what + ": " + std::to_string(requested) + " exceeds cap " + std::to_string(cap)),
              requested_(requested), cap_(cap) {}

        [[nodiscard]] std::size_t requested() const { return requested_; }
        [[nodiscard]] std::size_t cap() const { return cap_; }

private:
        std::size_t requested_;
        std::size_t cap_;
};

/// A semi-online rule was started on an instance with a different horizon.
class HorizonMismatch : public std::invalid_argument {
public:
        using std::invalid_argument::invalid_argument;
};

/// Malformed instance or config document.
class ParseError : public std::runtime_error {
public:
        using std::runtime_error::runtime_error;
};

} // namespace tempvote
