#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polmc {

struct UnknownSymbolError : std::runtime_error {
    explicit UnknownSymbolError(const std::string& symbol)
        : std::runtime_error("unknown symbol: " + symbol) {}
};

struct UnknownWorldError : std::runtime_error {
    explicit UnknownWorldError(const std::string& world)
        : std::runtime_error("unknown world: " + world) {}
};

struct UnknownAgentError : std::runtime_error {
    explicit UnknownAgentError(const std::string& agent)
        : std::runtime_error("unknown agent: " + agent) {}
};

struct UnknownPropError : std::runtime_error {
    explicit UnknownPropError(const std::string& prop)
        : std::runtime_error("unknown proposition: " + prop) {}
};

struct FragmentMismatchError : std::runtime_error {
    explicit FragmentMismatchError(const std::string& what)
        : std::runtime_error("fragment mismatch: " + what) {}
};

/// Raised by the formula/regex parsers; carries the byte offset of the
/// failure and a description of what was expected there.
struct ParseError : std::runtime_error {
    std::size_t position;
    std::string expected;

    ParseError(std::size_t pos, const std::string& what)
        : std::runtime_error("parse error at offset " + std::to_string(pos) + ": " + what),
          position(pos),
          expected(what) {}
};

struct ModelFormatError : std::runtime_error {
    explicit ModelFormatError(const std::string& what)
        : std::runtime_error("model format error: " + what) {}
};

struct KTooLargeError : std::runtime_error {
    explicit KTooLargeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polmc
