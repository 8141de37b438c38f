#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exloop {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- trajectory grammar --------------------------------------------------

struct MalformedTag : Error {
    std::size_t offset;
    MalformedTag(const std::string& what, std::size_t off)
        : Error(what + " (offset " + std::to_string(off) + ")"), offset(off) {}
};

struct NestedTag : Error {
    std::size_t offset;
    NestedTag(const std::string& what, std::size_t off)
        : Error(what + " (offset " + std::to_string(off) + ")"), offset(off) {}
};

// -- experience base -----------------------------------------------------

struct InvalidCounts : Error {
    using Error::Error;
};

struct InvalidPrinciple : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct UnknownPrinciple : Error {
    using Error::Error;
};

struct IoFailure : Error {
    using Error::Error;
};

struct CorruptRecord : Error {
    std::size_t line;
    CorruptRecord(const std::string& what, std::size_t line_no)
        : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// -- curation ------------------------------------------------------------

struct MissingSeparator : Error {
    using Error::Error;
};

struct EmptyDescription : Error {
    using Error::Error;
};

struct AmbiguousJudgement : Error {
    using Error::Error;
};

// -- retrieval / numerics ------------------------------------------------

struct ZeroVector : Error {
    using Error::Error;
};

struct GroupTooSmall : Error {
    using Error::Error;
};

struct EmptyMask : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

// -- providers / config --------------------------------------------------

struct ProviderError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace exloop
