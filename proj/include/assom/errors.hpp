#pragma once

#include <stdexcept>
#include <string>

namespace assom {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- numerical / algebraic failures ---------------------------------------

struct DegenerateBasis : Error {
    explicit DegenerateBasis(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

// --- data ingestion --------------------------------------------------------

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct RaggedRows : Error {
    explicit RaggedRows(const std::string& msg) : Error(msg) {}
};

struct NotMinority : Error {
    explicit NotMinority(const std::string& msg) : Error(msg) {}
};

struct UnknownLabel : Error {
    explicit UnknownLabel(const std::string& msg) : Error(msg) {}
};

struct TooSmall : Error {
    explicit TooSmall(const std::string& msg) : Error(msg) {}
};

// --- oversampling ----------------------------------------------------------

struct EmptyClass : Error {
    explicit EmptyClass(const std::string& msg) : Error(msg) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

struct InsufficientVariance : Error {
    explicit InsufficientVariance(const std::string& msg) : Error(msg) {}
};

struct TooFewMinority : Error {
    explicit TooFewMinority(const std::string& msg) : Error(msg) {}
};

// --- evaluation / configuration --------------------------------------------

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

struct IncompleteGrid : Error {
    explicit IncompleteGrid(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace assom
