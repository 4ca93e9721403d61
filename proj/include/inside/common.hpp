#ifndef INSIDE_COMMON_HPP
#define INSIDE_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace inside {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---- error types ------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    explicit ParseError(std::size_t line, const std::string& what)
        : Error("parse error at line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};
struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id), id(id) {}
    std::string id;
};
struct MissingTimestamp : Error {
    explicit MissingTimestamp(const std::string& id)
        : Error("item lacks timestamp required for chronological split: " + id), id(id) {}
    std::string id;
};
struct SchemaMismatch : Error {
    SchemaMismatch(const std::string& expected, const std::string& found)
        : Error("checkpoint schema mismatch: expected " + expected + ", found " + found) {}
};
struct IoError : Error {
    using Error::Error;
};
struct ShapeMismatch : Error {
    using Error::Error;
};
struct EmptyText : Error {
    EmptyText() : Error("text is empty") {}
};
struct GeneratorUnavailable : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct InvalidOrder : Error {
    using Error::Error;
};
struct UnknownType : Error {
    using Error::Error;
};
struct EmptySplit : Error {
    EmptySplit() : Error("evaluation split is empty") {}
};
struct SingleClassTrainSet : Error {
    SingleClassTrainSet() : Error("training split contains a single class") {}
};
struct UnknownItem : Error {
    explicit UnknownItem(const std::string& id) : Error("unknown item id: " + id) {}
};

// ---- hashing ----------------------------------------------------------

// FNV-1a, stable across platforms and processes.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex_digest(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace inside

#endif
