#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aiql {

struct SourcePos {
    int line = 1;
    int col = 1;
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct SourceSpan {
    SourcePos begin;
    SourcePos end;
};

std::string to_string(const SourcePos& pos);

/// Base class for errors attributable to query text.
class QueryError : public std::runtime_error {
public:
    QueryError(const std::string& message, SourceSpan span)
        : std::runtime_error(message), span_(span) {}

    const SourceSpan& span() const noexcept { return span_; }
    virtual const char* kind() const noexcept = 0;

private:
    SourceSpan span_;
};

class SyntaxError : public QueryError {
public:
    SyntaxError(const std::string& message, SourceSpan span, std::vector<std::string> expected = {})
        : QueryError(message, span), expected_(std::move(expected)) {}

    const std::vector<std::string>& expected() const noexcept { return expected_; }
    const char* kind() const noexcept override { return "syntax"; }

private:
    std::vector<std::string> expected_;
};

class SemanticError : public QueryError {
public:
    SemanticError(const std::string& message, std::string name, SourceSpan span)
        : QueryError(message, span), name_(std::move(name)) {}

    /// The offending identifier (may be empty for structural problems).
    const std::string& name() const noexcept { return name_; }
    const char* kind() const noexcept override { return "semantic"; }

private:
    std::string name_;
};

/// Raised when an execution exceeds a configured budget (e.g. cross-product rows).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// IO and store-state failures.
class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aiql
