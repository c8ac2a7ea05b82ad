#pragma once

#include <stdexcept>
#include <string>

namespace scenv {

// Base class for all toolkit errors. Subclasses carry enough context to
// produce actionable CLI diagnostics and map onto exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A model file or in-memory model violates a structural rule.
class ModelError : public Error {
public:
    using Error::Error;
};

// Raised by the .umdp parser; line/col are 1-based.
class SyntaxError : public ModelError {
public:
    SyntaxError(int line, int col, const std::string& msg)
        : ModelError("syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col), message(msg) {}
    int line;
    int col;
    std::string message;
};

// A document parsed but does not denote a valid model.
class SemanticError : public ModelError {
public:
    explicit SemanticError(const std::string& msg) : ModelError("semantic error: " + msg) {}
};

class MissingParameterError : public Error {
public:
    explicit MissingParameterError(const std::string& name)
        : Error("no value for parameter '" + name + "'"), parameter(name) {}
    std::string parameter;
};

// An instantiation kept a zero/negative probability on a syntactic edge.
class NotGraphPreservingError : public Error {
public:
    NotGraphPreservingError(const std::string& edge, double value)
        : Error("instantiation is not graph-preserving: edge " + edge + " evaluates to " + std::to_string(value)),
          edge(edge), value(value) {}
    std::string edge;
    double value;
};

// A probability row does not sum to one within tolerance.
class NotWellDefinedError : public Error {
public:
    NotWellDefinedError(const std::string& where, double row_sum)
        : Error("instantiation is not well-defined: row " + where + " sums to " + std::to_string(row_sum)),
          where(where), row_sum(row_sum) {}
    std::string where;
    double row_sum;
};

// Expected cost is undefined: some policy avoids the goal set.
class ExpectedCostIllDefinedError : public Error {
public:
    explicit ExpectedCostIllDefinedError(const std::string& state)
        : Error("expected cost ill-defined: goal not reached almost surely from state " + state) {}
};

// Argument outside a documented precondition (confidence formulas etc.).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class RejectionBudgetExceededError : public Error {
public:
    explicit RejectionBudgetExceededError(long long rejected)
        : Error("sampler rejected " + std::to_string(rejected) +
                " draws; distribution looks ill-posed for this model") {}
};

// Numeric failure in an optimization or iteration backend.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace scenv
