#ifndef FCIKIT_ERROR_HPP
#define FCIKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fcikit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstantColumnError : Error {
    explicit ConstantColumnError(const std::string& column)
        : Error("constant column: " + column), column(column) {}
    std::string column;
};

struct TooFewRowsError : Error {
    explicit TooFewRowsError(int rows)
        : Error("too few rows: " + std::to_string(rows)) {}
};

struct SingularSubmatrixError : Error {
    explicit SingularSubmatrixError(double condition)
        : Error("singular correlation submatrix (condition number " +
                std::to_string(condition) + ")"),
          condition(condition) {}
    double condition;
};

struct InsufficientSamplesError : Error {
    InsufficientSamplesError(int n, int cond_size)
        : Error("insufficient samples: n=" + std::to_string(n) +
                " with |cond|=" + std::to_string(cond_size)) {}
};

struct DuplicateNameError : Error {
    explicit DuplicateNameError(const std::string& name)
        : Error("duplicate node name: " + name) {}
};

struct NotAdjacentError : Error {
    NotAdjacentError(const std::string& a, const std::string& b)
        : Error("nodes not adjacent: " + a + ", " + b) {}
};

struct LatentQueriedError : Error {
    explicit LatentQueriedError(const std::string& name)
        : Error("latent variable queried: " + name) {}
};

struct MissingSepsetError : Error {
    MissingSepsetError(const std::string& a, const std::string& b)
        : Error("no separating set recorded for non-adjacent pair: " + a + ", " + b) {}
};

struct UnknownAnswerCodeError : Error {
    UnknownAnswerCodeError(const std::string& question, const std::string& code)
        : Error("unknown answer code for " + question + ": '" + code + "'"),
          question(question), code(code) {}
    std::string question;
    std::string code;
};

struct MissingRuleError : Error {
    explicit MissingRuleError(const std::string& question)
        : Error("no raw column / rule coverage for question: " + question),
          question(question) {}
    std::string question;
};

struct EmptyResultError : Error {
    using Error::Error;
};

struct NonBinaryDummyError : Error {
    NonBinaryDummyError(const std::string& column, double value)
        : Error("non-binary dummy value in " + column + ": " + std::to_string(value)) {}
};

struct BootstrapReplicateError : Error {
    BootstrapReplicateError(int replicate, const std::string& cause)
        : Error("bootstrap replicate " + std::to_string(replicate) + " failed: " + cause),
          replicate(replicate) {}
    int replicate;
};

}  // namespace fcikit

#endif
