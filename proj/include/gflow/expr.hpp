#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "gflow/fields.hpp"

namespace gflow::expr {

// Arithmetic expression language for config files: identifiers, literals,
// + - * / ^, unary minus, sin/cos/tan/exp/sqrt and the constant pi.
// '^' is right-associative and binds tighter than unary minus, so -x^2
// parses as -(x^2). There is no implicit multiplication.

struct ParseError : std::runtime_error {
    ParseError(std::size_t offset_, std::string expected_)
        : std::runtime_error("syntax error at offset " + std::to_string(offset_) + ": expected " +
                             expected_),
          offset(offset_),
          expected(std::move(expected_)) {}
    std::size_t offset;
    std::string expected;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TokenKind { Number, Ident, Op, LParen, RParen, Func, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t offset = 0;
    double number = 0.0;
};

std::vector<Token> tokenize(std::string_view src);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Literal, Variable, Unary, Binary, Call };
    Kind kind = Kind::Literal;
    double literal = 0.0;
    std::string name; // variable or function name
    char op = 0;      // binary operator
    NodePtr lhs, rhs; // Binary: both; Unary/Call: lhs only
    std::size_t offset = 0, length = 0;
};

class Ast {
public:
    static Ast parse(std::string_view src); // throws ParseError

    const Node& root() const { return *root_; }
    const std::string& source() const { return src_; }
    std::vector<std::string> free_variables() const;

    std::string to_string() const;
    bool structurally_equal(const Ast& other) const;

    // Generic evaluation; unbound variables and sqrt of a negative value throw
    // EvalError. Division by zero yields an infinity for downstream
    // finiteness checks to reject.
    template <class S>
    S eval_generic(const std::map<std::string, S, std::less<>>& bindings) const;

    double eval(const std::map<std::string, double, std::less<>>& bindings) const;
    // Forward-mode gradient with respect to the ordered names at the point.
    Vector grad(std::span<const std::string> wrt, const Vector& point,
                const std::map<std::string, double, std::less<>>& extra = {}) const;

private:
    Ast(NodePtr root, std::string src) : root_(std::move(root)), src_(std::move(src)) {}
    NodePtr root_;
    std::string src_;
};

// Bind an AST as a scalar field: variables take the slot order given here,
// everything else must be covered by constants.
ScalarFieldPtr to_scalar_field(const Ast& ast, std::vector<std::string> variables,
                               std::map<std::string, double, std::less<>> constants = {});

} // namespace gflow::expr
