#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lexer.hpp"
#include "setsolve/formula.hpp"
#include "setsolve/type_expr.hpp"

namespace setsolve::detail {

/// Recursive-descent parser for terms, formulas and type expressions over a
/// token vector. Program and machine front ends drive it statement by
/// statement.
class FormulaParser {
public:
    explicit FormulaParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    /// Machine mode: lowercase identifiers may name state variables and
    /// `f(x)` denotes function application.
    std::function<std::optional<Term>(const std::string&)> ident_hook;
    bool machine_mode = false;

    Term term();
    Formula formula();
    TypeExpr type();

    [[nodiscard]] const Token& peek(std::size_t k = 0) const;
    Token next();
    [[nodiscard]] bool is_punct(const char* p, std::size_t k = 0) const;
    [[nodiscard]] bool is_ident(const char* name, std::size_t k = 0) const;
    bool accept(const char* p);
    void expect(const char* p);
    std::string expect_ident();
    [[nodiscard]] bool at_end() const { return peek().kind == Tok::End; }
    [[noreturn]] void fail(const std::string& msg) const;

    std::size_t pos = 0;

private:
    Formula implication();
    Formula disjunction();
    Formula conjunction();
    Formula unary();
    Formula relation();
    Formula quantifier(CKind kind, Span s);
    Formula builtin(const std::string& name, Span s);
    bool relop_at(std::size_t k) const;
    Term additive();
    Term multiplicative();
    Term primary();
    std::vector<Term> term_list(const char* close);

    std::vector<Token> toks_;
};

bool is_builtin_constraint(const std::string& name);

}  // namespace setsolve::detail
