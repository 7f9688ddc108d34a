#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "setsolve/formula.hpp"
#include "setsolve/type_expr.hpp"

namespace setsolve {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, Span s)
        : std::runtime_error(std::to_string(s.line) + ":" + std::to_string(s.col) + ": " + msg), span(s)
    {
    }
    Span span;
};

Term parse_term(std::string_view src);
Formula parse_formula(std::string_view src);
TypeExpr parse_type(std::string_view src);

struct Clause {
    std::string name;
    std::vector<Term> params;
    Formula body;
    Span span;
};

struct Query {
    Formula formula;
    Span span;
};

/// Parsed .slog source: predicate clauses, type directives and queries.
struct Program {
    std::vector<Clause> clauses;
    std::vector<Query> queries;
    std::map<std::string, TypeExpr> type_defs;
    std::map<std::string, std::vector<TypeExpr>> pred_types;

    [[nodiscard]] std::vector<const Clause*> clauses_of(const std::string& name, std::size_t arity) const;
    void merge(const Program& other);
};

Program parse_program(std::string_view src);
Program load_program(const std::string& path);

/// Type annotation carried by `dec(X, T)` calls.
constexpr const char* kDecPredicate = "dec";

}  // namespace setsolve
