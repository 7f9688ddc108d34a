#pragma once

#include <memory>
#include <string>
#include <vector>

namespace setsolve {

enum class TypeKind { Int, Str, Basic, Enum, Product, SetOf, Named, Var };

/// {log}-style type: int | str | Atom | etype([...]) | [T1,...,Tn] | stype(T).
/// `Named` is an unresolved synonym reference; `Var` is an inference variable.
struct TypeExpr {
    TypeKind kind = TypeKind::Int;
    std::string name;                 // Basic / Named / Var
    std::vector<std::string> members; // Enum
    std::vector<TypeExpr> args;       // Product components, SetOf element

    static TypeExpr integer() { return {TypeKind::Int, {}, {}, {}}; }
    static TypeExpr string() { return {TypeKind::Str, {}, {}, {}}; }
    static TypeExpr basic(std::string n) { return {TypeKind::Basic, std::move(n), {}, {}}; }
    static TypeExpr enumeration(std::vector<std::string> m) { return {TypeKind::Enum, {}, std::move(m), {}}; }
    static TypeExpr product(std::vector<TypeExpr> c) { return {TypeKind::Product, {}, {}, std::move(c)}; }
    static TypeExpr set_of(TypeExpr e) { return {TypeKind::SetOf, {}, {}, {std::move(e)}}; }
    static TypeExpr named(std::string n) { return {TypeKind::Named, std::move(n), {}, {}}; }
    static TypeExpr var(std::string n) { return {TypeKind::Var, std::move(n), {}, {}}; }

    friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

std::string to_string(const TypeExpr& t);

}  // namespace setsolve
