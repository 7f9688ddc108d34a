#pragma once

#include <memory>
#include <string>
#include <vector>

#include "setsolve/substitution.hpp"
#include "setsolve/term.hpp"

namespace setsolve {

struct Span {
    int line = 0;
    int col = 0;
};

enum class CKind : std::uint8_t {
    Eq, Neq,
    In, Nin,
    Un, Nun,
    Disj, Ndisj,
    Subset, Nsubset,
    Comp, Ncomp,
    Inv, Ninv,
    Id, Nid,
    Pfun, Npfun,
    Dom, Ndom,
    Ran, Nran,
    ApplyTo,
    Foplus,
    Le, Lt,
    Is,
    Foreach, Exists,
};

const char* ckind_name(CKind k);
std::size_t ckind_arity(CKind k);

struct Quant;
class Formula;

/// Primitive constraint. Quantifiers carry their binder in `q`.
struct Constraint {
    CKind kind = CKind::Eq;
    std::vector<Term> args;
    std::shared_ptr<const Quant> q;

    friend bool operator==(const Constraint& a, const Constraint& b);
};

enum class FKind : std::uint8_t { True, False, Atom, And, Or, Neg, Implies, Call, Let };

struct FormulaNode;

/// Immutable formula tree with structural sharing.
class Formula {
public:
    Formula() = default;

    static Formula truth();
    static Formula falsity();
    static Formula atom(Constraint c, Span s = {});
    static Formula atom(CKind k, std::vector<Term> args, Span s = {});
    static Formula conj(Formula a, Formula b);
    static Formula conj(const std::vector<Formula>& fs);
    static Formula disj(Formula a, Formula b);
    static Formula disj(const std::vector<Formula>& fs);
    static Formula neg(Formula a, Span s = {});
    static Formula implies(Formula a, Formula b, Span s = {});
    static Formula call(std::string name, std::vector<Term> args, Span s = {});
    /// Introduces `vars` defined by the functional part `func`; `body` is the
    /// part that changes under negation.
    static Formula let(std::vector<std::string> vars, Formula func, Formula body);

    [[nodiscard]] FKind kind() const;
    [[nodiscard]] bool is(FKind k) const { return node_ && kind() == k; }
    [[nodiscard]] const Constraint& constraint() const;
    [[nodiscard]] const Formula& left() const;
    [[nodiscard]] const Formula& right() const;
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const std::vector<Term>& args() const;
    [[nodiscard]] const std::vector<std::string>& vars() const;
    [[nodiscard]] Span span() const;
    [[nodiscard]] std::uint64_t var_mask() const;

    explicit operator bool() const { return static_cast<bool>(node_); }

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    friend struct FormulaFactory;
    std::shared_ptr<const FormulaNode> node_;
};

/// foreach(ctrl in domain, [locals], body, func) / exists(...).
/// Bound names (variables of ctrl and locals) are unique after normalization.
struct Quant {
    Term ctrl;
    Term domain;
    std::vector<std::string> locals;
    Formula body;
    Formula func;  // may be truth()
    std::uint64_t mask = 0;
};

struct FormulaNode {
    FKind kind = FKind::True;
    Constraint c;
    Formula a;
    Formula b;
    std::string name;
    std::vector<Term> args;
    std::vector<std::string> vars;
    Span span;
    std::uint64_t mask = 0;
};

Constraint make_quant(CKind kind, Term ctrl, Term domain, std::vector<std::string> locals,
                      Formula body, Formula func = Formula::truth());

/// Variables bound by a quantifier (ctrl variables plus locals).
std::vector<std::string> bound_vars(const Quant& q);

Constraint apply(const Substitution& s, const Constraint& c);
Formula apply(const Substitution& s, const Formula& f);
Constraint replace_vars(const Constraint& c, const std::map<std::string, Term>& m);
Formula replace_vars(const Formula& f, const std::map<std::string, Term>& m);

/// Free variables in first-occurrence order.
void free_vars(const Formula& f, std::vector<std::string>& out);
void free_vars(const Constraint& c, std::vector<std::string>& out);

std::string to_string(const Constraint& c);
std::string to_string(const Formula& f);

}  // namespace setsolve
