#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace setsolve {

enum class TermKind : std::uint8_t {
    Var,
    Atom,
    Int,
    Str,
    Pair,
    Empty,
    ExtSet,    // {head / tail}
    CP,        // cp(left, right)
    Interval,  // int(lo, hi)
    Arith,     // integer expression, only interpreted by `is` and comparisons
    Apply,     // f(x) in machine files; removed by desugaring
};

struct TermNode;

/// Immutable, structurally shared term. Ground extensional sets are kept in
/// canonical form (elements sorted by the total term order, no duplicates)
/// so structural equality of ground sets is set equality.
class Term {
public:
    Term() = default;

    static Term var(std::string name);
    static Term atom(std::string name);
    static Term integer(std::int64_t value);
    static Term str(std::string text);
    static Term pair(Term first, Term second);
    static Term empty();
    static Term ext(Term head, Term tail);
    static Term cp(Term left, Term right);
    static Term interval(Term lo, Term hi);
    static Term arith(char op, Term lhs, Term rhs);
    static Term apply(Term fn, Term arg);

    /// `{e1,...,en / tail}`; with the default tail this is `{e1,...,en}`.
    static Term set_of(const std::vector<Term>& elems, Term tail = empty());

    [[nodiscard]] TermKind kind() const;
    [[nodiscard]] bool is(TermKind k) const { return node_ && kind() == k; }
    [[nodiscard]] bool is_var() const { return is(TermKind::Var); }

    /// Name of a Var/Atom, text of a Str.
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] std::int64_t value() const;
    [[nodiscard]] char op() const;

    // Children. Pair: first/second. ExtSet: head/tail. CP/Interval/Arith/Apply: lhs/rhs.
    [[nodiscard]] const Term& lhs() const;
    [[nodiscard]] const Term& rhs() const;
    [[nodiscard]] const Term& head() const { return lhs(); }
    [[nodiscard]] const Term& tail() const { return rhs(); }

    [[nodiscard]] bool is_ground() const;
    /// True for terms that syntactically denote a set ({}, {t/A}, cp, int).
    [[nodiscard]] bool is_set_term() const;
    [[nodiscard]] std::size_t hash() const;
    /// Bloom mask over the variable names occurring in the term.
    [[nodiscard]] std::uint64_t var_mask() const;

    [[nodiscard]] bool contains_var(const std::string& name) const;
    void collect_vars(std::vector<std::string>& out) const;

    explicit operator bool() const { return static_cast<bool>(node_); }
    [[nodiscard]] const TermNode* get() const { return node_.get(); }

    friend bool operator==(const Term& a, const Term& b);
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
    friend struct TermFactory;
    explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const TermNode> node_;
};

struct TermNode {
    TermKind kind;
    char op = 0;
    bool ground = true;
    std::int64_t value = 0;
    std::string text;
    Term a;
    Term b;
    std::size_t hash = 0;
    std::uint64_t mask = 0;
};

std::uint64_t var_bit(const std::string& name);

/// Elements and tail of a (possibly nested) extensional set term.
struct FlatSet {
    std::vector<Term> elems;
    Term tail;
};
FlatSet flatten_set(const Term& t);

/// Ground canonical form: sorted/deduplicated sets, expanded ground cp/int.
Term canonical(const Term& t);

/// Members of a ground set value (after canonicalization). Empty optional
/// semantics are expressed by returning false when `t` is not a ground set.
bool ground_members(const Term& t, std::vector<Term>& out);

std::string to_string(const Term& t);

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

}  // namespace setsolve
