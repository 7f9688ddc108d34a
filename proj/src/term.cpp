#include "setsolve/term.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace setsolve {

struct TermFactory {
    static Term wrap(std::shared_ptr<const TermNode> n) { return Term(std::move(n)); }
};

namespace {

constexpr std::int64_t kMaxExpandedInterval = 4096;

std::size_t mix(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

Term make(TermKind k, std::string text, std::int64_t value, char op, Term a, Term b)
{
    auto n = std::make_shared<TermNode>();
    n->kind = k;
    n->op = op;
    n->value = value;
    n->text = std::move(text);
    n->a = std::move(a);
    n->b = std::move(b);
    std::size_t h = std::hash<int>{}(static_cast<int>(k));
    switch (k) {
    case TermKind::Var:
        n->ground = false;
        n->mask = var_bit(n->text);
        h = mix(h, std::hash<std::string>{}(n->text));
        break;
    case TermKind::Atom:
    case TermKind::Str:
        h = mix(h, std::hash<std::string>{}(n->text));
        break;
    case TermKind::Int:
        h = mix(h, std::hash<std::int64_t>{}(value));
        break;
    case TermKind::Empty:
        break;
    default:
        n->ground = n->a.is_ground() && n->b.is_ground();
        n->mask = n->a.var_mask() | n->b.var_mask();
        h = mix(mix(mix(h, static_cast<std::size_t>(op)), n->a.hash()), n->b.hash());
        break;
    }
    n->hash = h;
    return TermFactory::wrap(std::move(n));
}

Term build_chain(const std::vector<Term>& elems, Term tail)
{
    for (auto it = elems.rbegin(); it != elems.rend(); ++it)
        tail = make(TermKind::ExtSet, {}, 0, 0, *it, tail);
    return tail;
}

// Canonical ground set from a list of ground elements.
Term canonical_set(std::vector<Term> elems)
{
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    return build_chain(elems, Term::empty());
}

}  // namespace

std::uint64_t var_bit(const std::string& name)
{
    return std::uint64_t{1} << (std::hash<std::string>{}(name) & 63U);
}

Term Term::var(std::string name) { return make(TermKind::Var, std::move(name), 0, 0, {}, {}); }
Term Term::atom(std::string name) { return make(TermKind::Atom, std::move(name), 0, 0, {}, {}); }
Term Term::integer(std::int64_t v) { return make(TermKind::Int, {}, v, 0, {}, {}); }
Term Term::str(std::string text) { return make(TermKind::Str, std::move(text), 0, 0, {}, {}); }
Term Term::pair(Term a, Term b) { return make(TermKind::Pair, {}, 0, 0, std::move(a), std::move(b)); }

Term Term::empty()
{
    static const Term e = make(TermKind::Empty, {}, 0, 0, {}, {});
    return e;
}

Term Term::ext(Term head, Term tail)
{
    assert(tail.is(TermKind::Empty) || tail.is(TermKind::ExtSet) || tail.is_var() ||
           tail.is(TermKind::CP) || tail.is(TermKind::Interval));
    Term t = make(TermKind::ExtSet, {}, 0, 0, std::move(head), std::move(tail));
    if (t.is_ground())
        return canonical(t);
    return t;
}

Term Term::cp(Term left, Term right)
{
    Term t = make(TermKind::CP, {}, 0, 0, std::move(left), std::move(right));
    if (t.is_ground())
        return canonical(t);
    return t;
}

Term Term::interval(Term lo, Term hi)
{
    Term t = make(TermKind::Interval, {}, 0, 0, std::move(lo), std::move(hi));
    if (t.is_ground())
        return canonical(t);
    return t;
}

Term Term::arith(char op, Term lhs, Term rhs) { return make(TermKind::Arith, {}, 0, op, std::move(lhs), std::move(rhs)); }
Term Term::apply(Term fn, Term arg) { return make(TermKind::Apply, {}, 0, 0, std::move(fn), std::move(arg)); }

Term Term::set_of(const std::vector<Term>& elems, Term tail)
{
    Term t = build_chain(elems, std::move(tail));
    if (t.is_ground())
        return canonical(t);
    return t;
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->text; }
std::int64_t Term::value() const { return node_->value; }
char Term::op() const { return node_->op; }
const Term& Term::lhs() const { return node_->a; }
const Term& Term::rhs() const { return node_->b; }
bool Term::is_ground() const { return !node_ || node_->ground; }
std::size_t Term::hash() const { return node_ ? node_->hash : 0; }
std::uint64_t Term::var_mask() const { return node_ ? node_->mask : 0; }

bool Term::is_set_term() const
{
    if (!node_)
        return false;
    switch (kind()) {
    case TermKind::Empty:
    case TermKind::ExtSet:
    case TermKind::CP:
    case TermKind::Interval:
        return true;
    default:
        return false;
    }
}

bool Term::contains_var(const std::string& name) const
{
    if (!node_ || (node_->mask & var_bit(name)) == 0)
        return false;
    if (kind() == TermKind::Var)
        return node_->text == name;
    return node_->a.contains_var(name) || node_->b.contains_var(name);
}

void Term::collect_vars(std::vector<std::string>& out) const
{
    if (!node_ || node_->ground)
        return;
    if (kind() == TermKind::Var) {
        if (std::find(out.begin(), out.end(), node_->text) == out.end())
            out.push_back(node_->text);
        return;
    }
    node_->a.collect_vars(out);
    node_->b.collect_vars(out);
}

bool operator==(const Term& a, const Term& b)
{
    if (a.node_ == b.node_)
        return true;
    if (!a.node_ || !b.node_)
        return false;
    if (a.node_->hash != b.node_->hash || a.kind() != b.kind())
        return false;
    const TermNode& x = *a.node_;
    const TermNode& y = *b.node_;
    return x.op == y.op && x.value == y.value && x.text == y.text && x.a == y.a && x.b == y.b;
}

std::strong_ordering operator<=>(const Term& a, const Term& b)
{
    if (a.node_ == b.node_)
        return std::strong_ordering::equal;
    if (!a.node_)
        return std::strong_ordering::less;
    if (!b.node_)
        return std::strong_ordering::greater;
    const TermNode& x = *a.node_;
    const TermNode& y = *b.node_;
    if (auto c = x.kind <=> y.kind; c != 0)
        return c;
    if (auto c = x.value <=> y.value; c != 0)
        return c;
    if (auto c = x.op <=> y.op; c != 0)
        return c;
    if (auto c = x.text.compare(y.text); c != 0)
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = x.a <=> y.a; c != 0)
        return c;
    return x.b <=> y.b;
}

FlatSet flatten_set(const Term& t)
{
    FlatSet out;
    Term cur = t;
    while (cur.is(TermKind::ExtSet)) {
        out.elems.push_back(cur.head());
        cur = cur.tail();
    }
    out.tail = cur;
    return out;
}

bool ground_members(const Term& t, std::vector<Term>& out)
{
    if (!t.is_ground())
        return false;
    Term c = canonical(t);
    switch (c.kind()) {
    case TermKind::Empty:
        return true;
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(c);
        out.insert(out.end(), f.elems.begin(), f.elems.end());
        return f.tail.is(TermKind::Empty);
    }
    case TermKind::Interval:
        for (std::int64_t i = c.lhs().value(); i <= c.rhs().value(); ++i)
            out.push_back(Term::integer(i));
        return true;
    default:
        return false;
    }
}

Term canonical(const Term& t)
{
    if (!t || !t.is_ground())
        return t;
    switch (t.kind()) {
    case TermKind::Pair: {
        Term a = canonical(t.lhs());
        Term b = canonical(t.rhs());
        if (a == t.lhs() && b == t.rhs())
            return t;
        return Term::pair(a, b);
    }
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(t);
        std::vector<Term> elems;
        elems.reserve(f.elems.size());
        for (const Term& e : f.elems)
            elems.push_back(canonical(e));
        if (!f.tail.is(TermKind::Empty)) {
            std::vector<Term> more;
            if (ground_members(f.tail, more))
                elems.insert(elems.end(), more.begin(), more.end());
        }
        // Fast exit when already sorted and unique.
        bool sorted = f.tail.is(TermKind::Empty);
        for (std::size_t i = 0; sorted && i < elems.size(); ++i) {
            if (!(elems[i] == f.elems[i]))
                sorted = false;
            if (i > 0 && !(elems[i - 1] < elems[i]))
                sorted = false;
        }
        if (sorted)
            return t;
        return canonical_set(std::move(elems));
    }
    case TermKind::CP: {
        std::vector<Term> left;
        std::vector<Term> right;
        if (!ground_members(t.lhs(), left) || !ground_members(t.rhs(), right))
            return t;
        std::vector<Term> prod;
        prod.reserve(left.size() * right.size());
        for (const Term& x : left)
            for (const Term& y : right)
                prod.push_back(Term::pair(x, y));
        return canonical_set(std::move(prod));
    }
    case TermKind::Interval: {
        if (!t.lhs().is(TermKind::Int) || !t.rhs().is(TermKind::Int))
            return t;
        std::int64_t lo = t.lhs().value();
        std::int64_t hi = t.rhs().value();
        if (hi < lo)
            return Term::empty();
        if (hi - lo >= kMaxExpandedInterval)
            return t;
        std::vector<Term> elems;
        for (std::int64_t i = lo; i <= hi; ++i)
            elems.push_back(Term::integer(i));
        return build_chain(elems, Term::empty());
    }
    default:
        return t;
    }
}

namespace {

bool plain_atom(const std::string& s)
{
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z'))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

int arith_prec(char op) { return (op == '*' || op == '/') ? 2 : 1; }

void print(std::ostream& os, const Term& t, int prec = 0)
{
    if (!t) {
        os << "<null>";
        return;
    }
    switch (t.kind()) {
    case TermKind::Var:
        os << t.name();
        break;
    case TermKind::Atom:
        if (plain_atom(t.name()))
            os << t.name();
        else
            os << '\'' << t.name() << '\'';
        break;
    case TermKind::Int:
        os << t.value();
        break;
    case TermKind::Str:
        os << '"' << t.name() << '"';
        break;
    case TermKind::Pair:
        os << '[';
        print(os, t.lhs());
        os << ',';
        print(os, t.rhs());
        os << ']';
        break;
    case TermKind::Empty:
        os << "{}";
        break;
    case TermKind::ExtSet: {
        FlatSet f = flatten_set(t);
        os << '{';
        for (std::size_t i = 0; i < f.elems.size(); ++i) {
            if (i)
                os << ',';
            print(os, f.elems[i]);
        }
        if (!f.tail.is(TermKind::Empty)) {
            os << '/';
            print(os, f.tail);
        }
        os << '}';
        break;
    }
    case TermKind::CP:
        os << "cp(";
        print(os, t.lhs());
        os << ',';
        print(os, t.rhs());
        os << ')';
        break;
    case TermKind::Interval:
        os << "int(";
        print(os, t.lhs());
        os << ',';
        print(os, t.rhs());
        os << ')';
        break;
    case TermKind::Arith: {
        int p = arith_prec(t.op());
        if (p < prec)
            os << '(';
        print(os, t.lhs(), p);
        os << ' ' << t.op() << ' ';
        print(os, t.rhs(), p + 1);
        if (p < prec)
            os << ')';
        break;
    }
    case TermKind::Apply:
        print(os, t.lhs(), 3);
        os << '(';
        print(os, t.rhs());
        os << ')';
        break;
    }
}

}  // namespace

std::string to_string(const Term& t)
{
    std::ostringstream os;
    print(os, t);
    return os.str();
}

}  // namespace setsolve
