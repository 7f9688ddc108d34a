#include "setsolve/machine.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "formula_parser.hpp"

namespace setsolve {

using detail::FormulaParser;
using detail::Tok;

std::string machine_var(const std::string& ident)
{
    std::string v = ident;
    if (!v.empty())
        v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    return v;
}

std::string primed(const std::string& var) { return var + "_"; }

std::map<std::string, TypeExpr> Machine::type_map() const
{
    std::map<std::string, TypeExpr> m;
    for (const auto& [n, t] : type_defs)
        m[n] = t;
    return m;
}

const Decl* Machine::variable(const std::string& var) const
{
    for (const auto& d : variables)
        if (d.var == var)
            return &d;
    return nullptr;
}

const Event* Machine::event(const std::string& n) const
{
    for (const auto& e : events)
        if (e.name == n)
            return &e;
    return nullptr;
}

std::map<std::string, TypeExpr> Machine::declared_types() const
{
    auto defs = type_map();
    std::map<std::string, TypeExpr> out;
    for (const auto& c : constants) {
        if (!c.decl.type)
            continue;
        TypeExpr t = resolve_type(*c.decl.type, defs);
        out[c.decl.var] = c.is_set ? TypeExpr::set_of(t) : t;
    }
    for (const auto& v : variables) {
        if (!v.type)
            continue;
        TypeExpr t = resolve_type(*v.type, defs);
        out[v.var] = t;
        out[primed(v.var)] = t;
    }
    return out;
}

std::optional<Term> Machine::carrier(const Constant& c) const
{
    if (!c.is_set || !c.decl.type)
        return std::nullopt;
    TypeExpr t = resolve_type(*c.decl.type, type_map());
    if (t.kind != TypeKind::Enum)
        return std::nullopt;
    return Term::set_of(enum_members(t));
}

namespace {

const std::set<std::string> kKeywords = {"machine", "context", "variables", "invariants", "init",
                                         "event",   "any",     "where",     "then",       "end",
                                         "annotate", "type",   "set",       "constant"};

class MachineParser {
public:
    explicit MachineParser(std::string_view src) : p_(detail::tokenize(src, true))
    {
        p_.machine_mode = true;
        p_.ident_hook = [this](const std::string& id) -> std::optional<Term> {
            std::string v = machine_var(id);
            if (scope_.count(v))
                return Term::var(v);
            return std::nullopt;
        };
    }

    Machine run()
    {
        keyword("machine");
        m_.name = name();
        while (!p_.at_end()) {
            Span s = p_.peek().span;
            std::string kw = p_.expect_ident();
            if (kw == "context")
                context();
            else if (kw == "variables")
                variables();
            else if (kw == "invariants")
                invariants();
            else if (kw == "init")
                init();
            else if (kw == "event")
                event(s);
            else if (kw == "annotate")
                annotate();
            else
                throw ParseError("unexpected '" + kw + "'", s);
        }
        return std::move(m_);
    }

private:
    FormulaParser p_;
    Machine m_;
    std::set<std::string> scope_;
    std::set<std::string> state_;

    bool at_keyword(const char* kw) const { return p_.is_ident(kw); }

    void keyword(const char* kw)
    {
        if (!at_keyword(kw))
            p_.fail(std::string("expected '") + kw + "'");
        p_.next();
    }

    std::string name()
    {
        const auto& t = p_.peek();
        if ((t.kind != Tok::Ident && t.kind != Tok::Var) || t.quoted)
            p_.fail("expected a name");
        return p_.next().text;
    }

    bool at_block_end() const { return at_keyword("end") || p_.at_end(); }

    Decl decl(bool typed_required)
    {
        Decl d;
        d.span = p_.peek().span;
        d.source = name();
        d.var = machine_var(d.source);
        if (!d.var.empty() && d.var.back() == '_')
            throw ParseError("identifier '" + d.source + "' must not end with '_'", d.span);
        if (scope_.count(d.var))
            throw ParseError("'" + d.source + "' is already declared", d.span);
        if (typed_required || p_.is_punct(":")) {
            p_.expect(":");
            d.type = p_.type();
        }
        return d;
    }

    void context()
    {
        if (!at_keyword("type") && !at_keyword("set") && !at_keyword("constant") && !at_keyword("end"))
            m_.context = name();
        while (!at_block_end()) {
            Span s = p_.peek().span;
            std::string kw = p_.expect_ident();
            if (kw == "type") {
                std::string n = p_.expect_ident();
                for (const auto& td : m_.type_defs)
                    if (td.first == n)
                        throw ParseError("type '" + n + "' is already defined", s);
                p_.expect("=");
                m_.type_defs.emplace_back(n, p_.type());
            } else if (kw == "set" || kw == "constant") {
                Constant c{decl(true), kw == "set"};
                scope_.insert(c.decl.var);
                m_.constants.push_back(std::move(c));
            } else {
                throw ParseError("unexpected '" + kw + "' in context", s);
            }
        }
        keyword("end");
    }

    void variables()
    {
        while (!at_block_end()) {
            Decl d = decl(true);
            scope_.insert(d.var);
            state_.insert(d.var);
            m_.variables.push_back(std::move(d));
        }
        keyword("end");
    }

    std::string label(std::set<std::string>& seen)
    {
        Span s = p_.peek().span;
        std::string l = name();
        if (!seen.insert(l).second)
            throw ParseError("duplicate label '" + l + "'", s);
        p_.expect(":");
        return l;
    }

    Labeled labeled(std::set<std::string>& seen)
    {
        Span s = p_.peek().span;
        std::string l = label(seen);
        return {l, p_.formula(), s};
    }

    void invariants()
    {
        std::set<std::string> seen;
        for (const auto& i : m_.invariants)
            seen.insert(i.label);
        while (!at_block_end())
            m_.invariants.push_back(labeled(seen));
        keyword("end");
    }

    Action action(std::set<std::string>& seen)
    {
        Action a;
        a.span = p_.peek().span;
        a.label = label(seen);
        Span at = p_.peek().span;
        Term lhs = p_.term();
        Term target = lhs;
        if (lhs.is(TermKind::Apply)) {
            target = lhs.lhs();
            a.index = lhs.rhs();
        }
        if (!target.is_var() || !state_.count(target.name()))
            throw ParseError("assignment to undeclared variable " + to_string(target), at);
        a.target = target.name();
        p_.expect(":=");
        a.value = p_.term();
        return a;
    }

    void init()
    {
        std::set<std::string> seen;
        while (!at_block_end())
            m_.init.push_back(action(seen));
        keyword("end");
    }

    void event(Span s)
    {
        Event e;
        e.span = s;
        e.name = name();
        for (const auto& other : m_.events)
            if (other.name == e.name)
                throw ParseError("duplicate event '" + e.name + "'", s);
        std::set<std::string> saved = scope_;
        if (at_keyword("any")) {
            p_.next();
            do {
                Decl d = decl(false);
                scope_.insert(d.var);
                e.params.push_back(std::move(d));
            } while (p_.accept(","));
        }
        std::set<std::string> seen;
        if (at_keyword("where")) {
            p_.next();
            while (!at_keyword("then") && !at_block_end())
                e.guards.push_back(labeled(seen));
        }
        if (at_keyword("then")) {
            p_.next();
            while (!at_block_end())
                e.actions.push_back(action(seen));
        }
        keyword("end");
        scope_ = std::move(saved);
        m_.events.push_back(std::move(e));
    }

    void annotate()
    {
        std::string id = name();
        while (p_.accept("/"))
            id += "/" + name();
        PoAnnotation& a = m_.annotations[id];
        bool any = false;
        while (p_.peek().kind == Tok::Ident && !kKeywords.count(p_.peek().text)) {
            Span s = p_.peek().span;
            std::string item = p_.expect_ident();
            if (item == "closed_domain") {
                a.closed_domain = true;
            } else if (item == "drop") {
                p_.expect("(");
                do
                    a.drop.push_back(name());
                while (p_.accept(","));
                p_.expect(")");
            } else {
                throw ParseError("unknown annotation '" + item + "'", s);
            }
            any = true;
        }
        if (!any)
            p_.fail("expected closed_domain or drop(...)");
    }
};

void print_decl(std::ostream& os, const Decl& d)
{
    os << d.source;
    if (d.type)
        os << " : " << to_string(*d.type);
}

void print_action(std::ostream& os, const Action& a)
{
    os << a.label << ": " << a.target;
    if (a.index)
        os << "(" << to_string(*a.index) << ")";
    os << " := " << to_string(a.value) << "\n";
}

}  // namespace

Machine parse_machine(std::string_view src) { return MachineParser(src).run(); }

Machine load_machine(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_machine(ss.str());
}

std::string to_string(const Machine& m)
{
    std::ostringstream os;
    os << "machine " << m.name << "\n";
    if (!m.type_defs.empty() || !m.constants.empty() || !m.context.empty()) {
        os << "\ncontext";
        if (!m.context.empty())
            os << " " << m.context;
        os << "\n";
        for (const auto& [n, t] : m.type_defs)
            os << "  type " << n << " = " << to_string(t) << "\n";
        for (const auto& c : m.constants) {
            os << (c.is_set ? "  set " : "  constant ");
            print_decl(os, c.decl);
            os << "\n";
        }
        os << "end\n";
    }
    if (!m.variables.empty()) {
        os << "\nvariables\n";
        for (const auto& v : m.variables) {
            os << "  ";
            print_decl(os, v);
            os << "\n";
        }
        os << "end\n";
    }
    if (!m.invariants.empty()) {
        os << "\ninvariants\n";
        for (const auto& i : m.invariants)
            os << "  " << i.label << ": " << to_string(i.formula) << "\n";
        os << "end\n";
    }
    if (!m.init.empty()) {
        os << "\ninit\n";
        for (const auto& a : m.init) {
            os << "  ";
            print_action(os, a);
        }
        os << "end\n";
    }
    for (const auto& e : m.events) {
        os << "\nevent " << e.name << "\n";
        if (!e.params.empty()) {
            os << "  any ";
            for (std::size_t i = 0; i < e.params.size(); ++i) {
                if (i)
                    os << ", ";
                print_decl(os, e.params[i]);
            }
            os << "\n";
        }
        if (!e.guards.empty()) {
            os << "  where\n";
            for (const auto& g : e.guards)
                os << "    " << g.label << ": " << to_string(g.formula) << "\n";
        }
        if (!e.actions.empty()) {
            os << "  then\n";
            for (const auto& a : e.actions) {
                os << "    ";
                print_action(os, a);
            }
        }
        os << "end\n";
    }
    if (!m.annotations.empty()) {
        os << "\n";
        for (const auto& [id, a] : m.annotations) {
            os << "annotate " << id;
            if (a.closed_domain)
                os << " closed_domain";
            if (!a.drop.empty()) {
                os << " drop(";
                for (std::size_t i = 0; i < a.drop.size(); ++i)
                    os << (i ? ", " : "") << a.drop[i];
                os << ")";
            }
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace setsolve
