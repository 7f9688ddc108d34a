#include "setsolve/machine.hpp"
#include "setsolve/parser.hpp"

#include <fstream>
#include <sstream>

#include "formula_parser.hpp"

namespace setsolve {

using detail::FormulaParser;
using detail::Tok;

namespace {

FormulaParser make_parser(std::string_view src) { return FormulaParser(detail::tokenize(src, false)); }

void expect_end(FormulaParser& p)
{
    p.accept(".");
    if (!p.at_end())
        p.fail("unexpected trailing input");
}

void print_type(std::ostream& os, const TypeExpr& t)
{
    switch (t.kind) {
    case TypeKind::Int:
        os << "int";
        break;
    case TypeKind::Str:
        os << "str";
        break;
    case TypeKind::Basic:
    case TypeKind::Named:
        os << t.name;
        break;
    case TypeKind::Var:
        os << '?' << t.name;
        break;
    case TypeKind::Enum:
        os << "etype([";
        for (std::size_t i = 0; i < t.members.size(); ++i)
            os << (i ? "," : "") << t.members[i];
        os << "])";
        break;
    case TypeKind::Product:
        os << '[';
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i)
                os << ',';
            print_type(os, t.args[i]);
        }
        os << ']';
        break;
    case TypeKind::SetOf:
        os << "stype(";
        print_type(os, t.args[0]);
        os << ')';
        break;
    }
}

void parse_directive(FormulaParser& p, Program& prog)
{
    Span s = p.peek().span;
    std::string name = p.expect_ident();
    p.expect("(");
    if (name == "dec_p_type") {
        std::string pred = p.expect_ident();
        std::vector<TypeExpr> types;
        if (p.accept("(")) {
            types.push_back(p.type());
            while (p.accept(","))
                types.push_back(p.type());
            p.expect(")");
        }
        prog.pred_types[pred] = std::move(types);
    } else if (name == "def_type") {
        std::string tname = p.expect_ident();
        p.expect(",");
        prog.type_defs[tname] = p.type();
    } else {
        throw ParseError("unknown directive '" + name + "'", s);
    }
    p.expect(")");
    p.expect(".");
}

}  // namespace

Term parse_term(std::string_view src)
{
    FormulaParser p = make_parser(src);
    Term t = p.term();
    expect_end(p);
    return t;
}

Formula parse_formula(std::string_view src)
{
    FormulaParser p = make_parser(src);
    Formula f = p.formula();
    expect_end(p);
    return f;
}

Formula parse_machine_formula(std::string_view src)
{
    FormulaParser p = make_parser(src);
    p.machine_mode = true;
    Formula f = p.formula();
    expect_end(p);
    return f;
}

TypeExpr parse_type(std::string_view src)
{
    FormulaParser p = make_parser(src);
    TypeExpr t = p.type();
    expect_end(p);
    return t;
}

std::string to_string(const TypeExpr& t)
{
    std::ostringstream os;
    print_type(os, t);
    return os.str();
}

std::vector<const Clause*> Program::clauses_of(const std::string& name, std::size_t arity) const
{
    std::vector<const Clause*> out;
    for (const Clause& c : clauses)
        if (c.name == name && c.params.size() == arity)
            out.push_back(&c);
    return out;
}

void Program::merge(const Program& other)
{
    clauses.insert(clauses.end(), other.clauses.begin(), other.clauses.end());
    queries.insert(queries.end(), other.queries.begin(), other.queries.end());
    for (const auto& kv : other.type_defs)
        type_defs[kv.first] = kv.second;
    for (const auto& kv : other.pred_types)
        pred_types[kv.first] = kv.second;
}

Program parse_program(std::string_view src)
{
    FormulaParser p = make_parser(src);
    Program prog;
    while (!p.at_end()) {
        Span s = p.peek().span;
        if (p.accept(":-")) {
            parse_directive(p, prog);
            continue;
        }
        if (p.accept("?-")) {
            Formula f = p.formula();
            p.expect(".");
            prog.queries.push_back({f, s});
            continue;
        }
        if (p.peek().kind != Tok::Ident)
            p.fail("expected a clause head");
        Clause c;
        c.span = s;
        c.name = p.next().text;
        if (detail::is_builtin_constraint(c.name) || c.name == "foreach" || c.name == "exists" ||
            c.name == "neg" || c.name == kDecPredicate)
            throw ParseError("cannot redefine built-in '" + c.name + "'", s);
        if (p.accept("(")) {
            c.params.push_back(p.term());
            while (p.accept(","))
                c.params.push_back(p.term());
            p.expect(")");
        }
        c.body = Formula::truth();
        if (p.accept(":-"))
            c.body = p.formula();
        p.expect(".");
        prog.clauses.push_back(std::move(c));
    }
    return prog;
}

Program load_program(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str());
}

}  // namespace setsolve
