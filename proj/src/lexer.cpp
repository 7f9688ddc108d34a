#include "lexer.hpp"

#include <cctype>

namespace setsolve::detail {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view src, bool hash_comments)
{
    static const char* const kOps[] = {":-", "?-", ":=", "=<", ">=", "=/=", "\\=", "!="};
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%' || (hash_comments && c == '#')) {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
                advance(1);
            if (i + 1 >= src.size())
                throw ParseError("unterminated block comment", {line, col});
            advance(2);
            continue;
        }
        Token t;
        t.span = {line, col};
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            try {
                t.value = std::stoll(t.text);
            } catch (const std::out_of_range&) {
                throw ParseError("integer literal out of range: " + t.text, t.span);
            }
            advance(j - i);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j]))
                ++j;
            t.text = std::string(src.substr(i, j - i));
            t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
            advance(j - i);
        } else if (c == '\'' || c == '"') {
            std::size_t j = i + 1;
            std::string text;
            while (j < src.size() && src[j] != c) {
                if (src[j] == '\\' && j + 1 < src.size())
                    ++j;
                text += src[j++];
            }
            if (j >= src.size())
                throw ParseError("unterminated quoted text", t.span);
            t.kind = c == '"' ? Tok::Str : Tok::Ident;
            t.quoted = c == '\'';
            t.text = std::move(text);
            advance(j + 1 - i);
        } else {
            t.kind = Tok::Punct;
            for (const char* op : kOps) {
                std::string_view sv(op);
                if (src.substr(i, sv.size()) == sv) {
                    t.text = std::string(sv);
                    break;
                }
            }
            if (t.text.empty()) {
                if (std::string_view("(){}[],/&.:;|=<>+-*?").find(c) == std::string_view::npos)
                    throw ParseError(std::string("unexpected character '") + c + "'", t.span);
                t.text = std::string(1, c);
            }
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.span = {line, col};
    out.push_back(end);
    return out;
}

}  // namespace setsolve::detail
