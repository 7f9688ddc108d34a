#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "setsolve/formula.hpp"
#include "setsolve/parser.hpp"

namespace setsolve::detail {

enum class Tok : std::uint8_t {
    Ident,    // lowercase identifier or quoted atom
    Var,      // uppercase / underscore identifier
    Int,
    Str,
    Punct,    // ( ) { } [ ] , / & . : ; | and operator spellings
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    bool quoted = false;
    Span span;
};

/// Shared tokenizer for the .slog and .smch front ends. `%` starts a line
/// comment in both; `#` does too when `hash_comments` is set.
std::vector<Token> tokenize(std::string_view src, bool hash_comments);

}  // namespace setsolve::detail
