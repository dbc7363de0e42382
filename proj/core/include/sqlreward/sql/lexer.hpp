#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sqlreward::sql {

enum class TokenKind {
  Identifier,        // bare word; may be a keyword, see `upper`
  QuotedIdentifier,  // "x", `x`, [x]
  String,            // 'text' (value holds the unescaped text)
  Number,
  Blob,              // X'0A1B'
  Parameter,         // ?, ?1, :name, @name, $name
  Symbol,            // operators and punctuation
  Unknown,           // a character SQLite does not accept
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;   // identifier/quoted name, literal body, or symbol spelling
  std::string upper;  // upper-cased `text` for Identifier tokens
  std::size_t offset = 0;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
  bool is_word(std::string_view upper_word) const {
    return kind == TokenKind::Identifier && upper == upper_word;
  }
};

/// Tokenizes SQLite SQL. Comments are dropped. Throws ParseError only for
/// unterminated literals/comments; unrecognized characters become Unknown
/// tokens so the parser can decide how to degrade.
std::vector<Token> tokenize(std::string_view sql);

}  // namespace sqlreward::sql
