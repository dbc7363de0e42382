#include "sqlreward/sql/lexer.hpp"

#include <array>
#include <cctype>

#include "sqlreward/errors.hpp"

namespace sqlreward::sql {

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

constexpr std::array<std::string_view, 12> kTwoCharSymbols = {
    "<=", ">=", "<>", "!=", "==", "||", "<<", ">>", "->", "::", "=>", "**"};

}  // namespace

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = sql.size();

  auto push = [&](TokenKind kind, std::string text, std::size_t offset) {
    Token t;
    t.kind = kind;
    t.offset = offset;
    if (kind == TokenKind::Identifier) t.upper = to_upper(text);
    t.text = std::move(text);
    tokens.push_back(std::move(t));
  };

  while (i < n) {
    const auto c = static_cast<unsigned char>(sql[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
      const auto end = sql.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(i, "unterminated comment");
      i = end + 2;
      continue;
    }

    const std::size_t start = i;

    // Blob literal: X'..'
    if ((c == 'x' || c == 'X') && i + 1 < n && sql[i + 1] == '\'') {
      const auto end = sql.find('\'', i + 2);
      if (end == std::string_view::npos) throw ParseError(i, "unterminated blob literal");
      push(TokenKind::Blob, to_upper(sql.substr(i + 2, end - i - 2)), start);
      i = end + 1;
      continue;
    }

    if (is_ident_start(c)) {
      while (i < n && is_ident_char(static_cast<unsigned char>(sql[i]))) ++i;
      push(TokenKind::Identifier, std::string(sql.substr(start, i - start)), start);
      continue;
    }

    if (std::isdigit(c) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      if (c == '0' && i + 1 < n && (sql[i + 1] == 'x' || sql[i + 1] == 'X')) {
        i += 2;
        while (i < n && std::isxdigit(static_cast<unsigned char>(sql[i]))) ++i;
      } else {
        while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
        if (i < n && sql[i] == '.') {
          ++i;
          while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
        }
        if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
          std::size_t j = i + 1;
          if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
          if (j < n && std::isdigit(static_cast<unsigned char>(sql[j]))) {
            i = j;
            while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
          }
        }
      }
      push(TokenKind::Number, std::string(sql.substr(start, i - start)), start);
      continue;
    }

    if (c == '\'') {
      std::string body;
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == '\'') {
          if (i + 1 < n && sql[i + 1] == '\'') {
            body.push_back('\'');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        body.push_back(sql[i++]);
      }
      if (!closed) throw ParseError(start, "unterminated string literal");
      push(TokenKind::String, std::move(body), start);
      continue;
    }

    if (c == '"' || c == '`' || c == '[') {
      const char close = c == '[' ? ']' : static_cast<char>(c);
      std::string body;
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == close) {
          if (close != ']' && i + 1 < n && sql[i + 1] == close) {
            body.push_back(close);
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        body.push_back(sql[i++]);
      }
      if (!closed) throw ParseError(start, "unterminated quoted identifier");
      push(TokenKind::QuotedIdentifier, std::move(body), start);
      continue;
    }

    if (c == '?' || c == ':' || c == '@' || c == '$') {
      if (c == ':' && i + 1 < n && sql[i + 1] == ':') {
        push(TokenKind::Symbol, "::", start);
        i += 2;
        continue;
      }
      std::size_t j = i + 1;
      while (j < n && is_ident_char(static_cast<unsigned char>(sql[j]))) ++j;
      if (c == '?' || j > i + 1) {
        push(TokenKind::Parameter, std::string(sql.substr(i, j - i)), start);
        i = j;
        continue;
      }
      push(TokenKind::Unknown, std::string(1, static_cast<char>(c)), start);
      ++i;
      continue;
    }

    if (i + 1 < n) {
      const auto two = sql.substr(i, 2);
      bool matched = false;
      for (auto sym : kTwoCharSymbols) {
        if (two == sym) {
          push(TokenKind::Symbol, std::string(sym), start);
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }

    constexpr std::string_view kSingle = "(),.;=<>+-*/%&|~!";
    if (kSingle.find(static_cast<char>(c)) != std::string_view::npos) {
      push(TokenKind::Symbol, std::string(1, static_cast<char>(c)), start);
      ++i;
      continue;
    }

    push(TokenKind::Unknown, std::string(1, static_cast<char>(c)), start);
    ++i;
  }

  Token end;
  end.kind = TokenKind::End;
  end.offset = n;
  tokens.push_back(std::move(end));
  return tokens;
}

}  // namespace sqlreward::sql
