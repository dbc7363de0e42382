#include "sqlreward/sql/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "sqlreward/errors.hpp"
#include "sqlreward/sql/lexer.hpp"

namespace sqlreward::sql {

namespace {

// Words that can never be a bare column name or an implicit alias.
constexpr std::array<std::string_view, 46> kReserved = {
    "ALL",     "AND",     "AS",        "ASC",    "BETWEEN", "BY",      "CASE",   "CAST",
    "COLLATE", "CROSS",   "DESC",      "DISTINCT", "ELSE",  "END",     "ESCAPE", "EXCEPT",
    "EXISTS",  "FROM",    "FULL",      "GLOB",   "GROUP",   "HAVING",  "IN",     "INNER",
    "INTERSECT", "INTO",  "IS",        "ISNULL", "JOIN",    "LEFT",    "LIKE",   "LIMIT",
    "NATURAL", "NOT",     "NOTNULL",   "NULL",   "OFFSET",  "ON",      "OR",     "ORDER",
    "OUTER",   "RIGHT",   "SELECT",    "THEN",   "UNION",   "USING",
};

constexpr std::array<std::string_view, 5> kReservedTail = {"VALUES", "WHEN", "WHERE", "WINDOW", "WITH"};

bool is_reserved(const Token& t) {
  if (t.kind != TokenKind::Identifier) return false;
  return std::find(kReserved.begin(), kReserved.end(), t.upper) != kReserved.end() ||
         std::find(kReservedTail.begin(), kReservedTail.end(), t.upper) != kReservedTail.end();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string quote_string(std::string_view body) {
  std::string out = "'";
  for (char c : body) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  out.push_back('\'');
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SelectPtr parse_statement() {
    if (peek().kind == TokenKind::End) throw ParseError(0, "empty statement");
    if (!(peek().is_word("SELECT") || peek().is_word("WITH") || peek().is_word("VALUES")))
      fail("expected SELECT, WITH or VALUES");
    auto select = parse_select();
    if (peek().is_symbol(";")) advance();
    if (peek().kind != TokenKind::End) {
      if (pos_ > 0 && toks_[pos_ - 1].is_symbol(";")) fail("multiple statements are not allowed");
      fail("unexpected token '" + peek().text + "'");
    }
    return select;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;

  // Bounds recursion so hostile nesting fails as a ParseError, not a stack overflow.
  static constexpr std::size_t kMaxDepth = 1000;
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        --p.depth_;
        p.fail("nesting too deep");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  const Token& peek(std::size_t ahead = 0) const {
    const auto idx = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[idx];
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(peek().offset, message); }

  bool accept_word(std::string_view w) {
    if (peek().is_word(w)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_symbol(std::string_view s) {
    if (peek().is_symbol(s)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected " + std::string(w));
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("expected '" + std::string(s) + "'");
  }

  bool starts_select() const {
    return peek().is_word("SELECT") || peek().is_word("WITH") || peek().is_word("VALUES");
  }

  /// Identifier or quoted identifier used as a name.
  std::string parse_name(const char* what) {
    const Token& t = peek();
    if (t.kind == TokenKind::QuotedIdentifier || (t.kind == TokenKind::Identifier && !is_reserved(t))) {
      advance();
      return t.text;
    }
    fail(std::string("expected ") + what);
  }

  bool at_alias_candidate() const {
    const Token& t = peek();
    return t.kind == TokenKind::QuotedIdentifier || (t.kind == TokenKind::Identifier && !is_reserved(t)) ||
           t.kind == TokenKind::String;
  }

  // ---------------------------------------------------------------------
  SelectPtr parse_select() {
    DepthGuard guard(*this);
    auto select = std::make_unique<Select>();
    if (accept_word("WITH")) {
      select->recursive = accept_word("RECURSIVE");
      do {
        Cte cte;
        cte.name = parse_name("CTE name");
        if (accept_symbol("(")) {
          do cte.columns.push_back(parse_name("column name"));
          while (accept_symbol(","));
          expect_symbol(")");
        }
        expect_word("AS");
        if (accept_word("NOT")) expect_word("MATERIALIZED");
        else accept_word("MATERIALIZED");
        expect_symbol("(");
        cte.select = parse_select();
        expect_symbol(")");
        select->ctes.push_back(std::move(cte));
      } while (accept_symbol(","));
    }

    select->first = parse_core();
    while (true) {
      std::string op;
      if (accept_word("UNION")) op = accept_word("ALL") ? "UNION ALL" : "UNION";
      else if (accept_word("INTERSECT")) op = "INTERSECT";
      else if (accept_word("EXCEPT")) op = "EXCEPT";
      else break;
      CompoundTerm term;
      term.op = std::move(op);
      term.core = parse_core();
      select->compounds.push_back(std::move(term));
    }

    if (accept_word("ORDER")) {
      expect_word("BY");
      select->order_by = parse_order_terms();
    }
    if (accept_word("LIMIT")) {
      auto first = parse_expr();
      if (accept_word("OFFSET")) {
        select->limit = std::move(first);
        select->offset = parse_expr();
      } else if (accept_symbol(",")) {
        select->offset = std::move(first);
        select->limit = parse_expr();
      } else {
        select->limit = std::move(first);
      }
    }
    return select;
  }

  std::vector<OrderTerm> parse_order_terms() {
    std::vector<OrderTerm> terms;
    do {
      OrderTerm term;
      term.expr = parse_expr();
      if (accept_word("DESC")) term.descending = true;
      else accept_word("ASC");
      if (accept_word("NULLS")) {
        if (accept_word("FIRST")) term.nulls = "FIRST";
        else {
          expect_word("LAST");
          term.nulls = "LAST";
        }
      }
      terms.push_back(std::move(term));
    } while (accept_symbol(","));
    return terms;
  }

  SelectCore parse_core() {
    SelectCore core;
    if (accept_word("VALUES")) {
      core.is_values = true;
      do {
        expect_symbol("(");
        std::vector<ExprPtr> row;
        do row.push_back(parse_expr());
        while (accept_symbol(","));
        expect_symbol(")");
        core.values.push_back(std::move(row));
      } while (accept_symbol(","));
      return core;
    }

    expect_word("SELECT");
    if (accept_word("DISTINCT")) core.distinct = true;
    else accept_word("ALL");

    do core.columns.push_back(parse_result_column());
    while (accept_symbol(","));

    if (accept_word("FROM")) core.from = parse_from();
    if (accept_word("WHERE")) core.where = parse_expr();
    if (accept_word("GROUP")) {
      expect_word("BY");
      do core.group_by.push_back(parse_expr());
      while (accept_symbol(","));
    }
    if (accept_word("HAVING")) core.having = parse_expr();
    if (accept_word("WINDOW")) {
      do {
        std::string name = parse_name("window name");
        expect_word("AS");
        core.windows.emplace_back(std::move(name), parse_window_body());
      } while (accept_symbol(","));
    }
    return core;
  }

  ResultColumn parse_result_column() {
    ResultColumn col;
    if (peek().is_symbol("*")) {
      auto star = std::make_unique<Expr>();
      star->kind = ExprKind::Star;
      star->offset = advance().offset;
      col.expr = std::move(star);
      return col;
    }
    if (peek().kind == TokenKind::End || peek().is_word("FROM")) fail("expected result column");
    col.expr = parse_expr();
    if (accept_word("AS")) {
      if (!at_alias_candidate()) fail("expected column alias");
      col.alias = advance().text;
    } else if (at_alias_candidate() && peek().kind != TokenKind::String) {
      col.alias = advance().text;
    }
    return col;
  }

  // ---------------------------------------------------------------------
  FromClause parse_from() {
    FromClause from;
    from.first = parse_source();
    while (true) {
      JoinClause join;
      if (accept_symbol(",")) {
        join.type = "COMMA";
      } else {
        const std::size_t save = pos_;
        join.natural = accept_word("NATURAL");
        if (accept_word("LEFT")) {
          accept_word("OUTER");
          join.type = "LEFT";
        } else if (accept_word("RIGHT")) {
          accept_word("OUTER");
          join.type = "RIGHT";
        } else if (accept_word("FULL")) {
          accept_word("OUTER");
          join.type = "FULL";
        } else if (accept_word("INNER")) {
          join.type = "INNER";
        } else if (accept_word("CROSS")) {
          join.type = "CROSS";
        }
        if (!accept_word("JOIN")) {
          if (pos_ != save) fail("expected JOIN");
          break;
        }
      }
      join.source = parse_source();
      if (accept_word("ON")) {
        join.on = parse_expr();
      } else if (accept_word("USING")) {
        expect_symbol("(");
        do join.using_columns.push_back(parse_name("column name"));
        while (accept_symbol(","));
        expect_symbol(")");
      }
      from.joins.push_back(std::move(join));
    }
    return from;
  }

  TableSource parse_source() {
    TableSource src;
    src.offset = peek().offset;
    if (accept_symbol("(")) {
      if (starts_select()) {
        src.kind = SourceKind::Subquery;
        src.subquery = parse_select();
      } else {
        src.kind = SourceKind::Nested;
        src.nested = std::make_unique<FromClause>(parse_from());
      }
      expect_symbol(")");
    } else {
      std::string name = parse_name("table name");
      if (accept_symbol(".")) {
        src.schema = std::move(name);
        name = parse_name("table name");
      }
      src.name = std::move(name);
      if (accept_symbol("(")) {
        src.kind = SourceKind::TableFunction;
        if (!peek().is_symbol(")")) {
          do src.func_args.push_back(parse_expr());
          while (accept_symbol(","));
        }
        expect_symbol(")");
      }
    }
    if (accept_word("AS")) {
      src.alias = parse_name("table alias");
    } else if (peek().kind == TokenKind::QuotedIdentifier ||
               (peek().kind == TokenKind::Identifier && !is_reserved(peek()) && !peek().is_word("INDEXED"))) {
      src.alias = advance().text;
    }
    if (accept_word("INDEXED")) {
      expect_word("BY");
      parse_name("index name");
    } else if (peek().is_word("NOT") && peek(1).is_word("INDEXED")) {
      advance();
      advance();
    }
    return src;
  }

  // ---------------------------------------------------------------------
  WindowSpec parse_window_body() {
    WindowSpec spec;
    expect_symbol("(");
    if ((peek().kind == TokenKind::Identifier || peek().kind == TokenKind::QuotedIdentifier) &&
        !peek().is_word("PARTITION") && !peek().is_word("ORDER") && !peek().is_word("ROWS") &&
        !peek().is_word("RANGE") && !peek().is_word("GROUPS")) {
      spec.base_name = advance().text;
    }
    if (accept_word("PARTITION")) {
      expect_word("BY");
      do spec.partition.push_back(parse_expr());
      while (accept_symbol(","));
    }
    if (accept_word("ORDER")) {
      expect_word("BY");
      spec.order = parse_order_terms();
    }
    if (peek().is_word("ROWS") || peek().is_word("RANGE") || peek().is_word("GROUPS")) {
      std::string frame;
      int depth = 0;
      while (peek().kind != TokenKind::End && !(depth == 0 && peek().is_symbol(")"))) {
        if (peek().is_symbol("(")) ++depth;
        if (peek().is_symbol(")")) --depth;
        if (!frame.empty()) frame.push_back(' ');
        frame += token_text(advance());
      }
      spec.frame = std::move(frame);
    }
    expect_symbol(")");
    return spec;
  }

  static std::string token_text(const Token& t) {
    switch (t.kind) {
      case TokenKind::Identifier: return t.upper;
      case TokenKind::QuotedIdentifier: return lower(t.text);
      case TokenKind::String: return quote_string(t.text);
      case TokenKind::Blob: return "X'" + t.text + "'";
      default: return t.text;
    }
  }

  // ---------------------------------------------------------------------
  static ExprPtr make(ExprKind kind, std::size_t offset) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->offset = offset;
    return e;
  }

  static ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs) {
    auto e = make(ExprKind::Binary, lhs->offset);
    e->op = std::move(op);
    e->args.push_back(std::move(lhs));
    e->args.push_back(std::move(rhs));
    return e;
  }

  ExprPtr parse_expr() {
    DepthGuard guard(*this);
    return parse_or();
  }

  ExprPtr parse_or() {
    auto lhs = parse_and();
    while (accept_word("OR")) lhs = make_binary("OR", std::move(lhs), parse_and());
    return lhs;
  }

  ExprPtr parse_and() {
    auto lhs = parse_not();
    while (accept_word("AND")) lhs = make_binary("AND", std::move(lhs), parse_not());
    return lhs;
  }

  ExprPtr parse_not() {
    DepthGuard guard(*this);
    if (peek().is_word("NOT")) {
      const auto offset = advance().offset;
      if (peek().is_word("EXISTS")) {
        auto e = parse_not();
        if (e->kind == ExprKind::Exists) {
          e->negated = !e->negated;
          return e;
        }
        auto u = make(ExprKind::Unary, offset);
        u->op = "NOT";
        u->args.push_back(std::move(e));
        return u;
      }
      auto u = make(ExprKind::Unary, offset);
      u->op = "NOT";
      u->args.push_back(parse_not());
      return u;
    }
    return parse_equality();
  }

  ExprPtr parse_equality() {
    auto lhs = parse_comparison();
    while (true) {
      const Token& t = peek();
      if (t.is_symbol("=") || t.is_symbol("==") || t.is_symbol("!=") || t.is_symbol("<>")) {
        std::string op = advance().text;
        if (op == "==") op = "=";
        if (op == "<>") op = "!=";
        lhs = make_binary(std::move(op), std::move(lhs), parse_comparison());
        continue;
      }
      if (t.is_word("IS")) {
        advance();
        bool negated = accept_word("NOT");
        if (accept_word("DISTINCT")) {
          expect_word("FROM");
          negated = !negated;
        }
        if (peek().is_word("NULL")) {
          advance();
          auto e = make(ExprKind::IsNull, lhs->offset);
          e->negated = negated;
          e->args.push_back(std::move(lhs));
          lhs = std::move(e);
          continue;
        }
        lhs = make_binary(negated ? "IS NOT" : "IS", std::move(lhs), parse_comparison());
        continue;
      }
      if (t.is_word("ISNULL") || t.is_word("NOTNULL")) {
        const bool negated = advance().upper == "NOTNULL";
        auto e = make(ExprKind::IsNull, lhs->offset);
        e->negated = negated;
        e->args.push_back(std::move(lhs));
        lhs = std::move(e);
        continue;
      }
      bool negated = false;
      if (t.is_word("NOT") && (peek(1).is_word("IN") || peek(1).is_word("LIKE") || peek(1).is_word("GLOB") ||
                               peek(1).is_word("REGEXP") || peek(1).is_word("MATCH") ||
                               peek(1).is_word("BETWEEN") || peek(1).is_word("NULL"))) {
        advance();
        negated = true;
      }
      const Token& op = peek();
      if (op.is_word("NULL") && negated) {
        advance();
        auto e = make(ExprKind::IsNull, lhs->offset);
        e->negated = true;
        e->args.push_back(std::move(lhs));
        lhs = std::move(e);
        continue;
      }
      if (op.is_word("IN")) {
        advance();
        lhs = parse_in(std::move(lhs), negated);
        continue;
      }
      if (op.is_word("LIKE") || op.is_word("GLOB") || op.is_word("REGEXP") || op.is_word("MATCH")) {
        auto e = make(ExprKind::Like, lhs->offset);
        e->op = advance().upper;
        e->negated = negated;
        e->args.push_back(std::move(lhs));
        e->args.push_back(parse_comparison());
        if (accept_word("ESCAPE")) e->args.push_back(parse_comparison());
        lhs = std::move(e);
        continue;
      }
      if (op.is_word("BETWEEN")) {
        advance();
        auto e = make(ExprKind::Between, lhs->offset);
        e->negated = negated;
        e->args.push_back(std::move(lhs));
        e->args.push_back(parse_comparison());
        expect_word("AND");
        e->args.push_back(parse_comparison());
        lhs = std::move(e);
        continue;
      }
      if (negated) fail("unexpected NOT");
      break;
    }
    return lhs;
  }

  ExprPtr parse_in(ExprPtr lhs, bool negated) {
    if (accept_symbol("(")) {
      if (starts_select()) {
        auto e = make(ExprKind::InSelect, lhs->offset);
        e->negated = negated;
        e->args.push_back(std::move(lhs));
        e->subquery = parse_select();
        expect_symbol(")");
        return e;
      }
      auto e = make(ExprKind::InList, lhs->offset);
      e->negated = negated;
      e->args.push_back(std::move(lhs));
      if (!peek().is_symbol(")")) {
        do e->args.push_back(parse_expr());
        while (accept_symbol(","));
      }
      expect_symbol(")");
      return e;
    }
    auto e = make(ExprKind::InTable, lhs->offset);
    e->negated = negated;
    e->args.push_back(std::move(lhs));
    e->name = parse_name("table name");
    if (accept_symbol(".")) e->name = parse_name("table name");
    return e;
  }

  ExprPtr parse_comparison() {
    auto lhs = parse_bitwise();
    while (peek().is_symbol("<") || peek().is_symbol("<=") || peek().is_symbol(">") || peek().is_symbol(">=")) {
      std::string op = advance().text;
      lhs = make_binary(std::move(op), std::move(lhs), parse_bitwise());
    }
    return lhs;
  }

  ExprPtr parse_bitwise() {
    auto lhs = parse_additive();
    while (peek().is_symbol("&") || peek().is_symbol("|") || peek().is_symbol("<<") || peek().is_symbol(">>")) {
      std::string op = advance().text;
      lhs = make_binary(std::move(op), std::move(lhs), parse_additive());
    }
    return lhs;
  }

  ExprPtr parse_additive() {
    auto lhs = parse_multiplicative();
    while (peek().is_symbol("+") || peek().is_symbol("-")) {
      std::string op = advance().text;
      lhs = make_binary(std::move(op), std::move(lhs), parse_multiplicative());
    }
    return lhs;
  }

  ExprPtr parse_multiplicative() {
    auto lhs = parse_concat();
    while (peek().is_symbol("*") || peek().is_symbol("/") || peek().is_symbol("%")) {
      std::string op = advance().text;
      lhs = make_binary(std::move(op), std::move(lhs), parse_concat());
    }
    return lhs;
  }

  ExprPtr parse_concat() {
    auto lhs = parse_unary();
    while (peek().is_symbol("||") || peek().is_symbol("->")) {
      std::string op = advance().text;
      if (op == "->" && peek().is_symbol(">")) {
        advance();
        op = "->>";
      }
      lhs = make_binary(std::move(op), std::move(lhs), parse_unary());
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    DepthGuard guard(*this);
    if (peek().is_symbol("-") || peek().is_symbol("+") || peek().is_symbol("~")) {
      const Token& t = advance();
      auto e = make(ExprKind::Unary, t.offset);
      e->op = t.text;
      e->args.push_back(parse_unary());
      return e;
    }
    const std::size_t start = pos_;
    auto e = parse_primary();
    while (true) {
      if (accept_word("COLLATE")) {
        auto c = make(ExprKind::Collate, e->offset);
        c->name = parse_name("collation name");
        c->args.push_back(std::move(e));
        e = std::move(c);
        continue;
      }
      if (is_foreign_token(peek())) return make_raw(start);
      break;
    }
    return e;
  }

  static bool is_foreign_token(const Token& t) {
    return t.kind == TokenKind::Unknown || t.is_symbol("::") || t.is_symbol("=>") || t.is_symbol("**");
  }

  bool at_raw_boundary(int depth) const {
    const Token& t = peek();
    if (t.kind == TokenKind::End || t.is_symbol(";")) return true;
    if (depth > 0) return false;
    if (t.is_symbol(",") || t.is_symbol(")")) return true;
    if (t.kind != TokenKind::Identifier) return false;
    static constexpr std::array<std::string_view, 17> kStops = {
        "FROM", "WHERE", "GROUP", "HAVING", "ORDER", "LIMIT", "UNION", "INTERSECT", "EXCEPT",
        "AND", "OR", "AS", "ON", "JOIN", "WINDOW", "THEN", "END"};
    return std::find(kStops.begin(), kStops.end(), t.upper) != kStops.end();
  }

  /// Rewinds to `start` and captures tokens up to the next clause boundary as
  /// one opaque expression.
  ExprPtr make_raw(std::size_t start) {
    pos_ = start;
    auto e = make(ExprKind::Raw, peek().offset);
    int depth = 0;
    std::string text;
    while (!at_raw_boundary(depth)) {
      if (peek().is_symbol("(")) ++depth;
      if (peek().is_symbol(")")) --depth;
      if (!text.empty()) text.push_back(' ');
      const Token& t = advance();
      text += t.kind == TokenKind::Identifier ? (is_reserved(t) ? t.upper : lower(t.text)) : token_text(t);
    }
    if (depth != 0) fail("unbalanced parentheses");
    if (text.empty()) fail("expected expression");
    e->text = std::move(text);
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: {
        advance();
        auto e = make(ExprKind::Literal, t.offset);
        const bool hex = t.text.size() > 1 && (t.text[1] == 'x' || t.text[1] == 'X');
        const bool real = !hex && t.text.find_first_of(".eE") != std::string::npos;
        e->literal = real ? LiteralKind::Real : LiteralKind::Integer;
        e->text = t.text;
        return e;
      }
      case TokenKind::String: {
        advance();
        auto e = make(ExprKind::Literal, t.offset);
        e->literal = LiteralKind::String;
        e->text = t.text;
        return e;
      }
      case TokenKind::Blob: {
        advance();
        auto e = make(ExprKind::Literal, t.offset);
        e->literal = LiteralKind::Blob;
        e->text = t.text;
        return e;
      }
      case TokenKind::Parameter: {
        advance();
        auto e = make(ExprKind::Parameter, t.offset);
        e->text = t.text;
        return e;
      }
      case TokenKind::Unknown:
        return make_raw(pos_);
      case TokenKind::End:
        fail("unexpected end of input");
      case TokenKind::Symbol:
        if (t.is_symbol("(")) return parse_paren();
        if (is_foreign_token(t)) return make_raw(pos_);
        fail("unexpected '" + t.text + "'");
      case TokenKind::QuotedIdentifier:
      case TokenKind::Identifier:
        return parse_word();
    }
    fail("unexpected token");
  }

  ExprPtr parse_paren() {
    const auto offset = advance().offset;
    if (starts_select()) {
      auto e = make(ExprKind::Subquery, offset);
      e->subquery = parse_select();
      expect_symbol(")");
      return e;
    }
    auto first = parse_expr();
    if (accept_symbol(",")) {
      auto row = make(ExprKind::Row, offset);
      row->args.push_back(std::move(first));
      do row->args.push_back(parse_expr());
      while (accept_symbol(","));
      expect_symbol(")");
      return row;
    }
    expect_symbol(")");
    return first;
  }

  ExprPtr parse_word() {
    const Token& t = peek();
    const bool quoted = t.kind == TokenKind::QuotedIdentifier;
    if (!quoted) {
      const auto& u = t.upper;
      if (u == "NULL" || u == "TRUE" || u == "FALSE" || u == "CURRENT_DATE" || u == "CURRENT_TIME" ||
          u == "CURRENT_TIMESTAMP") {
        advance();
        auto e = make(ExprKind::Literal, t.offset);
        e->literal = u == "NULL" ? LiteralKind::Null : (u == "TRUE" || u == "FALSE") ? LiteralKind::Boolean
                                                                                    : LiteralKind::Keyword;
        e->text = u;
        return e;
      }
      if ((u == "DATE" || u == "TIME" || u == "TIMESTAMP" || u == "DATETIME") &&
          peek(1).kind == TokenKind::String) {
        // typed literal, e.g. DATE '2024-01-01'
        advance();
        const Token& body = advance();
        auto e = make(ExprKind::Literal, t.offset);
        e->literal = LiteralKind::String;
        e->op = u;
        e->text = body.text;
        return e;
      }
      if (u == "CASE") return parse_case();
      if (u == "CAST" && peek(1).is_symbol("(")) return parse_cast();
      if (u == "EXISTS") {
        advance();
        auto e = make(ExprKind::Exists, t.offset);
        expect_symbol("(");
        if (!starts_select()) fail("expected subquery after EXISTS");
        e->subquery = parse_select();
        expect_symbol(")");
        return e;
      }
      if (peek(1).is_symbol("(") && !is_reserved(t)) return parse_function();
      if (is_reserved(t)) fail("unexpected keyword " + u);
    }

    advance();
    std::string first = t.text;
    if (accept_symbol(".")) {
      if (accept_symbol("*")) {
        auto e = make(ExprKind::Star, t.offset);
        e->table = std::move(first);
        return e;
      }
      std::string second = parse_name("column name");
      if (accept_symbol(".")) {
        // schema.table.column
        std::string third = parse_name("column name");
        auto e = make(ExprKind::Column, t.offset);
        e->table = std::move(second);
        e->name = std::move(third);
        return e;
      }
      auto e = make(ExprKind::Column, t.offset);
      e->table = std::move(first);
      e->name = std::move(second);
      return e;
    }
    auto e = make(ExprKind::Column, t.offset);
    e->name = std::move(first);
    return e;
  }

  ExprPtr parse_function() {
    const Token& name = advance();
    auto e = make(ExprKind::Function, name.offset);
    e->op = name.upper;
    expect_symbol("(");
    if (accept_symbol("*")) {
      e->star_arg = true;
    } else if (!peek().is_symbol(")")) {
      if (accept_word("DISTINCT")) e->distinct = true;
      else accept_word("ALL");
      do e->args.push_back(parse_expr());
      while (accept_symbol(","));
      if (accept_word("ORDER")) {
        // aggregate ORDER BY (SQLite 3.44+); folded into the argument list
        expect_word("BY");
        for (auto& term : parse_order_terms()) e->args.push_back(std::move(term.expr));
      }
    }
    expect_symbol(")");
    if (peek().is_word("FILTER") && peek(1).is_symbol("(")) {
      advance();
      advance();
      expect_word("WHERE");
      e->filter = parse_expr();
      expect_symbol(")");
    }
    if (accept_word("OVER")) {
      if (peek().is_symbol("(")) {
        e->over = std::make_unique<WindowSpec>(parse_window_body());
      } else {
        e->over = std::make_unique<WindowSpec>();
        e->over->base_name = parse_name("window name");
      }
    }
    return e;
  }

  ExprPtr parse_case() {
    auto e = make(ExprKind::Case, advance().offset);
    if (!peek().is_word("WHEN")) e->case_operand = parse_expr();
    if (!peek().is_word("WHEN")) fail("expected WHEN");
    while (accept_word("WHEN")) {
      auto cond = parse_expr();
      expect_word("THEN");
      e->whens.emplace_back(std::move(cond), parse_expr());
    }
    if (accept_word("ELSE")) e->case_else = parse_expr();
    expect_word("END");
    return e;
  }

  ExprPtr parse_cast() {
    auto e = make(ExprKind::Cast, advance().offset);
    expect_symbol("(");
    e->args.push_back(parse_expr());
    expect_word("AS");
    std::string type;
    int depth = 0;
    while (peek().kind != TokenKind::End && !(depth == 0 && peek().is_symbol(")"))) {
      if (peek().is_symbol("(")) ++depth;
      if (peek().is_symbol(")")) --depth;
      const Token& t = advance();
      if (!type.empty() && !(t.is_symbol("(") || t.is_symbol(")") || t.is_symbol(",")) &&
          type.back() != '(')
        type.push_back(' ');
      type += t.kind == TokenKind::Identifier ? t.upper : t.text;
    }
    if (type.empty()) fail("expected type name");
    e->name = std::move(type);
    expect_symbol(")");
    return e;
  }
};

}  // namespace

SelectPtr parse_sql(std::string_view text) {
  Parser parser(tokenize(text));
  return parser.parse_statement();
}

}  // namespace sqlreward::sql
