#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sqlreward::sql {

struct Expr;
struct Select;
using ExprPtr = std::unique_ptr<Expr>;
using SelectPtr = std::unique_ptr<Select>;

enum class ExprKind {
  Column,     // [table.]name
  Literal,    // number / string / blob / NULL / TRUE / FALSE / CURRENT_*
  Parameter,  // ?, :name
  Star,       // * or table.*
  Unary,      // op operand  (-, +, ~, NOT)
  Binary,     // lhs op rhs  (comparison, arithmetic, AND/OR, ||, IS, IS NOT)
  Function,   // name(args) with optional DISTINCT / * / OVER
  Case,
  Cast,
  Between,    // args = {expr, low, high}; negated for NOT BETWEEN
  InList,     // args = {expr, items...}
  InSelect,   // args = {expr}; subquery
  InTable,    // args = {expr}; name = table
  Like,       // op in {LIKE, GLOB, REGEXP, MATCH}; args = {expr, pattern[, escape]}
  IsNull,     // args = {expr}; negated for NOT NULL / NOTNULL
  Exists,     // subquery; negated for NOT EXISTS
  Subquery,   // scalar (SELECT ...)
  Collate,    // args = {expr}; name = collation
  Row,        // (a, b, ...)
  Raw,        // unsupported construct kept as canonical token text
};

enum class LiteralKind { Integer, Real, String, Blob, Null, Boolean, Keyword };

struct OrderTerm {
  ExprPtr expr;
  bool descending = false;
  std::string nulls;  // "", "FIRST", "LAST"
};

struct WindowSpec {
  std::string base_name;  // OVER (w ...) or OVER w
  std::vector<ExprPtr> partition;
  std::vector<OrderTerm> order;
  std::string frame;  // canonical raw rendering, empty when absent
};

struct Expr {
  ExprKind kind = ExprKind::Raw;
  std::size_t offset = 0;

  std::string op;     // operator / function name (upper) / LIKE-family keyword
  std::string table;  // Column, Star qualifier
  std::string name;   // Column name, Collate / Cast type / InTable name
  std::string text;   // Literal body, Raw text
  LiteralKind literal = LiteralKind::Null;

  bool negated = false;
  bool distinct = false;  // Function(DISTINCT ...)
  bool star_arg = false;  // COUNT(*)

  std::vector<ExprPtr> args;
  SelectPtr subquery;

  // CASE
  ExprPtr case_operand;
  std::vector<std::pair<ExprPtr, ExprPtr>> whens;
  ExprPtr case_else;

  // Function extras
  ExprPtr filter;
  std::unique_ptr<WindowSpec> over;

  Expr();
  ~Expr();
  Expr(Expr&&) noexcept;
  Expr& operator=(Expr&&) noexcept;
};

struct FromClause;

enum class SourceKind { Table, Subquery, TableFunction, Nested };

struct TableSource {
  SourceKind kind = SourceKind::Table;
  std::string schema;
  std::string name;
  std::string alias;
  SelectPtr subquery;
  std::vector<ExprPtr> func_args;
  std::unique_ptr<FromClause> nested;
  std::size_t offset = 0;

  TableSource();
  ~TableSource();
  TableSource(TableSource&&) noexcept;
  TableSource& operator=(TableSource&&) noexcept;
};

struct JoinClause {
  /// "COMMA", "INNER", "LEFT", "RIGHT", "FULL", "CROSS".  Bare JOIN is INNER
  /// and LEFT OUTER is LEFT.
  std::string type = "INNER";
  bool natural = false;
  TableSource source;
  ExprPtr on;
  std::vector<std::string> using_columns;
};

struct FromClause {
  TableSource first;
  std::vector<JoinClause> joins;
};

struct ResultColumn {
  ExprPtr expr;
  std::string alias;
};

struct SelectCore {
  bool distinct = false;
  std::vector<ResultColumn> columns;
  std::optional<FromClause> from;
  ExprPtr where;
  std::vector<ExprPtr> group_by;
  ExprPtr having;
  std::vector<std::pair<std::string, WindowSpec>> windows;
  bool is_values = false;
  std::vector<std::vector<ExprPtr>> values;
};

struct CompoundTerm {
  std::string op;  // UNION, UNION ALL, INTERSECT, EXCEPT
  SelectCore core;
};

struct Cte {
  std::string name;
  std::vector<std::string> columns;
  SelectPtr select;
};

struct Select {
  bool recursive = false;
  std::vector<Cte> ctes;
  SelectCore first;
  std::vector<CompoundTerm> compounds;
  std::vector<OrderTerm> order_by;
  ExprPtr limit;
  ExprPtr offset;
};

/// Number of SELECT cores in the statement, including those nested in CTEs,
/// derived tables, and subquery expressions.
std::size_t count_select_cores(const Select& select);

}  // namespace sqlreward::sql
