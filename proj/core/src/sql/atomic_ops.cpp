#include "sqlreward/sql/atomic_ops.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <memory>

#include "sqlreward/errors.hpp"
#include "sqlreward/sql/ast.hpp"
#include "sqlreward/sql/parser.hpp"

namespace sqlreward::sql {

namespace {

constexpr std::array<std::string_view, kAtomicKindCount> kKindNames = {
    "FROM",       "JOIN",       "ON_EQ",          "ON_PRED",       "SELECT_COL", "SELECT_AGG",
    "SELECT_EXPR", "DISTINCT",  "WHERE_PRED",     "HAVING_PRED",   "VALUE",      "GROUP_BY",
    "ORDER_BY",   "LIMIT",      "UNION",          "INTERSECT",     "EXCEPT",     "WITH_CTE",
    "ENTER_SUBQUERY", "EXIT_SUBQUERY", "SUBQ_LAST", "WINDOW",      "SELECT_WIN", "ALIAS",
};

constexpr std::array<AtomicKind, kAtomicKindCount> kKinds = {
    AtomicKind::From,       AtomicKind::Join,       AtomicKind::OnEq,          AtomicKind::OnPred,
    AtomicKind::SelectCol,  AtomicKind::SelectAgg,  AtomicKind::SelectExpr,    AtomicKind::Distinct,
    AtomicKind::WherePred,  AtomicKind::HavingPred, AtomicKind::Value,         AtomicKind::GroupBy,
    AtomicKind::OrderBy,    AtomicKind::Limit,      AtomicKind::Union,         AtomicKind::Intersect,
    AtomicKind::Except,     AtomicKind::WithCte,    AtomicKind::EnterSubquery, AtomicKind::ExitSubquery,
    AtomicKind::SubqLast,   AtomicKind::Window,     AtomicKind::SelectWin,     AtomicKind::Alias,
};

constexpr std::string_view kSubqLast = "SUBQ_LAST";

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

/// Case-folded identifier; names that are not plain words are backquoted so
/// the rendering does not depend on the source quoting style.
std::string canon_ident(std::string_view name) {
  std::string id = lower(name);
  const bool plain = !id.empty() && !std::isdigit(static_cast<unsigned char>(id[0])) &&
                     std::all_of(id.begin(), id.end(), [](char c) {
                       const auto u = static_cast<unsigned char>(c);
                       return std::isalnum(u) || c == '_' || c == '$' || u >= 0x80;
                     });
  if (plain) return id;
  std::string out = "`";
  for (char c : id) {
    out.push_back(c);
    if (c == '`') out.push_back('`');
  }
  out.push_back('`');
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

std::string canon_integer(const std::string& text) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    unsigned long long v = 0;
    const auto* first = text.data() + 2;
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v, 16);
    if (res.ec == std::errc() && res.ptr == last) {
      // SQLite reinterprets 64-bit hex literals as two's complement
      return std::to_string(static_cast<long long>(v));
    }
    return upper(text);
  }
  const auto nz = text.find_first_not_of('0');
  return nz == std::string::npos ? std::string("0") : text.substr(nz);
}

std::string canon_real(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || !std::isfinite(v)) return text;
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string canon_literal(const Expr& e) {
  switch (e.literal) {
    case LiteralKind::Integer: return canon_integer(e.text);
    case LiteralKind::Real: return canon_real(e.text);
    case LiteralKind::String: return e.op.empty() ? quote_string(e.text) : e.op + " " + quote_string(e.text);
    case LiteralKind::Blob: return "X'" + e.text + "'";
    case LiteralKind::Null: return "NULL";
    case LiteralKind::Boolean:
    case LiteralKind::Keyword: return e.text;
  }
  return e.text;
}

bool is_constant(const Expr& e) {
  if (e.kind == ExprKind::Literal || e.kind == ExprKind::Parameter) return true;
  if (e.kind == ExprKind::Unary && (e.op == "-" || e.op == "+")) return is_constant(*e.args[0]);
  return false;
}

std::string mirror(const std::string& op) {
  if (op == "<") return ">";
  if (op == ">") return "<";
  if (op == "<=") return ">=";
  if (op == ">=") return "<=";
  return op;
}

bool is_comparison(const std::string& op) {
  return op == "=" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" || op == "IS" ||
         op == "IS NOT";
}

bool is_aggregate(const Expr& e) {
  if (e.kind != ExprKind::Function || e.over) return false;
  const auto& n = e.op;
  if (n == "MIN" || n == "MAX") return e.args.size() == 1;
  return n == "COUNT" || n == "SUM" || n == "AVG" || n == "TOTAL" || n == "GROUP_CONCAT" || n == "STRING_AGG";
}

void flatten(const Expr& e, const std::string& op, std::vector<const Expr*>& out) {
  if (e.kind == ExprKind::Binary && e.op == op) {
    flatten(*e.args[0], op, out);
    flatten(*e.args[1], op, out);
  } else {
    out.push_back(&e);
  }
}

enum class Clause { Select, From, Where, Having, Other };

struct Scope {
  const Scope* parent = nullptr;
  std::map<std::string, std::string> names;  // alias/table/CTE -> resolved relation ("" = derived)
  std::vector<std::string> relations;
  std::set<std::string> output_aliases;
  std::map<std::string, const WindowSpec*> windows;
};

struct Ctx {
  const Scope* scope = nullptr;
  Clause clause = Clause::Other;
  bool alias_refs = false;  // ORDER BY / GROUP BY / HAVING may name output aliases
  bool bare_columns = false;  // drop qualifiers (ALIAS source rendering)
};

class Decomposer {
 public:
  std::set<AtomicOp> ops;

  void statement(const Select& select, const Scope* parent) {
    auto& cte_scope = new_scope(parent);
    for (const auto& cte : select.ctes) {
      cte_scope.names[lower(cte.name)] = canon_ident(cte.name);
    }
    for (const auto& cte : select.ctes) {
      emit(AtomicKind::WithCte, {canon_ident(cte.name)});
      statement(*cte.select, &cte_scope);
    }

    const Scope* first_scope = core(select.first, &cte_scope);
    for (const auto& term : select.compounds) {
      if (term.op == "UNION ALL") emit(AtomicKind::Union, {"ALL"});
      else if (term.op == "UNION") emit(AtomicKind::Union, {});
      else if (term.op == "INTERSECT") emit(AtomicKind::Intersect, {});
      else emit(AtomicKind::Except, {});
      core(term.core, &cte_scope);
    }

    Ctx ctx{first_scope, Clause::Other, true};
    for (const auto& term : select.order_by) {
      emit(AtomicKind::OrderBy, {render(*term.expr, ctx), direction(term)});
    }
    if (select.limit) {
      std::vector<std::string> args{bare(*select.limit, ctx)};
      if (select.offset) args.push_back("OFFSET " + bare(*select.offset, ctx));
      emit(AtomicKind::Limit, std::move(args));
    }
  }

 private:
  std::deque<Scope> scopes_;

  Scope& new_scope(const Scope* parent) {
    scopes_.emplace_back();
    scopes_.back().parent = parent;
    return scopes_.back();
  }

  void emit(AtomicKind kind, std::vector<std::string> args) { ops.insert(AtomicOp{kind, std::move(args)}); }

  static std::string direction(const OrderTerm& term) {
    std::string dir = term.descending ? "DESC" : "ASC";
    if (!term.nulls.empty()) dir += " NULLS " + term.nulls;
    return dir;
  }

  /// Literal rendered without the VALUE wrapper (LIMIT / OFFSET operands).
  std::string bare(const Expr& e, const Ctx& ctx) {
    if (e.kind == ExprKind::Literal) return canon_literal(e);
    return render(e, ctx);
  }

  // ------------------------------------------------------------------ FROM

  std::string register_source(const TableSource& src, Scope& scope) {
    switch (src.kind) {
      case SourceKind::Table:
      case SourceKind::TableFunction: {
        const auto key = lower(src.name);
        std::string resolved = canon_ident(src.name);
        for (const Scope* s = scope.parent; s != nullptr; s = s->parent) {
          if (auto it = s->names.find(key); it != s->names.end() && s->relations.empty()) {
            resolved = it->second;  // CTE reference
            break;
          }
        }
        scope.names[key] = resolved;
        if (!src.alias.empty()) scope.names[lower(src.alias)] = resolved;
        scope.relations.push_back(resolved);
        return resolved;
      }
      case SourceKind::Subquery:
        if (!src.alias.empty()) scope.names[lower(src.alias)] = "";
        scope.relations.emplace_back();
        return "";
      case SourceKind::Nested:
        register_from(*src.nested, scope);
        return scope.relations.empty() ? std::string() : scope.relations.back();
    }
    return "";
  }

  void register_from(const FromClause& from, Scope& scope) {
    register_source(from.first, scope);
    for (const auto& j : from.joins) register_source(j.source, scope);
  }

  /// Emits the relation op for one FROM item and returns the name its
  /// columns resolve to ("" for derived tables).
  std::string source_ops(const TableSource& src, const Scope& scope, const std::string* join_type) {
    std::string rel;
    switch (src.kind) {
      case SourceKind::Table:
      case SourceKind::TableFunction: {
        rel = scope.names.at(lower(src.name));
        std::string shown = rel;
        if (src.kind == SourceKind::TableFunction) {
          Ctx ctx{&scope, Clause::From, false};
          shown += "(" + join_rendered(src.func_args, ctx, ", ") + ")";
        }
        if (join_type) emit(AtomicKind::Join, {shown, *join_type});
        else emit(AtomicKind::From, {shown});
        return rel;
      }
      case SourceKind::Subquery:
        subquery(*src.subquery, "FROM_DERIVED", scope.parent);
        if (join_type) emit(AtomicKind::Join, {std::string(kSubqLast), *join_type});
        else emit(AtomicKind::From, {std::string(kSubqLast)});
        return "";
      case SourceKind::Nested:
        from_ops(*src.nested, scope);
        return "";
    }
    return rel;
  }

  void from_ops(const FromClause& from, const Scope& scope) {
    std::string prev = source_ops(from.first, scope, nullptr);
    Ctx ctx{&scope, Clause::Other, false};
    for (const auto& j : from.joins) {
      std::string rel;
      if (j.type == "COMMA") {
        rel = source_ops(j.source, scope, nullptr);
      } else {
        const std::string type = j.natural ? "NATURAL " + j.type : j.type;
        rel = source_ops(j.source, scope, &type);
      }
      if (j.on) {
        std::vector<const Expr*> conjuncts;
        flatten(*j.on, "AND", conjuncts);
        for (const Expr* c : conjuncts) {
          if (c->kind == ExprKind::Binary && c->op == "=" && c->args[0]->kind == ExprKind::Column &&
              c->args[1]->kind == ExprKind::Column) {
            auto a = render(*c->args[0], ctx);
            auto b = render(*c->args[1], ctx);
            if (b < a) std::swap(a, b);
            emit(AtomicKind::OnEq, {std::move(a), std::move(b)});
          } else {
            emit(AtomicKind::OnPred, predicate(*c, ctx));
          }
        }
      }
      for (const auto& col : j.using_columns) {
        auto a = qualify(prev, col);
        auto b = qualify(rel, col);
        if (b < a) std::swap(a, b);
        emit(AtomicKind::OnEq, {std::move(a), std::move(b)});
      }
      prev = rel;
    }
  }

  static std::string qualify(const std::string& rel, const std::string& col) {
    return rel.empty() ? canon_ident(col) : rel + "." + canon_ident(col);
  }

  // ------------------------------------------------------------------ core

  const Scope* core(const SelectCore& core, const Scope* parent) {
    auto& scope = new_scope(parent);
    if (core.from) register_from(*core.from, scope);
    for (const auto& col : core.columns)
      if (!col.alias.empty()) scope.output_aliases.insert(lower(col.alias));
    for (const auto& [name, spec] : core.windows) scope.windows[lower(name)] = &spec;

    if (core.is_values) {
      Ctx ctx{&scope, Clause::Select, false};
      for (const auto& row : core.values)
        for (const auto& v : row) emit(AtomicKind::Value, {value_arg(*v, ctx)});
      return &scope;
    }

    if (core.from) from_ops(*core.from, scope);
    if (core.distinct) emit(AtomicKind::Distinct, {});

    Ctx select_ctx{&scope, Clause::Select, false};
    for (const auto& col : core.columns) projection(col, select_ctx);

    if (core.where) {
      Ctx ctx{&scope, Clause::Where, false};
      std::vector<const Expr*> conjuncts;
      flatten(*core.where, "AND", conjuncts);
      for (const Expr* c : conjuncts) emit(AtomicKind::WherePred, predicate(*c, ctx));
    }
    Ctx group_ctx{&scope, Clause::Other, true};
    for (const auto& g : core.group_by) emit(AtomicKind::GroupBy, {render(*g, group_ctx)});
    if (core.having) {
      Ctx ctx{&scope, Clause::Having, true};
      std::vector<const Expr*> conjuncts;
      flatten(*core.having, "AND", conjuncts);
      for (const Expr* c : conjuncts) emit(AtomicKind::HavingPred, predicate(*c, ctx));
    }
    return &scope;
  }

  std::string value_arg(const Expr& e, const Ctx& ctx) {
    if (e.kind == ExprKind::Literal) return canon_literal(e);
    if (e.kind == ExprKind::Unary && e.op == "-" && e.args[0]->kind == ExprKind::Literal)
      return negate_literal(*e.args[0]);
    return render(e, ctx);
  }

  void projection(const ResultColumn& col, const Ctx& ctx) {
    const Expr& e = *col.expr;
    std::string rendered;
    switch (e.kind) {
      case ExprKind::Star:
      case ExprKind::Column:
        rendered = render(e, ctx);
        emit(AtomicKind::SelectCol, {rendered});
        break;
      case ExprKind::Literal:
        rendered = render(e, ctx);
        emit(AtomicKind::Value, {canon_literal(e)});
        break;
      case ExprKind::Function:
        if (e.over) {
          rendered = render(e, ctx);
          emit(AtomicKind::SelectWin, {e.op, function_args(e, ctx)});
          emit(AtomicKind::Window, window_args(*e.over, ctx));
          break;
        }
        if (is_aggregate(e)) {
          rendered = render(e, ctx);
          emit(AtomicKind::SelectAgg, {e.op, function_args(e, ctx)});
          break;
        }
        [[fallthrough]];
      default:
        rendered = render(e, ctx);
        emit(AtomicKind::SelectExpr, {rendered});
        break;
    }
    if (!col.alias.empty()) {
      Ctx bare = ctx;
      bare.bare_columns = true;
      emit(AtomicKind::Alias, {"COLUMN", render(e, bare), canon_ident(col.alias)});
    }
  }

  std::string function_args(const Expr& e, const Ctx& ctx) {
    if (e.star_arg) return "*";
    std::string args = join_rendered(e.args, ctx, ", ");
    return e.distinct ? "DISTINCT " + args : args;
  }

  const WindowSpec& effective_window(const WindowSpec& spec, const Ctx& ctx) {
    if (!spec.base_name.empty() && spec.partition.empty() && spec.order.empty() && spec.frame.empty()) {
      for (const Scope* s = ctx.scope; s != nullptr; s = s->parent) {
        if (auto it = s->windows.find(lower(spec.base_name)); it != s->windows.end()) return *it->second;
      }
    }
    return spec;
  }

  std::vector<std::string> window_args(const WindowSpec& raw_spec, const Ctx& ctx) {
    const WindowSpec& spec = effective_window(raw_spec, ctx);
    Ctx inner{ctx.scope, Clause::Other, false};
    std::string order;
    for (const auto& term : spec.order) {
      if (!order.empty()) order += ", ";
      order += render(*term.expr, inner) + " " + direction(term);
    }
    return {join_rendered(spec.partition, inner, ", "), order, spec.frame};
  }

  // ------------------------------------------------------------------ predicates

  std::vector<std::string> predicate(const Expr& e, const Ctx& ctx) {
    switch (e.kind) {
      case ExprKind::Binary:
        if (is_comparison(e.op)) {
          auto [op, lhs, rhs] = oriented(e, ctx);
          return {op, lhs, rhs};
        }
        if (e.op == "OR") return {"OR", render(e, ctx)};
        break;
      case ExprKind::Like: {
        const std::string op = e.negated ? "NOT " + e.op : e.op;
        std::string pattern = render(*e.args[1], ctx);
        if (e.args.size() > 2) pattern += " ESCAPE " + render(*e.args[2], ctx);
        return {op, render(*e.args[0], ctx), pattern};
      }
      case ExprKind::Between:
        return {e.negated ? "NOT BETWEEN" : "BETWEEN", render(*e.args[0], ctx),
                render(*e.args[1], ctx) + " AND " + render(*e.args[2], ctx)};
      case ExprKind::InList:
        return {e.negated ? "NOT IN" : "IN", render(*e.args[0], ctx), in_list(e, ctx)};
      case ExprKind::InSelect: {
        auto lhs = render(*e.args[0], ctx);
        subquery(*e.subquery, role_for(ExprKind::InSelect, ctx), ctx.scope);
        return {e.negated ? "NOT IN" : "IN", lhs, std::string(kSubqLast)};
      }
      case ExprKind::InTable:
        return {e.negated ? "NOT IN" : "IN", render(*e.args[0], ctx), canon_ident(e.name)};
      case ExprKind::IsNull:
        return {e.negated ? "IS NOT" : "IS", render(*e.args[0], ctx), "VALUE(NULL)"};
      case ExprKind::Exists:
        subquery(*e.subquery, role_for(ExprKind::Exists, ctx), ctx.scope);
        return {e.negated ? "NOT EXISTS" : "EXISTS", std::string(kSubqLast)};
      case ExprKind::Unary:
        if (e.op == "NOT") return {"NOT", render(*e.args[0], ctx)};
        break;
      default:
        break;
    }
    return {"EXPR", render(e, ctx)};
  }

  /// Orders comparison operands canonically: constants go right, otherwise
  /// operands sort lexicographically; asymmetric operators are mirrored when
  /// the operands swap.
  std::tuple<std::string, std::string, std::string> oriented(const Expr& e, const Ctx& ctx) {
    std::string op = e.op;
    std::string lhs = render(*e.args[0], ctx);
    std::string rhs = render(*e.args[1], ctx);
    const bool lc = is_constant(*e.args[0]);
    const bool rc = is_constant(*e.args[1]);
    if ((lc && !rc) || (lc == rc && rhs < lhs)) {
      std::swap(lhs, rhs);
      op = mirror(op);
    }
    return {op, lhs, rhs};
  }

  std::string in_list(const Expr& e, const Ctx& ctx) {
    std::vector<std::string> items;
    for (std::size_t i = 1; i < e.args.size(); ++i) items.push_back(render(*e.args[i], ctx));
    std::sort(items.begin(), items.end());
    std::string out = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += items[i];
    }
    return out + ")";
  }

  static std::string role_for(ExprKind kind, const Ctx& ctx) {
    switch (ctx.clause) {
      case Clause::Select: return "SELECT_SCALAR";
      case Clause::Having: return "HAVING_SCALAR";
      case Clause::From: return "FROM_DERIVED";
      case Clause::Where:
      case Clause::Other:
        if (kind == ExprKind::InSelect) return "WHERE_IN";
        if (kind == ExprKind::Exists) return "WHERE_EXISTS";
        return "WHERE_SCALAR";
    }
    return "WHERE_SCALAR";
  }

  void subquery(const Select& select, const std::string& role, const Scope* parent) {
    emit(AtomicKind::EnterSubquery, {role});
    statement(select, parent);
    emit(AtomicKind::ExitSubquery, {});
  }

  // ------------------------------------------------------------------ expressions

  std::string resolve_column(const Expr& e, const Ctx& ctx) {
    const std::string col = canon_ident(e.name);
    if (ctx.bare_columns) return col;
    if (!e.table.empty()) {
      const auto key = lower(e.table);
      for (const Scope* s = ctx.scope; s != nullptr; s = s->parent) {
        if (auto it = s->names.find(key); it != s->names.end()) {
          return it->second.empty() ? col : it->second + "." + col;
        }
      }
      return canon_ident(e.table) + "." + col;
    }
    if (ctx.alias_refs && ctx.scope && ctx.scope->output_aliases.count(lower(e.name))) return col;
    if (ctx.scope && ctx.scope->relations.size() == 1 && !ctx.scope->relations[0].empty())
      return ctx.scope->relations[0] + "." + col;
    return col;
  }

  std::string negate_literal(const Expr& lit) {
    std::string v = canon_literal(lit);
    if (lit.literal != LiteralKind::Integer && lit.literal != LiteralKind::Real) return "-" + v;
    if (v == "0") return v;
    return v.front() == '-' ? v.substr(1) : "-" + v;
  }

  std::string join_rendered(const std::vector<ExprPtr>& items, const Ctx& ctx, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += sep;
      out += render(*items[i], ctx);
    }
    return out;
  }

  static bool needs_parens(const Expr& child) {
    switch (child.kind) {
      case ExprKind::Binary:
      case ExprKind::Between:
      case ExprKind::Like:
      case ExprKind::InList:
      case ExprKind::InSelect:
      case ExprKind::InTable:
      case ExprKind::IsNull:
        return true;
      case ExprKind::Unary:
        return child.op == "NOT";
      default:
        return false;
    }
  }

  std::string operand(const Expr& child, const Ctx& ctx) {
    auto r = render(child, ctx);
    return needs_parens(child) ? "(" + r + ")" : r;
  }

  std::string render_window(const WindowSpec& raw_spec, const Ctx& ctx) {
    auto args = window_args(raw_spec, ctx);
    std::string out = "(";
    auto add = [&](const std::string& part) {
      if (part.empty()) return;
      if (out.size() > 1) out.push_back(' ');
      out += part;
    };
    if (!args[0].empty()) add("PARTITION BY " + args[0]);
    if (!args[1].empty()) add("ORDER BY " + args[1]);
    add(args[2]);
    return out + ")";
  }

  std::string render(const Expr& e, const Ctx& ctx) {
    switch (e.kind) {
      case ExprKind::Column:
        return resolve_column(e, ctx);
      case ExprKind::Literal:
        return "VALUE(" + canon_literal(e) + ")";
      case ExprKind::Parameter:
        return "VALUE(" + e.text + ")";
      case ExprKind::Star: {
        if (e.table.empty()) return "*";
        Expr probe;
        probe.kind = ExprKind::Column;
        probe.table = e.table;
        probe.name = "x";
        auto q = resolve_column(probe, ctx);
        return q.size() > 2 ? q.substr(0, q.size() - 1) + "*" : "*";
      }
      case ExprKind::Unary: {
        const Expr& child = *e.args[0];
        if (e.op == "-" && child.kind == ExprKind::Literal &&
            (child.literal == LiteralKind::Integer || child.literal == LiteralKind::Real))
          return "VALUE(" + negate_literal(child) + ")";
        if (e.op == "NOT") return "NOT " + operand(child, ctx);
        return e.op + operand(child, ctx);
      }
      case ExprKind::Binary: {
        if (e.op == "AND" || e.op == "OR") {
          std::vector<const Expr*> parts;
          flatten(e, e.op, parts);
          std::vector<std::string> rendered;
          for (const Expr* p : parts) {
            const bool nested = p->kind == ExprKind::Binary && (p->op == "AND" || p->op == "OR");
            rendered.push_back(nested ? "(" + render(*p, ctx) + ")" : render(*p, ctx));
          }
          std::sort(rendered.begin(), rendered.end());
          std::string out;
          for (std::size_t i = 0; i < rendered.size(); ++i) {
            if (i) out += " " + e.op + " ";
            out += rendered[i];
          }
          return out;
        }
        if (is_comparison(e.op)) {
          auto [op, l, r] = oriented(e, ctx);
          auto wrap = [](const std::string& s, const Expr& child) { return needs_parens(child) ? "(" + s + ")" : s; };
          // orientation may have swapped operands; parenthesization follows the rendered text
          const bool swapped = l != render(*e.args[0], ctx);
          const Expr& lc = swapped ? *e.args[1] : *e.args[0];
          const Expr& rc = swapped ? *e.args[0] : *e.args[1];
          return wrap(l, lc) + " " + op + " " + wrap(r, rc);
        }
        return operand(*e.args[0], ctx) + " " + e.op + " " + operand(*e.args[1], ctx);
      }
      case ExprKind::Function: {
        std::string out = e.op + "(" + function_args(e, ctx) + ")";
        if (e.filter) out += " FILTER (WHERE " + render(*e.filter, ctx) + ")";
        if (e.over) out += " OVER " + render_window(*e.over, ctx);
        return out;
      }
      case ExprKind::Case: {
        std::string out = "CASE";
        if (e.case_operand) out += " " + render(*e.case_operand, ctx);
        for (const auto& [cond, val] : e.whens) out += " WHEN " + render(*cond, ctx) + " THEN " + render(*val, ctx);
        if (e.case_else) out += " ELSE " + render(*e.case_else, ctx);
        return out + " END";
      }
      case ExprKind::Cast:
        return "CAST(" + render(*e.args[0], ctx) + " AS " + e.name + ")";
      case ExprKind::Between:
        return operand(*e.args[0], ctx) + (e.negated ? " NOT BETWEEN " : " BETWEEN ") + operand(*e.args[1], ctx) +
               " AND " + operand(*e.args[2], ctx);
      case ExprKind::InList:
        return operand(*e.args[0], ctx) + (e.negated ? " NOT IN " : " IN ") + in_list(e, ctx);
      case ExprKind::InSelect: {
        auto lhs = operand(*e.args[0], ctx);
        subquery(*e.subquery, role_for(ExprKind::InSelect, ctx), ctx.scope);
        return lhs + (e.negated ? " NOT IN " : " IN ") + std::string(kSubqLast);
      }
      case ExprKind::InTable:
        return operand(*e.args[0], ctx) + (e.negated ? " NOT IN " : " IN ") + canon_ident(e.name);
      case ExprKind::Like: {
        std::string out = operand(*e.args[0], ctx) + (e.negated ? " NOT " : " ") + e.op + " " +
                          operand(*e.args[1], ctx);
        if (e.args.size() > 2) out += " ESCAPE " + operand(*e.args[2], ctx);
        return out;
      }
      case ExprKind::IsNull:
        return operand(*e.args[0], ctx) + (e.negated ? " IS NOT NULL" : " IS NULL");
      case ExprKind::Exists:
        subquery(*e.subquery, role_for(ExprKind::Exists, ctx), ctx.scope);
        return std::string(e.negated ? "NOT EXISTS " : "EXISTS ") + std::string(kSubqLast);
      case ExprKind::Subquery:
        subquery(*e.subquery, role_for(ExprKind::Subquery, ctx), ctx.scope);
        return std::string(kSubqLast);
      case ExprKind::Collate:
        return operand(*e.args[0], ctx) + " COLLATE " + upper(e.name);
      case ExprKind::Row:
        return "(" + join_rendered(e.args, ctx, ", ") + ")";
      case ExprKind::Raw:
        return e.text;
    }
    return e.text;
  }
};

}  // namespace

std::string_view kind_name(AtomicKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<AtomicKind> kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return kKinds[i];
  return std::nullopt;
}

const std::array<AtomicKind, kAtomicKindCount>& all_kinds() { return kKinds; }

std::string render(const AtomicOp& op) {
  std::string out(kind_name(op.kind));
  if (op.args.empty()) return out;
  out.push_back('(');
  for (std::size_t i = 0; i < op.args.size(); ++i) {
    if (i) out.push_back(',');
    out += op.args[i];
  }
  out.push_back(')');
  return out;
}

std::vector<std::string> AtomicOpSet::sorted_renderings() const {
  std::vector<std::string> out;
  out.reserve(ops.size());
  for (const auto& op : ops) out.push_back(render(op));
  std::sort(out.begin(), out.end());
  return out;
}

AtomicOpSet decompose(std::string_view sql) {
  AtomicOpSet result;
  result.source_sql = std::string(sql);
  SelectPtr ast;
  try {
    ast = parse_sql(sql);
  } catch (const ParseError&) {
    return result;
  }
  Decomposer d;
  d.statement(*ast, nullptr);
  result.ops = std::move(d.ops);
  result.parse_ok = true;
  return result;
}

double jaccard(const std::set<AtomicOp>& a, const std::set<AtomicOp>& b) {
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard(const AtomicOpSet& a, const AtomicOpSet& b) { return jaccard(a.ops, b.ops); }

}  // namespace sqlreward::sql
