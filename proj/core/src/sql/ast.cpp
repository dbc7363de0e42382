#include "sqlreward/sql/ast.hpp"

namespace sqlreward::sql {

Expr::Expr() = default;
Expr::~Expr() = default;
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;

TableSource::TableSource() = default;
TableSource::~TableSource() = default;
TableSource::TableSource(TableSource&&) noexcept = default;
TableSource& TableSource::operator=(TableSource&&) noexcept = default;

namespace {

std::size_t count_in_select(const Select& s);
std::size_t count_in_core(const SelectCore& core);

std::size_t count_in_expr(const Expr* e) {
  if (e == nullptr) return 0;
  std::size_t n = 0;
  if (e->subquery) n += count_in_select(*e->subquery);
  for (const auto& a : e->args) n += count_in_expr(a.get());
  n += count_in_expr(e->case_operand.get());
  for (const auto& [w, t] : e->whens) n += count_in_expr(w.get()) + count_in_expr(t.get());
  n += count_in_expr(e->case_else.get());
  n += count_in_expr(e->filter.get());
  if (e->over) {
    for (const auto& p : e->over->partition) n += count_in_expr(p.get());
    for (const auto& o : e->over->order) n += count_in_expr(o.expr.get());
  }
  return n;
}

std::size_t count_in_source(const TableSource& src);

std::size_t count_in_from(const FromClause& from) {
  std::size_t n = count_in_source(from.first);
  for (const auto& j : from.joins) n += count_in_source(j.source) + count_in_expr(j.on.get());
  return n;
}

std::size_t count_in_source(const TableSource& src) {
  std::size_t n = 0;
  if (src.subquery) n += count_in_select(*src.subquery);
  if (src.nested) n += count_in_from(*src.nested);
  for (const auto& a : src.func_args) n += count_in_expr(a.get());
  return n;
}

std::size_t count_in_core(const SelectCore& core) {
  std::size_t n = 1;
  for (const auto& c : core.columns) n += count_in_expr(c.expr.get());
  if (core.from) n += count_in_from(*core.from);
  n += count_in_expr(core.where.get());
  for (const auto& g : core.group_by) n += count_in_expr(g.get());
  n += count_in_expr(core.having.get());
  for (const auto& row : core.values)
    for (const auto& v : row) n += count_in_expr(v.get());
  return n;
}

std::size_t count_in_select(const Select& s) {
  std::size_t n = 0;
  for (const auto& cte : s.ctes) n += count_in_select(*cte.select);
  n += count_in_core(s.first);
  for (const auto& c : s.compounds) n += count_in_core(c.core);
  for (const auto& o : s.order_by) n += count_in_expr(o.expr.get());
  n += count_in_expr(s.limit.get()) + count_in_expr(s.offset.get());
  return n;
}

}  // namespace

std::size_t count_select_cores(const Select& select) { return count_in_select(select); }

}  // namespace sqlreward::sql
