#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sqlreward::sql {

/// The closed taxonomy of structural primitives.
enum class AtomicKind {
  From,
  Join,
  OnEq,
  OnPred,
  SelectCol,
  SelectAgg,
  SelectExpr,
  Distinct,
  WherePred,
  HavingPred,
  Value,
  GroupBy,
  OrderBy,
  Limit,
  Union,
  Intersect,
  Except,
  WithCte,
  EnterSubquery,
  ExitSubquery,
  SubqLast,
  Window,
  SelectWin,
  Alias,
};

inline constexpr std::size_t kAtomicKindCount = 24;

std::string_view kind_name(AtomicKind kind);
std::optional<AtomicKind> kind_from_name(std::string_view name);
const std::array<AtomicKind, kAtomicKindCount>& all_kinds();

struct AtomicOp {
  AtomicKind kind;
  std::vector<std::string> args;

  friend bool operator==(const AtomicOp&, const AtomicOp&) = default;
  friend auto operator<=>(const AtomicOp&, const AtomicOp&) = default;
};

/// `KIND` or `KIND(arg1,arg2,...)`.
std::string render(const AtomicOp& op);

struct AtomicOpSet {
  std::set<AtomicOp> ops;
  std::string source_sql;
  bool parse_ok = false;

  std::size_t size() const { return ops.size(); }
  bool contains(const AtomicOp& op) const { return ops.count(op) != 0; }
  /// Canonical renderings in lexicographic order.
  std::vector<std::string> sorted_renderings() const;
};

/// Parses `sql` and extracts its canonical atomic operations.  Never throws
/// on malformed SQL: the result then has parse_ok=false and no ops.
AtomicOpSet decompose(std::string_view sql);

/// |a ∩ b| / |a ∪ b|, or 0 when both sets are empty.
double jaccard(const AtomicOpSet& a, const AtomicOpSet& b);
double jaccard(const std::set<AtomicOp>& a, const std::set<AtomicOp>& b);

}  // namespace sqlreward::sql
