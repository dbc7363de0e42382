#pragma once

#include <string_view>

#include "sqlreward/sql/ast.hpp"

namespace sqlreward::sql {

/// Parses a single SQLite SELECT statement (optionally WITH-prefixed and
/// optionally terminated by one `;`).  Throws ParseError on malformed input,
/// on empty input, and on more than one statement.
SelectPtr parse_sql(std::string_view text);

}  // namespace sqlreward::sql
