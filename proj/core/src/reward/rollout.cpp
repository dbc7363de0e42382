#include "sqlreward/reward/rollout.hpp"

#include <cctype>

namespace sqlreward::reward {

namespace {

constexpr std::string_view kOpen = "<think>";
constexpr std::string_view kClose = "</think>";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

std::string_view strip_fence(std::string_view sql) {
  if (sql.substr(0, 3) != "```") return sql;
  const auto eol = sql.find('\n');
  if (eol == std::string_view::npos) return {};
  sql.remove_prefix(eol + 1);
  sql = trim(sql);
  if (sql.size() >= 3 && sql.substr(sql.size() - 3) == "```") sql.remove_suffix(3);
  return trim(sql);
}

}  // namespace

RolloutParse parse_rollout(std::string_view text) {
  RolloutParse p;
  p.raw = std::string(text);
  if (count(text, kOpen) != 1 || count(text, kClose) != 1) return p;
  const auto open = text.find(kOpen);
  const auto close = text.find(kClose);
  if (close < open || !trim(text.substr(0, open)).empty()) return p;
  const auto think = trim(text.substr(open + kOpen.size(), close - open - kOpen.size()));
  const auto sql = strip_fence(trim(text.substr(close + kClose.size())));
  if (sql.empty()) return p;
  p.think = std::string(think);
  p.sql = std::string(sql);
  p.format_valid = true;
  return p;
}

}  // namespace sqlreward::reward
