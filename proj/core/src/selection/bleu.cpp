#include "sqlreward/selection/bleu.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <unordered_map>

#include "sqlreward/errors.hpp"

namespace sqlreward::selection {

namespace {

constexpr std::size_t kMaxOrder = 4;

using Counts = std::map<std::vector<std::string>, std::size_t>;

Counts ngrams(const Tokens& t, std::size_t n) {
  Counts c;
  if (t.size() < n) return c;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++c[Tokens(t.begin() + static_cast<std::ptrdiff_t>(i),
                                                             t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return c;
}


/// Closest reference length; ties go to the shorter reference.
std::size_t closest_ref_length(std::size_t hyp_len, const std::vector<std::size_t>& ref_lengths) {
  const auto c = static_cast<long>(hyp_len);
  long r = static_cast<long>(ref_lengths.front());
  for (const auto length : ref_lengths) {
    const auto len = static_cast<long>(length);
    const long d = std::labs(len - c);
    const long best = std::labs(r - c);
    if (d < best || (d == best && len < r)) r = len;
  }
  return static_cast<std::size_t>(r);
}

double score(const std::array<double, kMaxOrder>& numer, const std::array<double, kMaxOrder>& denom,
             std::size_t hyp_len, std::size_t ref_len) {
  if (numer[0] == 0.0) return 0.0;
  const auto c = static_cast<double>(hyp_len);
  const auto r = static_cast<double>(ref_len);
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  double log_sum = std::log(numer[0] / denom[0]);
  for (std::size_t i = 1; i < kMaxOrder; ++i) log_sum += std::log((numer[i] + 1.0) / (denom[i] + 1.0));
  return bp * std::exp(log_sum / static_cast<double>(kMaxOrder));
}

using Gram = std::array<std::uint32_t, kMaxOrder>;

struct GramHash {
  std::size_t operator()(const Gram& g) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : g) h = (h ^ x) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

/// Two largest per-trace counts of one n-gram, so the maximum over every
/// trace but one is a constant-time lookup.
struct Top2 {
  std::size_t best = 0;
  std::size_t best_trace = SIZE_MAX;
  std::size_t second = 0;

  void offer(std::size_t count, std::size_t trace) {
    if (count > best) {
      second = best;
      best = count;
      best_trace = trace;
    } else if (count > second) {
      second = count;
    }
  }
  std::size_t excluding(std::size_t trace) const { return trace == best_trace ? second : best; }
};

}  // namespace

Tokens whitespace_tokens(std::string_view text) {
  Tokens out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(std::move(w));
  return out;
}

double sentence_bleu(const Tokens& hyp, const std::vector<Tokens>& refs) {
  if (hyp.empty() || refs.empty()) return 0.0;
  std::array<double, kMaxOrder> numer{};
  std::array<double, kMaxOrder> denom{};
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto hc = ngrams(hyp, n);
    Counts max_ref;
    for (const auto& r : refs)
      for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    std::size_t clipped = 0;
    std::size_t total = 0;
    for (const auto& [g, c] : hc) {
      total += c;
      if (auto it = max_ref.find(g); it != max_ref.end()) clipped += std::min(c, it->second);
    }
    numer[n - 1] = static_cast<double>(clipped);
    denom[n - 1] = static_cast<double>(std::max<std::size_t>(1, total));
  }
  std::vector<std::size_t> ref_lengths;
  ref_lengths.reserve(refs.size());
  for (const auto& r : refs) ref_lengths.push_back(r.size());
  return score(numer, denom, hyp.size(), closest_ref_length(hyp.size(), ref_lengths));
}

double self_bleu(const std::vector<std::string>& traces) {
  if (traces.size() < 2) throw TooFewTraces(traces.size());
  const std::size_t k = traces.size();
  std::unordered_map<std::string, std::uint32_t> vocab;
  std::vector<std::vector<std::uint32_t>> ids(k);
  std::vector<std::size_t> lengths(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (auto& w : whitespace_tokens(traces[i]))
      ids[i].push_back(vocab.emplace(std::move(w), static_cast<std::uint32_t>(vocab.size())).first->second);
    lengths[i] = ids[i].size();
  }

  // per_trace[n][i]: n-gram counts of trace i; top[n]: top-2 counts over traces.
  std::array<std::vector<std::unordered_map<Gram, std::size_t, GramHash>>, kMaxOrder> per_trace;
  std::array<std::unordered_map<Gram, Top2, GramHash>, kMaxOrder> top;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    auto& counts = per_trace[n - 1];
    counts.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t p = 0; p + n <= ids[i].size(); ++p) {
        Gram g;
        g.fill(UINT32_MAX);
        std::copy_n(ids[i].begin() + static_cast<std::ptrdiff_t>(p), n, g.begin());
        ++counts[i][g];
      }
      for (const auto& [g, c] : counts[i]) top[n - 1][g].offer(c, i);
    }
  }

  double sum = 0.0;
  std::vector<std::size_t> ref_lengths;
  for (std::size_t i = 0; i < k; ++i) {
    if (ids[i].empty()) continue;
    std::array<double, kMaxOrder> numer{};
    std::array<double, kMaxOrder> denom{};
    for (std::size_t n = 0; n < kMaxOrder; ++n) {
      std::size_t clipped = 0;
      std::size_t total = 0;
      for (const auto& [g, c] : per_trace[n][i]) {
        total += c;
        clipped += std::min(c, top[n].at(g).excluding(i));
      }
      numer[n] = static_cast<double>(clipped);
      denom[n] = static_cast<double>(std::max<std::size_t>(1, total));
    }
    ref_lengths.clear();
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) ref_lengths.push_back(lengths[j]);
    sum += score(numer, denom, lengths[i], closest_ref_length(lengths[i], ref_lengths));
  }
  return sum / static_cast<double>(k);
}

}  // namespace sqlreward::selection
