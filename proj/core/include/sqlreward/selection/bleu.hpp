#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sqlreward::selection {

using Tokens = std::vector<std::string>;

Tokens whitespace_tokens(std::string_view text);

/// Sentence BLEU with 1..4-gram uniform weights, clipped counts, closest
/// reference length brevity penalty, and +1 smoothing of the 2..4-gram
/// precisions. 0 when no unigram matches.
double sentence_bleu(const Tokens& hypothesis, const std::vector<Tokens>& references);

/// Mean BLEU of each trace against the remaining ones. Throws TooFewTraces.
double self_bleu(const std::vector<std::string>& traces);

}  // namespace sqlreward::selection
