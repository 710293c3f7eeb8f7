#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace redsense::text {

using StopwordSet = std::unordered_set<std::string>;

// Built-in English stopword list (lowercase).
const StopwordSet& default_stopwords();
// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet load_stopwords(const std::string& path);

// ASCII case folding; non-ASCII bytes pass through unchanged.
std::string lowercase(std::string_view s);
// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

// A raw token as it appears in a sentence. Punctuation runs become a single
// non-word token so phrase candidates never span them.
struct Token {
  std::string text;
  bool is_word = true;
};
using Sentence = std::vector<Token>;

// Sentence boundaries: '.', '!' or '?' followed by whitespace or end of text,
// and line breaks. Empty sentences are dropped.
std::vector<Sentence> split_sentences(std::string_view text);

// Lowercased word tokens in order, punctuation removed.
std::vector<std::string> word_tokens(std::string_view text);

struct TokenizerOptions {
  std::size_t min_length = 3;
  const StopwordSet* stopwords = nullptr;  // nullptr: default_stopwords()
};

// Topic-model tokenizer: lowercase words of at least min_length code points
// that are not stopwords.
std::vector<std::string> model_tokens(std::string_view text, const TokenizerOptions& options = {});

}  // namespace redsense::text
