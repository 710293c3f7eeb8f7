#include "redsense/text.hpp"

#include <fstream>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"

namespace redsense::text {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

}  // namespace

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword list " + path);
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    auto word = io::trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.insert(lowercase(word));
  }
  return words;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  Sentence current;
  auto flush = [&] {
    bool has_word = false;
    for (const auto& t : current) has_word = has_word || t.is_word;
    if (has_word) sentences.push_back(std::move(current));
    current.clear();
  };
  auto push_punct = [&](char c) {
    if (!current.empty() && !current.back().is_word) {
      current.back().text += c;
    } else {
      current.push_back(Token{std::string(1, c), false});
    }
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      std::size_t j = i;
      while (j < n) {
        const auto cj = static_cast<unsigned char>(text[j]);
        if (is_word_byte(cj)) {
          ++j;
        } else if (cj == '\'' && j + 1 < n && is_word_byte(static_cast<unsigned char>(text[j + 1])) &&
                   j > i) {
          ++j;  // internal apostrophe: "don't"
        } else {
          break;
        }
      }
      current.push_back(Token{std::string(text.substr(i, j - i)), true});
      i = j;
    } else if (c == '\n') {
      flush();
      ++i;
    } else if (is_space(c)) {
      ++i;
    } else if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      if (j == n || is_space(static_cast<unsigned char>(text[j]))) {
        flush();
      } else {
        push_punct(static_cast<char>(c));
      }
      i = j;
    } else {
      push_punct(static_cast<char>(c));
      ++i;
    }
  }
  flush();
  return sentences;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> words;
  for (auto& sentence : split_sentences(text)) {
    for (auto& token : sentence) {
      if (token.is_word) words.push_back(lowercase(token.text));
    }
  }
  return words;
}

std::vector<std::string> model_tokens(std::string_view text, const TokenizerOptions& options) {
  const StopwordSet& stop = options.stopwords ? *options.stopwords : default_stopwords();
  std::vector<std::string> out;
  for (auto& word : word_tokens(text)) {
    if (utf8_length(word) < options.min_length) continue;
    if (stop.contains(word)) continue;
    out.push_back(std::move(word));
  }
  return out;
}

}  // namespace redsense::text
