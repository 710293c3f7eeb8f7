#include "redsense/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"

namespace redsense::keywords {

namespace {

enum class Tag { plain, digit, unusual, acronym, proper };

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

Tag tag_of(const std::string& word, std::size_t index_in_sentence) {
  std::size_t digits = 0;
  std::size_t alphas = 0;
  std::size_t uppers = 0;
  for (unsigned char c : word) {
    digits += is_digit(c);
    alphas += is_alpha(c);
    uppers += is_upper(c);
  }
  if (digits > 0 && alphas == 0) return Tag::digit;
  if (digits > 0 || alphas == 0) return Tag::unusual;
  if (uppers == word.size()) return Tag::acronym;
  if (is_upper(static_cast<unsigned char>(word.front())) && index_in_sentence > 0) return Tag::proper;
  return Tag::plain;
}

bool discarded(Tag t) { return t == Tag::digit || t == Tag::unusual; }

struct TermStats {
  std::size_t tf = 0;
  std::size_t tf_acronym = 0;
  std::size_t tf_proper = 0;
  bool stopword = false;
  // Distinct (document, sentence) occurrences, recorded as the sentence's
  // index within its document.
  std::vector<std::size_t> sentence_positions;
  std::map<std::string, std::size_t> out_edges;  // right neighbour -> count
  std::map<std::string, std::size_t> in_edges;   // left neighbour -> count
  double score = 0;
};

struct Candidate {
  std::vector<std::string> terms;
  std::size_t tf = 0;
  bool valid = true;
};

struct BlockWord {
  std::string term;
  Tag tag;
};

double median(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? static_cast<double>(v[n / 2]) : 0.5 * static_cast<double>(v[n / 2 - 1] + v[n / 2]);
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

double edit_similarity(const std::string& a, const std::string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[b.size()]) / static_cast<double>(longest);
}

std::vector<ScoredTerm> extract_keywords(const std::vector<std::string>& docs, const ExtractOptions& options) {
  if (docs.empty()) throw PreconditionError("keyword extraction needs at least one document");
  if (options.max_ngram < 1 || options.max_ngram > 3) throw PreconditionError("max_ngram must lie in [1, 3]");
  const text::StopwordSet& stop = options.stopwords ? *options.stopwords : text::default_stopwords();

  std::map<std::string, TermStats> terms;
  std::map<std::string, Candidate> candidates;
  std::size_t sentence_count = 0;

  for (const auto& doc : docs) {
    const auto sentences = text::split_sentences(doc);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      ++sentence_count;
      std::set<std::string> seen_here;
      std::vector<BlockWord> block;
      std::size_t word_index = 0;
      for (const auto& token : sentences[s]) {
        if (!token.is_word) {
          block.clear();
          continue;
        }
        const Tag tag = tag_of(token.text, word_index++);
        std::string term = text::lowercase(token.text);
        auto& st = terms[term];
        if (st.tf == 0) st.stopword = stop.contains(term) || text::utf8_length(term) < 3;
        ++st.tf;
        st.tf_acronym += tag == Tag::acronym;
        st.tf_proper += tag == Tag::proper;
        if (seen_here.insert(term).second) st.sentence_positions.push_back(s);

        if (!discarded(tag) && !block.empty() && !discarded(block.back().tag)) {
          ++terms[block.back().term].out_edges[term];
          ++st.in_edges[block.back().term];
        }

        block.push_back({std::move(term), tag});
        for (std::size_t n = 1; n <= options.max_ngram && n <= block.size(); ++n) {
          std::vector<std::string> words;
          bool valid = true;
          for (std::size_t i = block.size() - n; i < block.size(); ++i) {
            words.push_back(block[i].term);
            valid = valid && !discarded(block[i].tag);
          }
          auto& cand = candidates[join(words)];
          if (cand.tf == 0) cand.terms = std::move(words);
          ++cand.tf;
          cand.valid = cand.valid && valid;
        }
      }
    }
  }
  if (terms.empty()) return {};

  std::size_t max_tf = 0;
  double valid_sum = 0.0;
  std::size_t valid_count = 0;
  for (const auto& [term, st] : terms) {
    max_tf = std::max(max_tf, st.tf);
    if (!st.stopword) {
      valid_sum += static_cast<double>(st.tf);
      ++valid_count;
    }
  }
  double freq_norm = 1.0;
  if (valid_count > 0) {
    const double mean = valid_sum / static_cast<double>(valid_count);
    double var = 0.0;
    for (const auto& [term, st] : terms) {
      if (!st.stopword) var += (static_cast<double>(st.tf) - mean) * (static_cast<double>(st.tf) - mean);
    }
    freq_norm = mean + std::sqrt(var / static_cast<double>(valid_count));
  }

  for (auto& [term, st] : terms) {
    const double tf = static_cast<double>(st.tf);
    auto edge_ratio = [](const std::map<std::string, std::size_t>& edges) {
      std::size_t total = 0;
      for (const auto& [n, c] : edges) total += c;
      return total == 0 ? 0.0 : static_cast<double>(edges.size()) / static_cast<double>(total);
    };
    const double rel_scale = tf / static_cast<double>(max_tf);
    const double relatedness = (0.5 + edge_ratio(st.in_edges) * rel_scale) + (0.5 + edge_ratio(st.out_edges) * rel_scale);
    const double frequency = tf / freq_norm;
    const double spread = static_cast<double>(st.sentence_positions.size()) / static_cast<double>(sentence_count);
    const double casing = static_cast<double>(std::max(st.tf_acronym, st.tf_proper)) / (1.0 + std::log(tf));
    const double position = std::log(std::log(3.0 + median(st.sentence_positions)));
    st.score = (position * relatedness) / (casing + frequency / relatedness + spread / relatedness);
  }

  std::vector<ScoredTerm> scored;
  for (const auto& [key, cand] : candidates) {
    if (!cand.valid) continue;
    const auto& first = terms.at(cand.terms.front());
    const auto& last = terms.at(cand.terms.back());
    if (first.stopword || last.stopword) continue;
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < cand.terms.size(); ++i) {
      const auto& st = terms.at(cand.terms[i]);
      if (!st.stopword) {
        sum += st.score;
        prod *= st.score;
        continue;
      }
      // Interior stopword: weight by how strongly it binds its neighbours.
      const auto& prev = terms.at(cand.terms[i - 1]);
      const auto& next = terms.at(cand.terms[i + 1]);
      double p_left = 0.0;
      if (auto it = prev.out_edges.find(cand.terms[i]); it != prev.out_edges.end()) {
        p_left = static_cast<double>(it->second) / static_cast<double>(prev.tf);
      }
      double p_right = 0.0;
      if (auto it = st.out_edges.find(cand.terms[i + 1]); it != st.out_edges.end()) {
        p_right = static_cast<double>(it->second) / static_cast<double>(next.tf);
      }
      const double bind = p_left * p_right;
      prod *= 1.0 + (1.0 - bind);
      sum -= 1.0 - bind;
    }
    scored.push_back({key, prod / ((sum + 1.0) * static_cast<double>(cand.tf))});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.term < b.term;
  });

  std::vector<ScoredTerm> out;
  for (auto& cand : scored) {
    if (out.size() >= options.top_n) break;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const ScoredTerm& kept) {
      return edit_similarity(kept.term, cand.term) > options.dedup_threshold;
    });
    if (!duplicate) out.push_back(std::move(cand));
  }
  return out;
}

double TfidfTable::weight(const std::string& term, const std::string& set_id) const {
  const auto t = std::find(terms_.begin(), terms_.end(), term);
  const auto s = std::find(set_ids_.begin(), set_ids_.end(), set_id);
  if (t == terms_.end() || s == set_ids_.end()) return 0.0;
  return weight(static_cast<std::size_t>(t - terms_.begin()), static_cast<std::size_t>(s - set_ids_.begin()));
}

TfidfTable tfidf(const std::vector<std::pair<std::string, std::string>>& sets,
                 const std::vector<std::string>& vocabulary) {
  if (sets.size() < 2) throw PreconditionError("TF-IDF across sets needs at least two sets");
  if (vocabulary.empty()) throw PreconditionError("keyword vocabulary is empty");

  TfidfTable table;
  const std::size_t n = sets.size();
  for (const auto& [id, body] : sets) table.set_ids_.push_back(id);
  table.terms_ = vocabulary;
  table.tf_.assign(vocabulary.size() * n, 0);
  table.df_.assign(vocabulary.size(), 0);
  table.weights_.assign(vocabulary.size() * n, 0.0);

  std::vector<std::vector<std::string>> patterns;
  patterns.reserve(vocabulary.size());
  for (const auto& term : vocabulary) patterns.push_back(text::word_tokens(term));

  for (std::size_t s = 0; s < n; ++s) {
    const auto tokens = text::word_tokens(sets[s].second);
    std::unordered_map<std::string, std::vector<std::size_t>> starts;
    for (std::size_t i = 0; i < tokens.size(); ++i) starts[tokens[i]].push_back(i);
    for (std::size_t t = 0; t < patterns.size(); ++t) {
      const auto& pat = patterns[t];
      if (pat.empty()) continue;
      auto it = starts.find(pat.front());
      if (it == starts.end()) continue;
      std::size_t count = 0;
      for (std::size_t pos : it->second) {
        if (pos + pat.size() > tokens.size()) continue;
        if (std::equal(pat.begin(), pat.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos))) ++count;
      }
      table.tf_[t * n + s] = count;
      if (count > 0) ++table.df_[t];
    }
  }
  for (std::size_t t = 0; t < vocabulary.size(); ++t) {
    if (table.df_[t] == 0) throw PreconditionError("keyword '" + vocabulary[t] + "' occurs in no set");
    const double idf = std::log(static_cast<double>(n) / static_cast<double>(table.df_[t]));
    for (std::size_t s = 0; s < n; ++s) table.weights_[t * n + s] = static_cast<double>(table.tf_[t * n + s]) * idf;
  }
  return table;
}

KeywordSet top_m(const KeywordSet& set, std::size_t m) {
  if (m < 1) throw PreconditionError("m must be at least 1");
  KeywordSet out = set;
  std::sort(out.keywords.begin(), out.keywords.end(), [](const Keyword& a, const Keyword& b) {
    if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
    if (a.yake_score != b.yake_score) return a.yake_score < b.yake_score;
    return a.term < b.term;
  });
  if (out.keywords.size() > m) out.keywords.resize(m);
  return out;
}

std::vector<KeywordSet> represent_sets(const std::vector<DocumentSet>& sets, const KeywordConfig& config) {
  std::vector<std::pair<std::string, std::string>> concatenated;
  std::vector<std::map<std::string, double>> extracted(sets.size());
  std::map<std::string, double> best_score;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    std::vector<std::string> texts;
    std::string joined;
    for (const auto& [id, body] : sets[s].docs) {
      texts.push_back(body);
      joined += body;
      joined += '\n';
    }
    concatenated.emplace_back(sets[s].set_id, std::move(joined));
    if (texts.empty()) continue;
    for (auto& kw : extract_keywords(texts, config.extract)) {
      extracted[s][kw.term] = kw.score;
      auto [it, inserted] = best_score.emplace(kw.term, kw.score);
      if (!inserted) it->second = std::min(it->second, kw.score);
    }
  }

  std::vector<KeywordSet> out(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) {
    out[s].set_id = sets[s].set_id;
    for (const auto& [id, body] : sets[s].docs) out[s].source_doc_ids.push_back(id);
  }
  if (best_score.empty()) return out;

  std::vector<std::string> vocabulary;
  for (const auto& [term, score] : best_score) vocabulary.push_back(term);
  const auto table = tfidf(concatenated, vocabulary);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t t = 0; t < vocabulary.size(); ++t) {
      if (table.tf(t, s) == 0) continue;
      const auto own = extracted[s].find(vocabulary[t]);
      const double yake = own != extracted[s].end() ? own->second : best_score.at(vocabulary[t]);
      out[s].keywords.push_back({vocabulary[t], yake, table.weight(t, s)});
    }
    out[s] = top_m(out[s], config.m);
  }
  return out;
}

std::string keyword_csv(const std::vector<KeywordSet>& sets) {
  std::string csv = io::csv_row({"set_id", "term", "yake_score", "tfidf"});
  for (const auto& set : sets) {
    for (const auto& kw : set.keywords) {
      csv += io::csv_row({set.set_id, kw.term, io::format_double(kw.yake_score), io::format_double(kw.tfidf)});
    }
  }
  return csv;
}

}  // namespace redsense::keywords
