#pragma once

// Statistical keyword extraction (YAKE-style) and TF-IDF weighting across
// document sets.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "redsense/text.hpp"

namespace redsense::keywords {

struct ScoredTerm {
  std::string term;  // lowercase, words joined by single spaces
  double score = 0;  // lower is more relevant
};

struct ExtractOptions {
  std::size_t max_ngram = 3;
  std::size_t top_n = 30;
  // Candidates whose Levenshtein similarity to a better-ranked candidate
  // exceeds this are dropped.
  double dedup_threshold = 0.9;
  const text::StopwordSet* stopwords = nullptr;  // nullptr: default list
};

// Scores every 1..max_ngram word sequence that does not cross punctuation,
// does not start or end with a stopword and contains no numeric or mixed
// alphanumeric token. Term statistics are aggregated over all documents;
// sentence positions are measured within each document, so the result does
// not depend on document order. Returns at most top_n terms, best first.
// Throws PreconditionError for an empty document list or max_ngram outside
// [1, 3].
std::vector<ScoredTerm> extract_keywords(const std::vector<std::string>& docs, const ExtractOptions& options = {});

// Normalized Levenshtein similarity 1 - distance / max(length) in [0, 1].
double edit_similarity(const std::string& a, const std::string& b);

// TF-IDF(w, j) = tf(w, j) * ln(n / df_w) where tf counts (token-level,
// case-insensitive) occurrences of the keyword in set j and df_w counts the
// sets containing it.
class TfidfTable {
 public:
  const std::vector<std::string>& set_ids() const { return set_ids_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t tf(std::size_t term, std::size_t set) const { return tf_[term * set_ids_.size() + set]; }
  std::size_t df(std::size_t term) const { return df_[term]; }
  double weight(std::size_t term, std::size_t set) const { return weights_[term * set_ids_.size() + set]; }
  // Lookup by name; 0 for an unknown term or set.
  double weight(const std::string& term, const std::string& set_id) const;

 private:
  friend TfidfTable tfidf(const std::vector<std::pair<std::string, std::string>>&, const std::vector<std::string>&);
  std::vector<std::string> set_ids_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> tf_;
  std::vector<std::size_t> df_;
  std::vector<double> weights_;
};

// sets: (set id, concatenated text); vocabulary: the union R of extracted
// keywords. Throws PreconditionError when fewer than two sets are given, R is
// empty, or some keyword occurs in no set.
TfidfTable tfidf(const std::vector<std::pair<std::string, std::string>>& sets,
                 const std::vector<std::string>& vocabulary);

struct Keyword {
  std::string term;
  double yake_score = 0;
  double tfidf = 0;
};

struct KeywordSet {
  std::string set_id;
  std::vector<Keyword> keywords;
  std::vector<std::string> source_doc_ids;
};

// The m keywords with the highest TF-IDF, ties by lower yake_score then term.
// Throws PreconditionError when m < 1.
KeywordSet top_m(const KeywordSet& set, std::size_t m);

struct DocumentSet {
  std::string set_id;
  std::vector<std::pair<std::string, std::string>> docs;  // (doc id, text)
};

struct KeywordConfig {
  ExtractOptions extract;
  std::size_t m = 10;
};

// Full set representation: per-set extraction, R = union of extracted terms,
// TF-IDF of every term of R across the sets, then the top m terms of R
// occurring in each set. A term that was not extracted from a set carries its
// best score among the sets it was extracted from.
std::vector<KeywordSet> represent_sets(const std::vector<DocumentSet>& sets, const KeywordConfig& config);

// CSV with header set_id,term,yake_score,tfidf.
std::string keyword_csv(const std::vector<KeywordSet>& sets);

}  // namespace redsense::keywords
