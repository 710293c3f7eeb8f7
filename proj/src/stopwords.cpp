#include "redsense/text.hpp"

namespace redsense::text {

const StopwordSet& default_stopwords() {
  static const StopwordSet words{
    "a", "about", "above", "after", "again", "against", "all", "almost", "alone", "along",
    "already", "also", "although", "always", "am", "among", "an", "and", "another", "any",
    "anybody", "anyone", "anything", "anywhere", "are", "aren't", "around", "as", "at", "back",
    "be", "became", "because", "become", "becomes", "been", "before", "behind", "being",
    "below", "between", "both", "but", "by", "can", "can't", "cannot", "could", "couldn't",
    "did", "didn't", "do", "does", "doesn't", "doing", "don't", "done", "down", "during",
    "each", "either", "else", "enough", "etc", "even", "ever", "every", "everyone",
    "everything", "few", "for", "from", "further", "get", "gets", "getting", "give", "given",
    "go", "goes", "going", "got", "had", "hadn't", "has", "hasn't", "have", "haven't", "having",
    "he", "he'd", "he'll", "he's", "her", "here", "here's", "hers", "herself", "him", "himself",
    "his", "how", "how's", "however", "i", "i'd", "i'll", "i'm", "i've", "if", "in", "into",
    "is", "isn't", "it", "it's", "its", "itself", "just", "keep", "know", "let's", "like",
    "made", "make", "many", "may", "me", "might", "more", "most", "much", "must", "mustn't",
    "my", "myself", "need", "never", "no", "nor", "not", "now", "of", "off", "often", "on",
    "once", "one", "only", "or", "other", "others", "otherwise", "ought", "our", "ours",
    "ourselves", "out", "over", "own", "per", "perhaps", "please", "put", "quite", "rather",
    "really", "said", "same", "say", "says", "see", "seem", "seemed", "seems", "several",
    "shall", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't", "since", "so",
    "some", "something", "sometimes", "still", "such", "take", "than", "that", "that's", "the",
    "their", "theirs", "them", "themselves", "then", "there", "there's", "these", "they",
    "they'd", "they'll", "they're", "they've", "thing", "things", "think", "this", "those",
    "though", "through", "thus", "to", "too", "toward", "towards", "under", "until", "up",
    "upon", "us", "use", "used", "very", "via", "want", "was", "wasn't", "way", "we", "we'd",
    "we'll", "we're", "we've", "well", "were", "weren't", "what", "what's", "when", "when's",
    "where", "where's", "whether", "which", "while", "who", "who's", "whom", "whose", "why",
    "why's", "will", "with", "within", "without", "won't", "would", "wouldn't", "yes", "yet",
    "you", "you'd", "you'll", "you're", "you've", "your", "yours", "yourself", "yourselves",
  };
  return words;
}

}  // namespace redsense::text
