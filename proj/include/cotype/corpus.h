#ifndef COTYPE_CORPUS_H_
#define COTYPE_CORPUS_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cotype {

struct Token {
  std::string text;
  std::string pos;
};

// Half-open token range [start, end) inside one sentence.
struct Span {
  uint32_t start = 0;
  uint32_t end = 0;

  uint32_t size() const { return end - start; }
  bool overlaps(const Span& o) const { return start < o.end && o.start < end; }
  auto operator<=>(const Span&) const = default;
};

struct Sentence {
  std::string doc_id;
  uint32_t index = 0;  // position within its document
  std::vector<Token> tokens;

  std::string surface(Span span) const;
  std::string pos_pattern(Span span) const;
};

struct Document {
  std::string id;
  size_t first_sentence = 0;
  size_t num_sentences = 0;
};

// POS-tagged corpus: documents of sentences of tokens. Immutable once built;
// sentences are addressed by a dense global index.
class Corpus {
 public:
  // Format: `text<TAB>pos` per line, blank line ends a sentence, a line
  // `-DOCSTART- <doc_id>` begins a document, `#` lines are not special.
  static Corpus parse(std::string_view content, const std::string& source = "<corpus>");
  static Corpus load(const std::string& path);
  std::string serialize() const;

  void add_document(const std::string& id, std::vector<std::vector<Token>> sentences);

  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& sentence(size_t i) const { return sentences_.at(i); }
  const std::vector<Document>& documents() const { return documents_; }
  size_t num_sentences() const { return sentences_.size(); }
  size_t num_tokens() const { return num_tokens_; }
  size_t dropped_empty_sentences() const { return dropped_empty_; }
  std::optional<size_t> find_sentence(std::string_view doc_id, uint32_t index) const;

 private:
  std::vector<Sentence> sentences_;
  std::vector<Document> documents_;
  std::map<std::string, size_t, std::less<>> doc_index_;
  size_t num_tokens_ = 0;
  size_t dropped_empty_ = 0;
};

struct ContextWindow {
  std::span<const Token> left;
  std::span<const Token> right;
};

// Up to k tokens on each side of span, truncated at the sentence boundary.
// Throws InputError when the span is outside the sentence.
ContextWindow window(const Sentence& sentence, Span span, size_t k);

}  // namespace cotype

#endif  // COTYPE_CORPUS_H_
