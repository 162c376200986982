#include "cotype/corpus.h"

#include <algorithm>

#include "cotype/util.h"

namespace cotype {
namespace {
constexpr std::string_view kDocStart = "-DOCSTART-";
}

std::string Sentence::surface(Span span) const {
  std::string out;
  for (uint32_t i = span.start; i < span.end; ++i) {
    if (i > span.start) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

std::string Sentence::pos_pattern(Span span) const {
  std::string out;
  for (uint32_t i = span.start; i < span.end; ++i) {
    if (i > span.start) out.push_back(' ');
    out += tokens[i].pos;
  }
  return out;
}

Corpus Corpus::parse(std::string_view content, const std::string& source) {
  Corpus corpus;
  std::string doc_id;
  bool have_doc = false;
  std::vector<std::vector<Token>> doc_sentences;
  std::vector<Token> current;
  bool after_docstart = false;

  auto flush_doc = [&] {
    if (have_doc) corpus.add_document(doc_id, std::move(doc_sentences));
    doc_sentences.clear();
  };

  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.rfind(kDocStart, 0) == 0) {
      if (!current.empty()) doc_sentences.push_back(std::move(current));
      current.clear();
      flush_doc();
      doc_id = std::string(trim(line.substr(kDocStart.size())));
      if (doc_id.empty()) throw InputError(source + ":" + std::to_string(line_no) + ": -DOCSTART- without doc id");
      have_doc = true;
      after_docstart = true;
      continue;
    }
    if (trim(line).empty()) {
      if (!current.empty()) {
        doc_sentences.push_back(std::move(current));
        current.clear();
      } else if (!after_docstart) {
        ++corpus.dropped_empty_;
      }
      after_docstart = false;
      continue;
    }
    after_docstart = false;
    auto cols = split(line, '\t');
    if (cols.size() != 2 || trim(cols[0]).empty() || trim(cols[1]).empty()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected `text<TAB>pos`, got \"" +
                       std::string(line) + "\"");
    }
    if (!have_doc) {
      doc_id = "0";
      have_doc = true;
    }
    current.push_back({cols[0], cols[1]});
  }
  if (!current.empty()) doc_sentences.push_back(std::move(current));
  flush_doc();
  if (corpus.sentences_.empty()) throw InputError(source + ": empty corpus");
  return corpus;
}

Corpus Corpus::load(const std::string& path) { return parse(read_file(path), path); }

std::string Corpus::serialize() const {
  std::string out;
  for (const auto& doc : documents_) {
    out += kDocStart;
    out += ' ';
    out += doc.id;
    out += "\n\n";
    for (size_t s = doc.first_sentence; s < doc.first_sentence + doc.num_sentences; ++s) {
      for (const auto& tok : sentences_[s].tokens) {
        out += tok.text;
        out += '\t';
        out += tok.pos;
        out += '\n';
      }
      out += '\n';
    }
  }
  return out;
}

void Corpus::add_document(const std::string& id, std::vector<std::vector<Token>> sentences) {
  if (doc_index_.count(id)) throw InputError("duplicate document id " + id);
  Document doc{id, sentences_.size(), 0};
  uint32_t index = 0;
  for (auto& tokens : sentences) {
    if (tokens.empty()) {
      ++dropped_empty_;
      continue;
    }
    num_tokens_ += tokens.size();
    sentences_.push_back({id, index++, std::move(tokens)});
    ++doc.num_sentences;
  }
  doc_index_.emplace(id, documents_.size());
  documents_.push_back(std::move(doc));
}

std::optional<size_t> Corpus::find_sentence(std::string_view doc_id, uint32_t index) const {
  auto it = doc_index_.find(doc_id);
  if (it == doc_index_.end()) return std::nullopt;
  const auto& doc = documents_[it->second];
  if (index >= doc.num_sentences) return std::nullopt;
  return doc.first_sentence + index;
}

ContextWindow window(const Sentence& sentence, Span span, size_t k) {
  const size_t n = sentence.tokens.size();
  if (span.start >= span.end || span.end > n) {
    throw InputError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                     ") outside sentence of length " + std::to_string(n));
  }
  const size_t left_begin = span.start > k ? span.start - k : 0;
  const size_t right_end = std::min(n, static_cast<size_t>(span.end) + k);
  std::span<const Token> all(sentence.tokens);
  return {all.subspan(left_begin, span.start - left_begin), all.subspan(span.end, right_end - span.end)};
}

}  // namespace cotype
