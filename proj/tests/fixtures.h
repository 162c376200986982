#ifndef COTYPE_TESTS_FIXTURES_H_
#define COTYPE_TESTS_FIXTURES_H_

#include <filesystem>
#include <string>
#include <vector>

#include "cotype/corpus.h"
#include "cotype/kb.h"
#include "cotype/util.h"

namespace cotype::testing {

// Toy hierarchy: person/{politician, artist}, location/{city,
// country}, organization; five relation types.
inline TypeHierarchy toy_hierarchy() {
  return TypeHierarchy::build({{"person", "ROOT", 1},
                               {"politician", "person", 2},
                               {"artist", "person", 3},
                               {"location", "ROOT", 4},
                               {"city", "location", 5},
                               {"country", "location", 6},
                               {"organization", "ROOT", 7}},
                              {"born_in", "president_of", "citizen_of", "travel_to", "visit"});
}

inline KnowledgeBase toy_kb() {
  std::vector<KnowledgeBase::RawEntity> entities = {
      {"e_obama", "Barack Obama", {"Barack Obama", "Obama", "Mr. Obama"}, {"person", "politician", "artist"}, 1},
      {"e_usa", "United States", {"United States", "USA", "US"}, {"location", "country"}, 2},
      {"e_honolulu", "Honolulu", {"Honolulu"}, {"location", "city"}, 3},
  };
  std::vector<KnowledgeBase::RawRelation> relations = {
      {"born_in", "e_obama", "e_usa", 1},
      {"president_of", "e_obama", "e_usa", 2},
      {"citizen_of", "e_obama", "e_usa", 3},
      {"travel_to", "e_obama", "e_usa", 4},
      {"visit", "e_obama", "e_usa", 5},
  };
  return KnowledgeBase::build(toy_hierarchy(), std::move(entities), relations);
}

// Builds a one-document corpus from whitespace-separated `word/TAG` items,
// one string per sentence.
inline Corpus corpus_from(const std::vector<std::string>& sentences, const std::string& doc = "d0") {
  std::vector<std::vector<Token>> out;
  for (const auto& s : sentences) {
    std::vector<Token> tokens;
    for (const auto& item : split(s, ' ')) {
      if (item.empty()) continue;
      const auto slash = item.rfind('/');
      tokens.push_back({item.substr(0, slash), item.substr(slash + 1)});
    }
    out.push_back(std::move(tokens));
  }
  Corpus c;
  c.add_document(doc, std::move(out));
  return c;
}

// The running example sentence used for the relation feature templates.
inline Corpus running_example() {
  return corpus_from({"Honolulu/NNP native/JJ Barack/NNP Obama/NNP was/VBD elected/VBN President/NNP of/IN the/DT "
                      "United/NNP States/NNP on/IN March/NNP 20/CD in/IN 2008/CD ./."});
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("cotype-" + tag + "-" + std::to_string(reinterpret_cast<uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    write_file(file(name), content);
    return file(name);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cotype::testing

#endif  // COTYPE_TESTS_FIXTURES_H_
