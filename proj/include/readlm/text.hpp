#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "readlm/common.hpp"

namespace readlm::text {

// A preprocessed document: lowercase tokens, optional readability label in
// grade-level units.
struct Document {
    std::string id;
    std::vector<std::string> tokens;
    std::optional<double> label;
};

struct Corpus {
    std::string name;
    std::vector<Document> documents;
};

// The five grade bands and their numeric regression targets.
inline constexpr double kGradeBandLabels[] = {2.5, 4.5, 7.0, 9.5, 11.5};

class StopwordList {
  public:
    StopwordList() = default;

    // Entries are lowercased; empty strings are dropped.
    static StopwordList from_words(std::span<const std::string> words);
    static StopwordList from_file(const std::filesystem::path& path);
    static StopwordList builtin_english();

    bool contains(const std::string& word) const { return words_.count(word) > 0; }
    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

  private:
    std::unordered_set<std::string> words_;
};

// The bundled English stopword list (see data/stopwords_en.txt).
std::span<const std::string_view> builtin_stopwords();

// Lowercases, drops URL tokens (http://, https://, www. prefixes), strips
// punctuation, then drops currency-prefixed and all-digit tokens. Splits on
// Unicode whitespace; empty input yields an empty list.
std::vector<std::string> tokenize(std::string_view raw_text);

// Order-preserving filter; expects lowercase tokens.
std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stops);

// Loads every .txt file in `directory` (sorted by filename, one document per
// file, id = filename) through tokenize + remove_stopwords. The optional
// manifest is a headerless TSV of `filename<TAB>label`; a row naming a
// missing file is a validation error.
Corpus load_corpus(const std::filesystem::path& directory,
                   const std::optional<std::filesystem::path>& label_manifest = {},
                   const StopwordList& stops = {});

}  // namespace readlm::text
