#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "readlm/cluster.hpp"
#include "readlm/common.hpp"
#include "readlm/embed.hpp"
#include "readlm/text.hpp"

namespace readlm::featurize {

enum class Scheme { HistogramCount, HistogramBinary, PooledUniform, PooledTfidf, Bow };

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct FeatureVector {
    std::vector<double> values;
    Scheme scheme = Scheme::HistogramCount;
};

class IdfTable {
  public:
    IdfTable() = default;
    // idf(w) = ln(N / df(w)). Corpus must be nonempty.
    static IdfTable build(const text::Corpus& corpus);

    // Unseen words fall back to ln(N / 1).
    double value(const std::string& word) const;
    std::size_t document_count() const { return n_docs_; }

  private:
    std::unordered_map<std::string, double> idf_;
    std::size_t n_docs_ = 0;
};

// Maps a token to a cluster id, or nullopt to skip it (the OOV policy
// lives in the assigner, not the histogram).
using WordAssigner = std::function<std::optional<int>(const std::string&)>;

// Length-K membership histogram; count mode tallies tokens per cluster,
// binary mode flags nonempty bins. An empty document gives a zero vector.
FeatureVector cluster_histogram(const text::Document& doc, const WordAssigner& assign, int k,
                                bool binary);

// v / ||v||2; the zero vector passes through unchanged.
FeatureVector unit_normalize(const FeatureVector& v);

// Auto: count histograms and bag-of-words are unit-normalized (their scale
// tracks document length); binary histograms and pooled vectors pass
// through raw.
enum class Normalize { Auto, On, Off };

std::string_view normalize_name(Normalize mode);
Normalize parse_normalize(std::string_view name);
bool should_normalize(Scheme scheme, Normalize mode);

// Weighted mean of in-model token vectors. Uniform: weight 1 per token
// occurrence. Tfidf: weight tf(w, doc) * idf(w) once per distinct word, in
// first-occurrence order. A document with no in-model tokens is an error.
FeatureVector pooled_feature(const text::Document& doc, const embed::EmbeddingModel& model,
                             Scheme weighting, const IdfTable* idf = nullptr);

// Length-V count vector over the vocabulary; OOV tokens dropped.
FeatureVector bow_feature(const text::Document& doc, const embed::Vocabulary& vocab);

// Skip-gram models skip OOV tokens; char-ngram models assign every token
// through its n-gram vector.
WordAssigner make_kmeans_assigner(const cluster::KMeansModel& kmeans,
                                  const embed::EmbeddingModel& embeddings);
// Brown models skip OOV tokens.
WordAssigner make_brown_assigner(const cluster::BrownModel& brown);

struct FeatureRow {
    std::string doc_id;
    std::optional<double> label;  // nullopt serializes as NA
    std::vector<double> values;
};

struct FeatureFile {
    Scheme scheme = Scheme::HistogramCount;
    std::vector<FeatureRow> rows;
};

// TSV, one row per document: `doc_id<TAB>label_or_NA<TAB>v1,v2,...`. The
// scheme rides in a leading comment.
void save_features(const FeatureFile& features, const std::filesystem::path& path,
                   const std::string& header_comment = {});
FeatureFile load_features(const std::filesystem::path& path);

}  // namespace readlm::featurize
