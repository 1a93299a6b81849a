#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "readlm/common.hpp"
#include "readlm/text.hpp"

namespace readlm::embed {

enum class ModelKind { SkipGram, CharNgram, PvDbow };

std::string_view kind_name(ModelKind kind);
ModelKind parse_kind(std::string_view name);

// Frequency-filtered word index. Indices are dense 0..V-1, assigned by
// descending count with lexicographic tie-break.
class Vocabulary {
  public:
    Vocabulary() = default;

    // Throws ValidationError if no word reaches min_count.
    static Vocabulary build(const text::Corpus& corpus, std::int64_t min_count);

    // Vocabulary recovered from a model file; counts are unknown (zero) and
    // indices follow file order.
    static Vocabulary from_words(std::vector<std::string> words);

    std::size_t size() const { return words_.size(); }
    std::optional<int> index_of(const std::string& word) const;
    const std::string& word(int index) const { return words_[index]; }
    std::int64_t count(int index) const { return counts_[index]; }
    // Number of trainable corpus tokens (sum of retained counts).
    std::int64_t total_tokens() const { return total_tokens_; }

  private:
    std::vector<std::string> words_;
    std::vector<std::int64_t> counts_;
    std::unordered_map<std::string, int> index_;
    std::int64_t total_tokens_ = 0;
};

struct TrainConfig {
    int dimension = 100;
    int context_window = 5;
    int negatives = 5;
    int epochs = 5;
    double lr_initial = 0.025;
    double lr_final = 1e-4;
    std::int64_t min_count = 1;
    std::uint64_t seed = 1;
    ModelKind kind = ModelKind::SkipGram;
    int ngram_min = 3;
    int ngram_max = 6;
    // 1 = deterministic single-threaded contract; >1 = lock-free parallel
    // workers with benign races (results vary run to run).
    int threads = 1;

    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct EmbeddingModel {
    Vocabulary vocab;
    Mat input_vectors;   // V x d word vectors (char-ngram: cached n-gram sums)
    Mat output_vectors;  // V x d context vectors
    int dimension = 0;
    ModelKind kind = ModelKind::SkipGram;

    // Char-ngram models only. The index map is exact (no hashing).
    std::map<std::string, int> ngram_index;
    Mat ngram_vectors;  // G x d
    int ngram_min = 0;
    int ngram_max = 0;

    // True if word_vector() can produce a vector for this word.
    bool has_vector(const std::string& word) const;
};

// Character n-grams of the word wrapped in '<' and '>', lengths
// n_min..n_max, plus the whole wrapped word as a special token. Words
// shorter than n_min still yield the whole-word token.
std::set<std::string> ngram_set(const std::string& word, int n_min, int n_max);

// Skip-gram: the input vector row (OOV is an error). Char-ngram: the sum of
// n-gram vectors over ngram_set, defined for any nonempty word; n-grams
// absent from the model contribute nothing.
std::vector<double> word_vector(const std::string& word, const EmbeddingModel& model);

// Full softmax p(context|center) under the model's scoring function. The
// distribution over the whole vocabulary sums to 1.
double softmax_prob(const std::string& center, const std::string& context,
                    const EmbeddingModel& model);
std::vector<double> softmax_distribution(const std::string& center,
                                         const EmbeddingModel& model);

// Negative-sampling loss and analytic gradient for one training step:
// L = -log sigmoid(s_pos) - sum_neg log sigmoid(-s_neg), s_t = center . target_t.
// Row 0 of `targets` is the positive context (label 1), the rest negatives
// (label 0). The SGD trainer applies exactly these gradients.
struct NsGradient {
    double loss = 0.0;
    std::vector<double> d_center;
    Mat d_targets;
};
NsGradient ns_loss_grad(std::span<const double> center, const Mat& targets,
                        std::span<const double> labels);

// Draws negatives from the unigram distribution raised to the 3/4 power.
class NegativeSampler {
  public:
    explicit NegativeSampler(const Vocabulary& vocab);
    int sample(std::mt19937_64& rng) const;

  private:
    std::vector<double> cumulative_;
};

// Skip-gram or char-ngram training by SGD on the negative-sampling
// objective over all (center, context) pairs within the window, with
// linearly decaying learning rate. Deterministic given seed when
// config.threads == 1.
EmbeddingModel train(const text::Corpus& corpus, const TrainConfig& config);

struct ParagraphVectors {
    std::vector<std::string> doc_ids;
    Mat vectors;  // one row per document
};

// PV-DBOW: a per-document token predicts words sampled from that document.
// Each position of a document is one step; every step samples
// config.context_window target words from the document.
ParagraphVectors train_pvdbow(const text::Corpus& corpus, const TrainConfig& config);

// Weighted mean: sum(w_i v_i) / sum(w_i). Errors on empty input, length
// mismatch, negative or all-zero weights.
std::vector<double> pool(const std::vector<std::vector<double>>& vectors,
                         const std::vector<double>& weights);

// Text persistence: optional leading '#' comment lines, then `V d` and one
// `word v1 .. vd` line per word. Char-ngram models append a `#ngrams G d`
// section. Plain `V d` files from other tools load as skip-gram models.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path,
                const std::string& header_comment = {});
EmbeddingModel load_model(const std::filesystem::path& path);

void save_paragraph_vectors(const ParagraphVectors& pv, const std::filesystem::path& path,
                            const std::string& header_comment = {});

}  // namespace readlm::embed
