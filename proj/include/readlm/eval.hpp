#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "readlm/common.hpp"
#include "readlm/embed.hpp"
#include "readlm/featurize.hpp"
#include "readlm/text.hpp"

namespace readlm::eval {

// Sum of cross-deviations over the root of the deviation products. Inputs
// must have equal length >= 2 and nonzero variance on both sides.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson over rank vectors; ties get average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks, ties averaged: (1,5,5,9) -> (1, 2.5, 2.5, 4).
std::vector<double> average_ranks(std::span<const double> x);

// Permutes documents by seed; the first ceil(fraction * N) go to train,
// the rest to test. train_count overrides the ceiling rule when set. A
// split leaving either side empty is an error.
std::pair<text::Corpus, text::Corpus> split_train_test(
    const text::Corpus& corpus, double fraction, std::uint64_t seed,
    std::optional<std::size_t> train_count = std::nullopt);

enum class FeaturePath { HistKmeans, HistBrown, PooledUniform, PooledTfidf, Bow };

std::string_view feature_path_name(FeaturePath path);
FeaturePath parse_feature_path(std::string_view name);

struct ExperimentConfig {
    embed::TrainConfig embedding;
    FeaturePath path = FeaturePath::HistKmeans;
    int cluster_k = 50;
    int kmeans_max_iters = 100;
    int kmeans_restarts = 5;
    std::int64_t brown_min_count = 1;
    bool binary_histogram = false;
    featurize::Normalize normalize = featurize::Normalize::Auto;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double train_fraction = 0.8;
    std::optional<std::size_t> train_count;
    std::uint64_t seed = 1;
};

struct Prediction {
    std::string doc_id;
    double label = 0.0;
    double predicted = 0.0;
};

struct EvalReport {
    double spearman = 0.0;
    double pearson = 0.0;
    std::vector<Prediction> predictions;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::uint64_t seed = 0;
    // Flattened config snapshot plus the per-stage seeds, in key order.
    std::map<std::string, std::string> config;

    std::string to_text() const;
    // Stable field order, no timestamps: reruns are byte-identical.
    std::string to_json() const;
};

// split -> train embeddings and clusters on the training side -> featurize
// both sides -> svr_train -> svr_predict -> correlations. Every stochastic
// stage draws its seed from the root seed and the report records them.
EvalReport run_readability_experiment(const text::Corpus& corpus,
                                      const ExperimentConfig& config);

struct SentencePair {
    std::string ordinary;
    std::string simple;
};

struct SentencePairSet {
    std::vector<SentencePair> pairs;

    // TSV `ordinary<TAB>simple`, one pair per line; # comments and blank
    // lines skipped.
    static SentencePairSet load_tsv(const std::filesystem::path& path);
};

enum class MatchDistance { Euclidean, Cosine };

std::string_view distance_name(MatchDistance distance);
MatchDistance parse_distance(std::string_view name);

struct MatchReport {
    std::vector<double> p_at_n;  // p_at_n[i] = P_{i+1}
    std::size_t sampled = 0;     // pairs scored after drops
    std::size_t dropped = 0;     // pairs with an unembeddable side
    std::uint64_t seed = 0;
    MatchDistance distance = MatchDistance::Euclidean;

    std::string to_text() const;
    std::string to_json() const;
};

// Samples sample_n pairs by seed, average-pools each sentence's in-model
// token vectors, and ranks every sampled simple sentence against each
// ordinary sentence (distance ties break toward the lower candidate
// index). P_N is the fraction of pairs whose counterpart ranks in the top
// N; it is non-decreasing in N. Pairs with a side that has no in-model
// tokens are dropped and counted.
MatchReport run_matching_experiment(const SentencePairSet& pairs, std::size_t sample_n,
                                    int n_max, const embed::EmbeddingModel& model,
                                    std::uint64_t seed,
                                    MatchDistance distance = MatchDistance::Euclidean,
                                    const text::StopwordList* stopwords = nullptr);

}  // namespace readlm::eval
