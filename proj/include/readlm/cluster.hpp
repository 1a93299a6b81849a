#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "readlm/common.hpp"
#include "readlm/text.hpp"

namespace readlm::cluster {

struct KMeansModel {
    Mat centroids;  // K x d
    int k = 0;
};

// Per-iteration diagnostics. sse_per_iter[i] is the within-cluster sum of
// squared distances after iteration i's centroid update; the sequence is
// non-increasing.
struct KMeansTrace {
    std::vector<double> sse_per_iter;
    int iterations = 0;
    bool converged = false;
};

// Lloyd iterations from k-means++ seeding until the assignment reaches a
// fixpoint or max_iters. Empty clusters are repaired by re-seeding them at
// the point farthest from its assigned centroid. Deterministic given seed.
KMeansModel kmeans_fit(const Mat& points, int k, int max_iters, std::uint64_t seed,
                       KMeansTrace* trace = nullptr);

// Runs kmeans_fit with seeds seed, seed+1, ... and keeps the lowest-SSE
// model (ties: earliest restart).
KMeansModel kmeans_fit_best(const Mat& points, int k, int max_iters, std::uint64_t seed,
                            int restarts, KMeansTrace* trace = nullptr);

// Index of the nearest centroid by squared Euclidean distance; ties break
// to the lowest index.
int kmeans_assign(std::span<const double> v, const KMeansModel& model);

double kmeans_sse(const Mat& points, const KMeansModel& model);

// Same text format as embeddings, with synthetic names centroid_0..K-1.
void save_kmeans(const KMeansModel& model, const std::filesystem::path& path,
                 const std::string& header_comment = {});
KMeansModel load_kmeans(const std::filesystem::path& path);

struct BrownModel {
    std::unordered_map<std::string, int> class_of;  // word -> 0..k-1
    int k = 0;
    // Initial singleton classes in descending-frequency order (ties
    // lexicographic); merges are (kept, absorbed) pairs of initial ids.
    std::vector<std::string> initial_words;
    std::vector<std::pair<int, int>> merges;
};

// Average mutual information between adjacent class pairs,
// I = sum_{c1,c2} p(c1,c2) ln[p(c1,c2) / (p_l(c1) p_r(c2))], from bigram
// counts over document-internal adjacent token pairs. Zero-count pairs
// contribute 0. Classes run over 0..max id in the map; the sum iterates c1
// then c2 in ascending order. A corpus word missing from the map is an
// error naming the word.
double brown_quality(const text::Corpus& corpus,
                     const std::unordered_map<std::string, int>& class_of);

// Greedy agglomerative merging from singleton classes (words with count >=
// min_count) down to k classes, each step merging the pair with the
// smallest quality loss (ties: lowest id pair). Tokens below min_count are
// dropped before bigram counting. Surviving classes are relabeled 0..k-1
// in order of their smallest initial id.
BrownModel brown_fit(const text::Corpus& corpus, int k, std::int64_t min_count = 1);

// Stored class id; unseen words raise OovError.
int brown_assign(const std::string& word, const BrownModel& model);

// TSV `word<TAB>class_id`, one line per word in initial_words order. If
// merges_path is nonempty, the merge history goes there as
// `kept<TAB>absorbed<TAB>kept_word<TAB>absorbed_word`.
void save_brown(const BrownModel& model, const std::filesystem::path& path,
                const std::filesystem::path& merges_path = {},
                const std::string& header_comment = {});
BrownModel load_brown(const std::filesystem::path& path);

}  // namespace readlm::cluster
