#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "readlm/embed.hpp"
#include "readlm/eval.hpp"
#include "readlm/text.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace readlm;
using eval::FeaturePath;
using eval::MatchDistance;
using testutil::TempDir;
using testutil::throws_with;
using testutil::write_file;

namespace {

// Definitional Pearson: explicit means, then the three deviation sums.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Midrank formula: rank_i = 1 + |{j: x_j < x_i}| + (|{j: x_j == x_i}| - 1)/2.
std::vector<double> rank_oracle(const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t less = 0, equal = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] < x[i]) ++less;
            if (x[j] == x[i]) ++equal;
        }
        out[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return out;
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, bool with_ties) {
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) {
        if (with_ties)
            v.push_back(static_cast<double>(rng() % 5));
        else
            v.push_back(uniform01(rng) * 10.0 - 5.0);
    }
    return v;
}

// Skip-gram model over `words` with the given 2-D vectors; anything not
// listed stays out of vocabulary.
embed::EmbeddingModel planar_model(const std::vector<std::string>& words,
                                   const std::vector<std::pair<double, double>>& vecs) {
    embed::EmbeddingModel m;
    m.vocab = embed::Vocabulary::from_words(words);
    m.dimension = 2;
    m.input_vectors = Mat(words.size(), 2);
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto idx = static_cast<std::size_t>(*m.vocab.index_of(words[i]));
        m.input_vectors.at(idx, 0) = vecs[i].first;
        m.input_vectors.at(idx, 1) = vecs[i].second;
    }
    m.output_vectors = Mat(words.size(), 2);
    return m;
}

eval::ExperimentConfig fast_experiment_config() {
    eval::ExperimentConfig cfg;
    cfg.embedding.dimension = 16;
    cfg.embedding.kind = embed::ModelKind::CharNgram;
    cfg.embedding.ngram_min = 2;
    cfg.embedding.ngram_max = 3;
    cfg.embedding.context_window = 3;
    cfg.embedding.negatives = 3;
    cfg.embedding.epochs = 3;
    cfg.path = FeaturePath::HistKmeans;
    cfg.cluster_k = 10;
    cfg.kmeans_restarts = 3;
    cfg.svr_c = 1.0;
    cfg.svr_epsilon = 0.1;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("pearson on perfectly linear data") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> up, down;
    for (double v : x) {
        up.push_back(2.0 * v + 1.0);
        down.push_back(-v);
    }
    CHECK(eval::pearson(x, up) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval::pearson(x, down) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson hand value 9/sqrt(84)") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {1.0, 2.0, 4.0};
    CHECK(eval::pearson(x, y) ==
          doctest::Approx(9.0 / std::sqrt(84.0)).epsilon(1e-12));
}

TEST_CASE("spearman hand values") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK(eval::spearman(x, {10.0, 20.0, 30.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval::spearman(x, {3.0, 2.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(eval::spearman(x, {1.0, 3.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("average_ranks uses midranks for ties") {
    const std::vector<double> x = {1.0, 5.0, 5.0, 9.0};
    CHECK(eval::average_ranks(x) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    CHECK(eval::average_ranks({7.0, 7.0, 7.0}) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(eval::average_ranks({4.0}) == std::vector<double>{1.0});
}

TEST_CASE("correlations agree with definitional oracles") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 2 + rng() % 19;
        const bool ties = trial % 2 == 0;
        const auto x = random_values(rng, n, ties);
        const auto y = random_values(rng, n, ties);
        const auto rx = rank_oracle(x);
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
        if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;

        CHECK(eval::pearson(x, y) ==
              doctest::Approx(pearson_oracle(x, y)).epsilon(1e-12));
        CHECK(eval::average_ranks(x) == rx);
        CHECK(eval::spearman(x, y) ==
              doctest::Approx(pearson_oracle(rank_oracle(x), rank_oracle(y)))
                  .epsilon(1e-12));
    }
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_values(rng, 12, false);
        const auto y = random_values(rng, 12, false);
        const double base = eval::spearman(x, y);
        std::vector<double> expy, cubey;
        for (double v : y) {
            expy.push_back(std::exp(v * 0.3));
            cubey.push_back(v * v * v);
        }
        CHECK(eval::spearman(x, expy) == doctest::Approx(base).epsilon(1e-12));
        CHECK(eval::spearman(x, cubey) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("pearson is invariant under positive affine transforms") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_values(rng, 10, false);
        const auto y = random_values(rng, 10, false);
        const double base = eval::pearson(x, y);
        std::vector<double> ay;
        for (double v : y) ay.push_back(3.7 * v - 12.0);
        CHECK(eval::pearson(x, ay) == doctest::Approx(base).epsilon(1e-11));
        std::vector<double> ax;
        for (double v : x) ax.push_back(0.02 * v + 5.0);
        CHECK(eval::pearson(ax, y) == doctest::Approx(base).epsilon(1e-11));
    }
}

TEST_CASE("correlation error contracts") {
    CHECK_THROWS_AS(eval::pearson({1.0, 2.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(eval::pearson({1.0}, {1.0}), ValidationError);
    CHECK(throws_with<NumericError>(
        [] { eval::pearson({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}); }, "zero variance"));
    CHECK(throws_with<NumericError>(
        [] { eval::spearman({1.0, 2.0, 3.0}, {5.0, 5.0, 5.0}); }, "zero variance"));
    CHECK_THROWS_AS(eval::pearson({1.0, std::nan("")}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("split_train_test follows the ceiling rule") {
    const auto corpus = testutil::synthetic_grade_corpus(34, 3, 0.8, 1);  // 170 docs
    text::Corpus n168 = corpus;
    n168.documents.resize(168);
    const auto [train, test] = eval::split_train_test(n168, 0.8, 5);
    CHECK(train.documents.size() == 135);
    CHECK(test.documents.size() == 33);

    text::Corpus n5 = corpus;
    n5.documents.resize(5);
    const auto [t5, v5] = eval::split_train_test(n5, 0.8, 5);
    CHECK(t5.documents.size() == 4);
    CHECK(v5.documents.size() == 1);
}

TEST_CASE("split is a seed-deterministic partition") {
    const auto corpus = testutil::synthetic_grade_corpus(4, 3, 0.8, 2);  // 20 docs
    const auto [a_train, a_test] = eval::split_train_test(corpus, 0.7, 99);
    const auto [b_train, b_test] = eval::split_train_test(corpus, 0.7, 99);

    REQUIRE(a_train.documents.size() == b_train.documents.size());
    for (std::size_t i = 0; i < a_train.documents.size(); ++i)
        CHECK(a_train.documents[i].id == b_train.documents[i].id);

    std::set<std::string> ids;
    for (const auto& d : a_train.documents) ids.insert(d.id);
    for (const auto& d : a_test.documents) ids.insert(d.id);
    CHECK(ids.size() == corpus.documents.size());
    for (const auto& d : corpus.documents) CHECK(ids.count(d.id) == 1);
}

TEST_CASE("split honors an explicit train count") {
    auto corpus = testutil::synthetic_grade_corpus(34, 3, 0.8, 3);
    corpus.documents.resize(168);
    const auto [train, test] = eval::split_train_test(corpus, 0.8, 5, 136);
    CHECK(train.documents.size() == 136);
    CHECK(test.documents.size() == 32);
}

TEST_CASE("split error contracts") {
    auto corpus = testutil::synthetic_grade_corpus(1, 3, 0.8, 4);  // 5 docs
    CHECK_THROWS_AS(eval::split_train_test(corpus, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(eval::split_train_test(corpus, 1.0, 1), ValidationError);
    CHECK(throws_with<ValidationError>(
        [&] { eval::split_train_test(corpus, 0.99, 1); }, "empty"));
    CHECK_THROWS_AS(eval::split_train_test(corpus, 0.5, 1, 5), ValidationError);
    CHECK_THROWS_AS(eval::split_train_test(corpus, 0.5, 1, 0), ValidationError);

    text::Corpus one;
    one.documents.push_back({"only.txt", {"a"}, 2.5});
    CHECK_THROWS_AS(eval::split_train_test(one, 0.5, 1), ValidationError);
}

TEST_CASE("readability experiment recovers band structure") {
    const auto corpus = testutil::synthetic_grade_corpus(20, 60, 0.85, 11);
    const auto cfg = fast_experiment_config();
    const auto report = eval::run_readability_experiment(corpus, cfg);

    CHECK(report.spearman >= 0.9);
    CHECK(report.pearson >= 0.8);
    CHECK(report.spearman <= 1.0);
    CHECK(report.train_size == 80);
    CHECK(report.test_size == 20);
    CHECK(report.predictions.size() == report.test_size);
    CHECK(report.seed == cfg.seed);
}

TEST_CASE("readability experiment is bit-reproducible") {
    const auto corpus = testutil::synthetic_grade_corpus(8, 30, 0.85, 13);
    auto cfg = fast_experiment_config();
    cfg.embedding.epochs = 2;
    const auto r1 = eval::run_readability_experiment(corpus, cfg);
    const auto r2 = eval::run_readability_experiment(corpus, cfg);
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.to_text() == r2.to_text());
}

TEST_CASE("shuffled labels destroy the correlation") {
    auto corpus = testutil::synthetic_grade_corpus(20, 60, 0.85, 11);
    std::vector<double> labels;
    for (const auto& d : corpus.documents) labels.push_back(*d.label);
    std::mt19937_64 rng(1234);
    fisher_yates_shuffle(labels, rng);
    for (std::size_t i = 0; i < labels.size(); ++i)
        corpus.documents[i].label = labels[i];

    const auto report = eval::run_readability_experiment(corpus, fast_experiment_config());
    CHECK(std::abs(report.spearman) < 0.5);
}

TEST_CASE("readability experiment covers every feature path") {
    const auto corpus = testutil::synthetic_grade_corpus(8, 40, 0.85, 17);
    for (FeaturePath path : {FeaturePath::HistBrown, FeaturePath::PooledUniform,
                             FeaturePath::PooledTfidf, FeaturePath::Bow}) {
        auto cfg = fast_experiment_config();
        cfg.path = path;
        cfg.cluster_k = 8;
        if (path == FeaturePath::HistBrown) cfg.embedding.kind = embed::ModelKind::SkipGram;
        CAPTURE(eval::feature_path_name(path));
        const auto report = eval::run_readability_experiment(corpus, cfg);
        CHECK(report.spearman >= -1.0);
        CHECK(report.spearman <= 1.0);
        CHECK(report.predictions.size() == report.test_size);
        for (const auto& p : report.predictions) CHECK(std::isfinite(p.predicted));
    }
}

TEST_CASE("readability experiment rejects unlabeled documents") {
    auto corpus = testutil::synthetic_grade_corpus(4, 20, 0.85, 19);
    corpus.documents[3].label.reset();
    CHECK(throws_with<ValidationError>(
        [&] { eval::run_readability_experiment(corpus, fast_experiment_config()); },
        corpus.documents[3].id));
}

TEST_CASE("experiment report serializes faithfully") {
    const auto corpus = testutil::synthetic_grade_corpus(8, 30, 0.85, 23);
    auto cfg = fast_experiment_config();
    cfg.embedding.epochs = 2;
    const auto report = eval::run_readability_experiment(corpus, cfg);

    const auto j = nlohmann::json::parse(report.to_json());
    CHECK(j.at("tool") == "readlm");
    CHECK(j.at("seed") == cfg.seed);
    CHECK(j.at("spearman").get<double>() == report.spearman);
    CHECK(j.at("pearson").get<double>() == report.pearson);
    CHECK(j.at("train_size").get<std::size_t>() == report.train_size);
    CHECK(j.at("predictions").size() == report.predictions.size());
    CHECK(j.at("config").contains("seed.split"));
    CHECK(j.at("config").contains("seed.embed"));
    CHECK(j.at("config").contains("seed.cluster"));

    const std::string text = report.to_text();
    CHECK(text.find("spearman:") != std::string::npos);
    CHECK(text.find("pearson:") != std::string::npos);
}

TEST_CASE("feature path and distance names round-trip") {
    for (FeaturePath p : {FeaturePath::HistKmeans, FeaturePath::HistBrown,
                          FeaturePath::PooledUniform, FeaturePath::PooledTfidf,
                          FeaturePath::Bow})
        CHECK(eval::parse_feature_path(eval::feature_path_name(p)) == p);
    CHECK_THROWS_AS(eval::parse_feature_path("nope"), ValidationError);

    for (MatchDistance d : {MatchDistance::Euclidean, MatchDistance::Cosine})
        CHECK(eval::parse_distance(eval::distance_name(d)) == d);
    CHECK_THROWS_AS(eval::parse_distance("nope"), ValidationError);
}

TEST_CASE("sentence pair files parse with comments and blanks") {
    TempDir dir;
    write_file(dir.file("pairs.tsv"),
               "# header comment\n"
               "the ordinary one\tthe simple one\n"
               "\n"
               "second ordinary\tsecond simple\n");
    const auto pairs = eval::SentencePairSet::load_tsv(dir.file("pairs.tsv"));
    REQUIRE(pairs.pairs.size() == 2);
    CHECK(pairs.pairs[0].ordinary == "the ordinary one");
    CHECK(pairs.pairs[0].simple == "the simple one");
    CHECK(pairs.pairs[1].simple == "second simple");

    CHECK_THROWS_AS(eval::SentencePairSet::load_tsv(dir.file("missing.tsv")), IoError);
    write_file(dir.file("notab.tsv"), "no tab here\n");
    CHECK_THROWS_AS(eval::SentencePairSet::load_tsv(dir.file("notab.tsv")),
                    ValidationError);
}

TEST_CASE("matching achieves P_1 = 1 when pairs share unique key words") {
    // Each pair shares one in-model key; filler words embed nothing.
    const auto model = planar_model({"k0", "k1", "k2"},
                                    {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"k0 filler words", "k0 plain"});
    pairs.pairs.push_back({"k1 more filler", "k1 short"});
    pairs.pairs.push_back({"k2 junk", "k2 also"});

    const auto report = eval::run_matching_experiment(pairs, 3, 3, model, 5);
    CHECK(report.sampled == 3);
    CHECK(report.dropped == 0);
    REQUIRE(report.p_at_n.size() == 3);
    CHECK(report.p_at_n[0] == 1.0);
    CHECK(report.p_at_n[2] == 1.0);
}

TEST_CASE("matching P_N is non-decreasing and exhausts at the sample size") {
    std::mt19937_64 rng(37);
    std::vector<std::string> words;
    std::vector<std::pair<double, double>> vecs;
    for (int i = 0; i < 10; ++i) {
        words.push_back("w" + std::to_string(i));
        vecs.push_back({uniform01(rng) * 2.0 - 1.0, uniform01(rng) * 2.0 - 1.0});
    }
    const auto model = planar_model(words, vecs);

    eval::SentencePairSet pairs;
    for (int i = 0; i < 5; ++i)
        pairs.pairs.push_back({"w" + std::to_string(2 * i) + " w" + std::to_string(2 * i + 1),
                               "w" + std::to_string((2 * i + 3) % 10)});

    const auto report = eval::run_matching_experiment(pairs, 5, 5, model, 9);
    CHECK(report.sampled == 5);
    for (std::size_t n = 0; n < report.p_at_n.size(); ++n) {
        CHECK(report.p_at_n[n] >= 0.0);
        CHECK(report.p_at_n[n] <= 1.0);
        if (n > 0) CHECK(report.p_at_n[n] >= report.p_at_n[n - 1]);
    }
    CHECK(report.p_at_n.back() == 1.0);
}

TEST_CASE("matching drops pairs with an unembeddable side") {
    const auto model = planar_model({"k0", "k1"}, {{1.0, 0.0}, {0.0, 1.0}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"k0 fine", "k0 fine"});
    pairs.pairs.push_back({"zz qq", "k1 fine"});   // ordinary side empty
    pairs.pairs.push_back({"k1 fine", "xx yy"});   // simple side empty

    const auto report = eval::run_matching_experiment(pairs, 3, 2, model, 1);
    CHECK(report.sampled == 1);
    CHECK(report.dropped == 2);
    CHECK(report.p_at_n[0] == 1.0);

    eval::SentencePairSet hopeless;
    hopeless.pairs.push_back({"zz", "qq"});
    CHECK_THROWS_AS(eval::run_matching_experiment(hopeless, 1, 1, model, 1), NumericError);
}

TEST_CASE("matching distance ties break toward the lower candidate index") {
    // Both candidates embed identically, so every distance ties.
    const auto model = planar_model({"t0", "t1", "q"},
                                    {{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"q", "t0"});
    pairs.pairs.push_back({"q", "t1"});

    const auto report = eval::run_matching_experiment(pairs, 2, 2, model, 3);
    CHECK(report.p_at_n[0] == 0.5);  // pair 0 wins the tie, pair 1 ranks second
    CHECK(report.p_at_n[1] == 1.0);
}

TEST_CASE("matching distance flag changes the ranking geometry") {
    // b lies far along the same ray as a; c is euclidean-near but angled.
    const auto model = planar_model({"a", "b", "c", "x"},
                                    {{1.0, 0.0}, {10.0, 0.0}, {0.9, 0.9}, {0.6, 0.8}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"a", "b"});
    pairs.pairs.push_back({"x", "c"});

    const auto euclid =
        eval::run_matching_experiment(pairs, 2, 2, model, 1, MatchDistance::Euclidean);
    CHECK(euclid.p_at_n[0] == 0.5);
    CHECK(euclid.p_at_n[1] == 1.0);

    const auto cosine_report =
        eval::run_matching_experiment(pairs, 2, 2, model, 1, MatchDistance::Cosine);
    CHECK(cosine_report.p_at_n[0] == 1.0);
}

TEST_CASE("matching applies the optional stopword filter") {
    // With stopwords on, "the" vanishes and both sides reduce to k0.
    const auto model = planar_model({"k0", "k1", "the"},
                                    {{1.0, 0.0}, {0.0, 1.0}, {-5.0, -5.0}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"the k0", "k0"});
    pairs.pairs.push_back({"k1", "the k1"});

    const auto stops = text::StopwordList::from_words(std::array<std::string, 1>{"the"});
    const auto filtered = eval::run_matching_experiment(pairs, 2, 1, model, 1,
                                                        MatchDistance::Euclidean, &stops);
    CHECK(filtered.p_at_n[0] == 1.0);
}

TEST_CASE("matching error contracts") {
    const auto model = planar_model({"a"}, {{1.0, 0.0}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"a", "a"});
    CHECK_THROWS_AS(eval::run_matching_experiment(pairs, 2, 1, model, 1), ValidationError);
    CHECK_THROWS_AS(eval::run_matching_experiment(pairs, 0, 1, model, 1), ValidationError);
    CHECK_THROWS_AS(eval::run_matching_experiment(pairs, 1, 0, model, 1), ValidationError);
}

TEST_CASE("match report serializes faithfully") {
    const auto model = planar_model({"k0", "k1"}, {{1.0, 0.0}, {0.0, 1.0}});
    eval::SentencePairSet pairs;
    pairs.pairs.push_back({"k0", "k0"});
    pairs.pairs.push_back({"k1", "k1"});
    const auto report = eval::run_matching_experiment(pairs, 2, 2, model, 21);

    const auto j = nlohmann::json::parse(report.to_json());
    CHECK(j.at("tool") == "readlm");
    CHECK(j.at("seed") == 21);
    CHECK(j.at("distance") == "euclidean");
    CHECK(j.at("sampled") == 2);
    CHECK(j.at("dropped") == 0);
    REQUIRE(j.at("p_at_n").size() == 2);
    CHECK(j.at("p_at_n")[0].get<double>() == report.p_at_n[0]);

    CHECK(report.to_text().find("P_1") != std::string::npos);

    const auto again = eval::run_matching_experiment(pairs, 2, 2, model, 21);
    CHECK(again.to_json() == report.to_json());
}
