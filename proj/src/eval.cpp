#include "readlm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "io_util.hpp"
#include "readlm/cluster.hpp"
#include "readlm/featurize.hpp"
#include "readlm/regress.hpp"

namespace readlm::eval {

namespace {

void require_finite(std::span<const double> x, const char* who) {
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError(std::string(who) + ": non-finite input");
}

double pearson_impl(std::span<const double> x, std::span<const double> y, const char* who) {
    if (x.size() != y.size())
        throw ValidationError(std::string(who) + ": length mismatch (" +
                              std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                              ")");
    if (x.size() < 2)
        throw ValidationError(std::string(who) + ": need at least 2 points");
    require_finite(x, who);
    require_finite(y, who);

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw NumericError(std::string(who) + ": zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    return pearson_impl(x, y, "pearson");
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("spearman: length mismatch (" + std::to_string(x.size()) +
                              " vs " + std::to_string(y.size()) + ")");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson_impl(rx, ry, "spearman");
}

std::vector<double> average_ranks(std::span<const double> x) {
    require_finite(x, "average_ranks");
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

std::pair<text::Corpus, text::Corpus> split_train_test(const text::Corpus& corpus,
                                                       double fraction, std::uint64_t seed,
                                                       std::optional<std::size_t> train_count) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ValidationError("split_train_test: fraction must be in (0, 1)");
    const std::size_t n = corpus.documents.size();
    if (n < 2) throw ValidationError("split_train_test: need at least 2 documents");
    const std::size_t train_n =
        train_count ? *train_count
                    : static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (train_n < 1 || train_n >= n)
        throw ValidationError("split_train_test: split " + std::to_string(train_n) + "/" +
                              std::to_string(n - train_n) + " of " + std::to_string(n) +
                              " documents leaves one side empty");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    fisher_yates_shuffle(perm, rng);

    text::Corpus train, test;
    train.name = corpus.name + "-train";
    test.name = corpus.name + "-test";
    for (std::size_t i = 0; i < train_n; ++i) train.documents.push_back(corpus.documents[perm[i]]);
    for (std::size_t i = train_n; i < n; ++i) test.documents.push_back(corpus.documents[perm[i]]);
    return {std::move(train), std::move(test)};
}

std::string_view feature_path_name(FeaturePath path) {
    switch (path) {
        case FeaturePath::HistKmeans: return "hist-kmeans";
        case FeaturePath::HistBrown: return "hist-brown";
        case FeaturePath::PooledUniform: return "pooled-uniform";
        case FeaturePath::PooledTfidf: return "pooled-tfidf";
        case FeaturePath::Bow: return "bow";
    }
    throw ValidationError("unknown feature path");
}

FeaturePath parse_feature_path(std::string_view name) {
    if (name == "hist-kmeans") return FeaturePath::HistKmeans;
    if (name == "hist-brown") return FeaturePath::HistBrown;
    if (name == "pooled-uniform") return FeaturePath::PooledUniform;
    if (name == "pooled-tfidf") return FeaturePath::PooledTfidf;
    if (name == "bow") return FeaturePath::Bow;
    throw ValidationError("unknown feature path: \"" + std::string(name) + "\"");
}

std::string_view distance_name(MatchDistance distance) {
    return distance == MatchDistance::Euclidean ? "euclidean" : "cosine";
}

MatchDistance parse_distance(std::string_view name) {
    if (name == "euclidean") return MatchDistance::Euclidean;
    if (name == "cosine") return MatchDistance::Cosine;
    throw ValidationError("unknown distance: \"" + std::string(name) + "\"");
}

namespace {

std::map<std::string, std::string> config_snapshot(const ExperimentConfig& config) {
    using detail::format_double;
    std::map<std::string, std::string> snap;
    snap["embedding.kind"] = std::string(embed::kind_name(config.embedding.kind));
    snap["embedding.dimension"] = std::to_string(config.embedding.dimension);
    snap["embedding.context_window"] = std::to_string(config.embedding.context_window);
    snap["embedding.negatives"] = std::to_string(config.embedding.negatives);
    snap["embedding.epochs"] = std::to_string(config.embedding.epochs);
    snap["embedding.lr_initial"] = format_double(config.embedding.lr_initial);
    snap["embedding.lr_final"] = format_double(config.embedding.lr_final);
    snap["embedding.min_count"] = std::to_string(config.embedding.min_count);
    snap["embedding.ngram_min"] = std::to_string(config.embedding.ngram_min);
    snap["embedding.ngram_max"] = std::to_string(config.embedding.ngram_max);
    snap["embedding.threads"] = std::to_string(config.embedding.threads);
    snap["path"] = std::string(feature_path_name(config.path));
    snap["cluster_k"] = std::to_string(config.cluster_k);
    snap["kmeans_max_iters"] = std::to_string(config.kmeans_max_iters);
    snap["kmeans_restarts"] = std::to_string(config.kmeans_restarts);
    snap["brown_min_count"] = std::to_string(config.brown_min_count);
    snap["binary_histogram"] = config.binary_histogram ? "true" : "false";
    snap["normalize"] = std::string(featurize::normalize_name(config.normalize));
    snap["svr_c"] = format_double(config.svr_c);
    snap["svr_epsilon"] = format_double(config.svr_epsilon);
    snap["train_fraction"] = format_double(config.train_fraction);
    snap["train_count"] = config.train_count ? std::to_string(*config.train_count) : "auto";
    snap["seed.split"] = std::to_string(stage_seed(config.seed, "split"));
    snap["seed.embed"] = std::to_string(stage_seed(config.seed, "embed"));
    snap["seed.cluster"] = std::to_string(stage_seed(config.seed, "cluster"));
    return snap;
}

}  // namespace

EvalReport run_readability_experiment(const text::Corpus& corpus,
                                      const ExperimentConfig& config) {
    for (const auto& doc : corpus.documents)
        if (!doc.label)
            throw ValidationError("run_readability_experiment: document \"" + doc.id +
                                  "\" has no label");

    auto [train, test] =
        split_train_test(corpus, config.train_fraction, stage_seed(config.seed, "split"),
                         config.train_count);

    embed::TrainConfig tc = config.embedding;
    tc.seed = stage_seed(config.seed, "embed");
    const embed::EmbeddingModel model = embed::train(train, tc);

    cluster::KMeansModel km;
    cluster::BrownModel brown;
    featurize::IdfTable idf;
    featurize::WordAssigner assign;
    switch (config.path) {
        case FeaturePath::HistKmeans:
            km = cluster::kmeans_fit_best(model.input_vectors, config.cluster_k,
                                          config.kmeans_max_iters,
                                          stage_seed(config.seed, "cluster"),
                                          config.kmeans_restarts);
            assign = featurize::make_kmeans_assigner(km, model);
            break;
        case FeaturePath::HistBrown:
            brown = cluster::brown_fit(train, config.cluster_k, config.brown_min_count);
            assign = featurize::make_brown_assigner(brown);
            break;
        case FeaturePath::PooledTfidf:
            idf = featurize::IdfTable::build(train);
            break;
        default:
            break;
    }

    auto featurize_doc = [&](const text::Document& doc) {
        featurize::FeatureVector fv;
        switch (config.path) {
            case FeaturePath::HistKmeans:
            case FeaturePath::HistBrown:
                fv = featurize::cluster_histogram(doc, assign, config.cluster_k,
                                                  config.binary_histogram);
                break;
            case FeaturePath::PooledUniform:
                fv = featurize::pooled_feature(doc, model, featurize::Scheme::PooledUniform);
                break;
            case FeaturePath::PooledTfidf:
                fv = featurize::pooled_feature(doc, model, featurize::Scheme::PooledTfidf, &idf);
                break;
            case FeaturePath::Bow:
                fv = featurize::bow_feature(doc, model.vocab);
                break;
        }
        if (featurize::should_normalize(fv.scheme, config.normalize))
            fv = featurize::unit_normalize(fv);
        return fv;
    };

    auto build_side = [&](const text::Corpus& side, Mat& x, std::vector<double>& y) {
        std::vector<featurize::FeatureVector> fvs;
        fvs.reserve(side.documents.size());
        for (const auto& doc : side.documents) fvs.push_back(featurize_doc(doc));
        x = Mat(fvs.size(), fvs.empty() ? 0 : fvs.front().values.size());
        y.clear();
        for (std::size_t i = 0; i < fvs.size(); ++i) {
            std::copy(fvs[i].values.begin(), fvs[i].values.end(), x.row(i).begin());
            y.push_back(*side.documents[i].label);
        }
    };

    Mat train_x, test_x;
    std::vector<double> train_y, test_y;
    build_side(train, train_x, train_y);
    build_side(test, test_x, test_y);

    const regress::RegressionModel reg =
        regress::svr_train(train_x, train_y, config.svr_c, config.svr_epsilon);

    EvalReport report;
    report.seed = config.seed;
    report.train_size = train.documents.size();
    report.test_size = test.documents.size();
    report.config = config_snapshot(config);
    std::vector<double> predicted;
    for (std::size_t i = 0; i < test.documents.size(); ++i) {
        const double p = regress::svr_predict(reg, test_x.row(i));
        predicted.push_back(p);
        report.predictions.push_back({test.documents[i].id, test_y[i], p});
    }
    report.spearman = spearman(test_y, predicted);
    report.pearson = pearson(test_y, predicted);
    return report;
}

std::string EvalReport::to_text() const {
    std::ostringstream out;
    out << kToolName << " " << kToolVersion << " evaluation report\n";
    out << "seed: " << seed << "\n";
    out << "train/test: " << train_size << "/" << test_size << "\n";
    out << "spearman: " << detail::format_double(spearman) << "\n";
    out << "pearson: " << detail::format_double(pearson) << "\n";
    out << "predictions (doc_id, label, predicted):\n";
    for (const auto& p : predictions)
        out << "  " << p.doc_id << "\t" << detail::format_double(p.label) << "\t"
            << detail::format_double(p.predicted) << "\n";
    return out.str();
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
    j["seed"] = seed;
    j["train_size"] = train_size;
    j["test_size"] = test_size;
    j["spearman"] = spearman;
    j["pearson"] = pearson;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config) j["config"][key] = value;
    auto preds = nlohmann::ordered_json::array();
    for (const auto& p : predictions)
        preds.push_back({{"doc_id", p.doc_id}, {"label", p.label}, {"predicted", p.predicted}});
    j["predictions"] = std::move(preds);
    return j.dump(2) + "\n";
}

SentencePairSet SentencePairSet::load_tsv(const std::filesystem::path& path) {
    auto in = detail::open_input(path, "sentence pair file");
    SentencePairSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') continue;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            throw ValidationError("sentence pair file line " + std::to_string(lineno) +
                                  ": expected ordinary<TAB>simple");
        set.pairs.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    if (set.pairs.empty())
        throw ValidationError("sentence pair file " + path.string() + ": no pairs");
    return set;
}

MatchReport run_matching_experiment(const SentencePairSet& pairs, std::size_t sample_n,
                                    int n_max, const embed::EmbeddingModel& model,
                                    std::uint64_t seed, MatchDistance distance,
                                    const text::StopwordList* stopwords) {
    if (n_max < 1) throw ValidationError("run_matching_experiment: N_max must be >= 1");
    if (sample_n < 1) throw ValidationError("run_matching_experiment: sample_n must be >= 1");
    if (sample_n > pairs.pairs.size())
        throw ValidationError("run_matching_experiment: sample_n " + std::to_string(sample_n) +
                              " exceeds " + std::to_string(pairs.pairs.size()) + " pairs");

    std::vector<std::size_t> idx(pairs.pairs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(stage_seed(seed, "sample"));
    fisher_yates_shuffle(idx, rng);
    idx.resize(sample_n);

    auto embed_sentence = [&](const std::string& raw) -> std::optional<std::vector<double>> {
        std::vector<std::string> tokens = text::tokenize(raw);
        if (stopwords) tokens = text::remove_stopwords(tokens, *stopwords);
        std::vector<std::vector<double>> vectors;
        for (const auto& tok : tokens)
            if (model.has_vector(tok)) vectors.push_back(embed::word_vector(tok, model));
        if (vectors.empty()) return std::nullopt;
        return embed::pool(vectors, std::vector<double>(vectors.size(), 1.0));
    };

    std::vector<std::vector<double>> ordinary, simple;
    std::size_t dropped = 0;
    for (const std::size_t i : idx) {
        auto a = embed_sentence(pairs.pairs[i].ordinary);
        auto b = embed_sentence(pairs.pairs[i].simple);
        if (!a || !b) {
            ++dropped;
            continue;
        }
        ordinary.push_back(std::move(*a));
        simple.push_back(std::move(*b));
    }
    const std::size_t m = ordinary.size();
    if (m == 0)
        throw NumericError("run_matching_experiment: every sampled pair lost all in-model "
                           "tokens");

    // Squared Euclidean ranks the same as Euclidean.
    auto dist = [&](std::span<const double> a, std::span<const double> b) {
        return distance == MatchDistance::Euclidean ? squared_distance(a, b)
                                                    : 1.0 - cosine(a, b);
    };

    std::vector<std::size_t> rank(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double d_true = dist(ordinary[i], simple[i]);
        std::size_t r = 1;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double dj = dist(ordinary[i], simple[j]);
            if (dj < d_true || (dj == d_true && j < i)) ++r;
        }
        rank[i] = r;
    }

    MatchReport report;
    report.sampled = m;
    report.dropped = dropped;
    report.seed = seed;
    report.distance = distance;
    report.p_at_n.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
        std::size_t hits = 0;
        for (const std::size_t r : rank)
            if (r <= static_cast<std::size_t>(n)) ++hits;
        report.p_at_n[n - 1] = static_cast<double>(hits) / static_cast<double>(m);
    }
    return report;
}

std::string MatchReport::to_text() const {
    std::ostringstream out;
    out << kToolName << " " << kToolVersion << " matching report\n";
    out << "seed: " << seed << "\n";
    out << "distance: " << distance_name(distance) << "\n";
    out << "sampled: " << sampled << " (dropped " << dropped << ")\n";
    for (std::size_t i = 0; i < p_at_n.size(); ++i)
        out << "P_" << (i + 1) << ": " << detail::format_double(p_at_n[i]) << "\n";
    return out.str();
}

std::string MatchReport::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
    j["seed"] = seed;
    j["distance"] = std::string(distance_name(distance));
    j["sampled"] = sampled;
    j["dropped"] = dropped;
    j["p_at_n"] = p_at_n;
    return j.dump(2) + "\n";
}

}  // namespace readlm::eval
