#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "readlm/cluster.hpp"
#include "readlm/common.hpp"
#include "readlm/embed.hpp"
#include "readlm/eval.hpp"
#include "readlm/featurize.hpp"
#include "readlm/regress.hpp"
#include "readlm/text.hpp"

namespace {

using namespace readlm;

struct Options {
    std::string corpus_dir;
    std::string labels_path;
    std::string stopwords_path;
    bool no_stopwords = false;
    std::string embeddings_path;
    std::string clusters_path;
    std::string brown_path;
    std::string merges_path;
    std::string model_path;
    std::string features_path;
    std::string document_path;
    std::string pairs_path;
    std::string output_path;
    std::string json_path;
    std::string text_path;

    std::string kind = "skip-gram";
    int dim = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double lr_initial = 0.025;
    double lr_final = 1e-4;
    std::int64_t min_count = 1;
    int ngram_min = 3;
    int ngram_max = 6;

    std::string method = "kmeans";
    int k = 50;
    int max_iters = 100;
    int restarts = 5;
    std::int64_t brown_min_count = 1;

    std::string scheme = "histogram-count";
    std::string normalize = "auto";
    bool binary_histogram = false;
    std::string feature_path = "hist-kmeans";

    double c = 1.0;
    double epsilon = 0.1;
    double train_fraction = 0.8;
    std::int64_t train_count = 0;  // 0 = ceiling rule

    std::int64_t sample = 0;  // 0 = all pairs
    int n_max = 4;
    std::string distance = "euclidean";

    std::uint64_t seed = 1;
    int threads = 1;
    bool deterministic = false;
};

std::string file_header(const Options& o) {
    return std::string(kToolName) + " " + std::string(kToolVersion) +
           " seed=" + std::to_string(o.seed);
}

std::string format_score(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int effective_threads(const Options& o) {
    return o.deterministic ? 1 : o.threads;
}

text::StopwordList stopwords_for(const Options& o, bool default_builtin) {
    if (o.no_stopwords) return {};
    if (!o.stopwords_path.empty()) return text::StopwordList::from_file(o.stopwords_path);
    return default_builtin ? text::StopwordList::builtin_english() : text::StopwordList{};
}

text::Corpus corpus_for(const Options& o, const char* cmd, bool require_labels) {
    if (o.corpus_dir.empty())
        throw ValidationError(std::string(cmd) + ": --corpus is required");
    if (require_labels && o.labels_path.empty())
        throw ValidationError(std::string(cmd) + ": --labels is required");
    std::optional<std::filesystem::path> manifest;
    if (!o.labels_path.empty()) manifest = o.labels_path;
    return text::load_corpus(o.corpus_dir, manifest, stopwords_for(o, true));
}

embed::TrainConfig train_config_for(const Options& o) {
    embed::TrainConfig tc;
    tc.kind = embed::parse_kind(o.kind);
    tc.dimension = o.dim;
    tc.context_window = o.window;
    tc.negatives = o.negatives;
    tc.epochs = o.epochs;
    tc.lr_initial = o.lr_initial;
    tc.lr_final = o.lr_final;
    tc.min_count = o.min_count;
    tc.ngram_min = o.ngram_min;
    tc.ngram_max = o.ngram_max;
    tc.threads = effective_threads(o);
    return tc;
}

void require_output(const Options& o, const char* cmd) {
    if (o.output_path.empty())
        throw ValidationError(std::string(cmd) + ": --output is required");
}

void write_text_file(const std::string& path, const std::string& body, const char* what) {
    std::ofstream out(path);
    if (!out) throw IoError(std::string("cannot write ") + what + ": " + path);
    out << body;
}

void cmd_train_embeddings(const Options& o) {
    require_output(o, "train-embeddings");
    const text::Corpus corpus = corpus_for(o, "train-embeddings", false);
    embed::TrainConfig tc = train_config_for(o);
    tc.seed = stage_seed(o.seed, "embed");
    if (tc.kind == embed::ModelKind::PvDbow) {
        const embed::ParagraphVectors pv = embed::train_pvdbow(corpus, tc);
        embed::save_paragraph_vectors(pv, o.output_path, file_header(o));
    } else {
        const embed::EmbeddingModel model = embed::train(corpus, tc);
        embed::save_model(model, o.output_path, file_header(o));
    }
}

void cmd_cluster(const Options& o) {
    require_output(o, "cluster");
    if (o.method == "kmeans") {
        if (o.embeddings_path.empty())
            throw ValidationError("cluster: --embeddings is required for k-means");
        const embed::EmbeddingModel model = embed::load_model(o.embeddings_path);
        const cluster::KMeansModel km =
            cluster::kmeans_fit_best(model.input_vectors, o.k, o.max_iters,
                                     stage_seed(o.seed, "cluster"), o.restarts);
        cluster::save_kmeans(km, o.output_path, file_header(o));
    } else if (o.method == "brown") {
        const text::Corpus corpus = corpus_for(o, "cluster", false);
        const cluster::BrownModel model = cluster::brown_fit(corpus, o.k, o.brown_min_count);
        cluster::save_brown(model, o.output_path, o.merges_path, file_header(o));
    } else {
        throw ValidationError("cluster: --method must be kmeans or brown");
    }
}

// Models needed to featurize documents under one scheme; loaded once per
// command invocation.
struct FeatureContext {
    featurize::Scheme scheme = featurize::Scheme::HistogramCount;
    featurize::Normalize normalize = featurize::Normalize::Auto;
    std::optional<embed::EmbeddingModel> embeddings;
    std::optional<cluster::KMeansModel> kmeans;
    std::optional<cluster::BrownModel> brown;
    std::optional<featurize::IdfTable> idf;
    int k = 0;
};

FeatureContext feature_context_for(const Options& o, const char* cmd,
                                   const text::Corpus* idf_corpus) {
    FeatureContext ctx;
    ctx.scheme = featurize::parse_scheme(o.scheme);
    ctx.normalize = featurize::parse_normalize(o.normalize);
    const bool histogram = ctx.scheme == featurize::Scheme::HistogramCount ||
                           ctx.scheme == featurize::Scheme::HistogramBinary;
    if (histogram && !o.brown_path.empty()) {
        ctx.brown = cluster::load_brown(o.brown_path);
        ctx.k = ctx.brown->k;
        return ctx;
    }
    if (o.embeddings_path.empty())
        throw ValidationError(std::string(cmd) + ": --embeddings is required for scheme " +
                              o.scheme);
    ctx.embeddings = embed::load_model(o.embeddings_path);
    if (histogram) {
        if (o.clusters_path.empty())
            throw ValidationError(std::string(cmd) +
                                  ": histogram schemes need --clusters or --brown");
        ctx.kmeans = cluster::load_kmeans(o.clusters_path);
        ctx.k = ctx.kmeans->k;
    } else if (ctx.scheme == featurize::Scheme::PooledTfidf) {
        ctx.idf = featurize::IdfTable::build(*idf_corpus);
    }
    return ctx;
}

featurize::FeatureVector featurize_one(const FeatureContext& ctx, const text::Document& doc) {
    featurize::FeatureVector fv;
    switch (ctx.scheme) {
        case featurize::Scheme::HistogramCount:
        case featurize::Scheme::HistogramBinary: {
            const featurize::WordAssigner assign =
                ctx.brown ? featurize::make_brown_assigner(*ctx.brown)
                          : featurize::make_kmeans_assigner(*ctx.kmeans, *ctx.embeddings);
            fv = featurize::cluster_histogram(
                doc, assign, ctx.k, ctx.scheme == featurize::Scheme::HistogramBinary);
            break;
        }
        case featurize::Scheme::PooledUniform:
            fv = featurize::pooled_feature(doc, *ctx.embeddings,
                                           featurize::Scheme::PooledUniform);
            break;
        case featurize::Scheme::PooledTfidf:
            fv = featurize::pooled_feature(doc, *ctx.embeddings, featurize::Scheme::PooledTfidf,
                                           &*ctx.idf);
            break;
        case featurize::Scheme::Bow:
            fv = featurize::bow_feature(doc, ctx.embeddings->vocab);
            break;
    }
    if (featurize::should_normalize(fv.scheme, ctx.normalize))
        fv = featurize::unit_normalize(fv);
    return fv;
}

void cmd_featurize(const Options& o) {
    require_output(o, "featurize");
    const text::Corpus corpus = corpus_for(o, "featurize", false);
    const FeatureContext ctx = feature_context_for(o, "featurize", &corpus);

    featurize::FeatureFile file;
    file.scheme = ctx.scheme;
    for (const auto& doc : corpus.documents) {
        featurize::FeatureRow row;
        row.doc_id = doc.id;
        row.label = doc.label;
        row.values = featurize_one(ctx, doc).values;
        file.rows.push_back(std::move(row));
    }
    featurize::save_features(file, o.output_path, file_header(o));
}

void cmd_train_regressor(const Options& o) {
    require_output(o, "train-regressor");
    if (o.features_path.empty())
        throw ValidationError("train-regressor: --features is required");
    const featurize::FeatureFile file = featurize::load_features(o.features_path);
    Mat x(file.rows.size(), file.rows.front().values.size());
    std::vector<double> y;
    for (std::size_t i = 0; i < file.rows.size(); ++i) {
        const auto& row = file.rows[i];
        if (!row.label)
            throw ValidationError("train-regressor: row \"" + row.doc_id + "\" has no label");
        std::copy(row.values.begin(), row.values.end(), x.row(i).begin());
        y.push_back(*row.label);
    }
    const regress::RegressionModel model = regress::svr_train(x, y, o.c, o.epsilon);
    regress::save_regressor(model, o.output_path, file_header(o));
}

void cmd_predict(const Options& o) {
    if (o.model_path.empty()) throw ValidationError("predict: --model is required");
    const regress::RegressionModel model = regress::load_regressor(o.model_path);
    if (o.document_path.empty() == o.features_path.empty())
        throw ValidationError("predict: exactly one of --document or --features is required");

    if (!o.features_path.empty()) {
        const featurize::FeatureFile file = featurize::load_features(o.features_path);
        for (const auto& row : file.rows)
            std::cout << row.doc_id << "\t"
                      << format_score(regress::svr_predict(model, row.values)) << "\n";
        return;
    }

    std::ifstream in(o.document_path);
    if (!in) throw IoError("cannot open document: " + o.document_path);
    std::ostringstream raw;
    raw << in.rdbuf();
    text::Document doc;
    doc.id = std::filesystem::path(o.document_path).filename().string();
    doc.tokens = text::remove_stopwords(text::tokenize(raw.str()), stopwords_for(o, true));

    const FeatureContext ctx = feature_context_for(o, "predict", nullptr);
    if (ctx.scheme == featurize::Scheme::PooledTfidf)
        throw ValidationError("predict: pooled-tfidf needs corpus statistics; use --features");
    const featurize::FeatureVector fv = featurize_one(ctx, doc);
    std::cout << format_score(regress::svr_predict(model, fv.values)) << "\n";
}

void cmd_evaluate(const Options& o) {
    const text::Corpus corpus = corpus_for(o, "evaluate", true);

    eval::ExperimentConfig ec;
    ec.embedding = train_config_for(o);
    ec.path = eval::parse_feature_path(o.feature_path);
    ec.cluster_k = o.k;
    ec.kmeans_max_iters = o.max_iters;
    ec.kmeans_restarts = o.restarts;
    ec.brown_min_count = o.brown_min_count;
    ec.binary_histogram = o.binary_histogram;
    ec.normalize = featurize::parse_normalize(o.normalize);
    ec.svr_c = o.c;
    ec.svr_epsilon = o.epsilon;
    ec.train_fraction = o.train_fraction;
    if (o.train_count > 0) ec.train_count = static_cast<std::size_t>(o.train_count);
    ec.seed = o.seed;

    const eval::EvalReport report = eval::run_readability_experiment(corpus, ec);
    std::cout << report.to_text();
    if (!o.json_path.empty()) write_text_file(o.json_path, report.to_json(), "report JSON");
    if (!o.text_path.empty()) write_text_file(o.text_path, report.to_text(), "report text");
}

void cmd_match(const Options& o) {
    if (o.pairs_path.empty()) throw ValidationError("match: --pairs is required");
    if (o.embeddings_path.empty()) throw ValidationError("match: --embeddings is required");
    const eval::SentencePairSet pairs = eval::SentencePairSet::load_tsv(o.pairs_path);
    const embed::EmbeddingModel model = embed::load_model(o.embeddings_path);
    const std::size_t sample_n =
        o.sample > 0 ? static_cast<std::size_t>(o.sample) : pairs.pairs.size();
    const text::StopwordList stops = stopwords_for(o, false);

    const eval::MatchReport report = eval::run_matching_experiment(
        pairs, sample_n, o.n_max, model, o.seed, eval::parse_distance(o.distance),
        stops.empty() ? nullptr : &stops);
    std::cout << report.to_text();
    if (!o.json_path.empty()) write_text_file(o.json_path, report.to_json(), "report JSON");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"word embeddings, cluster language models, and text readability scoring"};
    app.set_config("--config", "", "flat `key = value` config file; flags override");
    app.require_subcommand(1);

    app.add_option("--corpus", o.corpus_dir, "directory of .txt documents");
    app.add_option("--labels", o.labels_path, "TSV manifest `filename<TAB>label`");
    app.add_option("--stopwords", o.stopwords_path, "stopword file (default: builtin list)");
    app.add_flag("--no-stopwords", o.no_stopwords, "disable stopword removal");
    app.add_option("--embeddings", o.embeddings_path, "embedding model file");
    app.add_option("--clusters", o.clusters_path, "k-means model file");
    app.add_option("--brown", o.brown_path, "brown model file");
    app.add_option("--merges", o.merges_path, "brown merge-history output");
    app.add_option("--model", o.model_path, "regression model file");
    app.add_option("--features", o.features_path, "feature TSV");
    app.add_option("--document", o.document_path, "single document to score");
    app.add_option("--pairs", o.pairs_path, "sentence pair TSV `ordinary<TAB>simple`");
    app.add_option("--output", o.output_path, "output file");
    app.add_option("--json", o.json_path, "write the report as JSON here");
    app.add_option("--text", o.text_path, "write the report as text here");

    app.add_option("--kind", o.kind, "skip-gram | char-ngram | pv-dbow");
    app.add_option("--dim", o.dim, "embedding dimension");
    app.add_option("--window", o.window, "context window size");
    app.add_option("--negatives", o.negatives, "negative samples per pair");
    app.add_option("--epochs", o.epochs, "training epochs");
    app.add_option("--lr-initial", o.lr_initial, "initial learning rate");
    app.add_option("--lr-final", o.lr_final, "final learning rate");
    app.add_option("--min-count", o.min_count, "vocabulary frequency cutoff");
    app.add_option("--ngram-min", o.ngram_min, "shortest character n-gram");
    app.add_option("--ngram-max", o.ngram_max, "longest character n-gram");

    app.add_option("--method", o.method, "cluster method: kmeans | brown");
    app.add_option("--k", o.k, "number of clusters");
    app.add_option("--max-iters", o.max_iters, "k-means iteration cap");
    app.add_option("--restarts", o.restarts, "k-means restarts");
    app.add_option("--brown-min-count", o.brown_min_count, "brown frequency cutoff");

    app.add_option("--scheme", o.scheme,
                   "histogram-count | histogram-binary | pooled-uniform | pooled-tfidf | bow");
    app.add_option("--normalize", o.normalize, "unit-normalize features: auto | on | off");
    app.add_flag("--binary-histogram", o.binary_histogram,
                 "evaluate with binary instead of count histograms");
    app.add_option("--feature-path", o.feature_path,
                   "hist-kmeans | hist-brown | pooled-uniform | pooled-tfidf | bow");

    app.add_option("--c", o.c, "SVR complexity parameter");
    app.add_option("--epsilon", o.epsilon, "SVR epsilon margin");
    app.add_option("--train-fraction", o.train_fraction, "train split fraction");
    app.add_option("--train-count", o.train_count,
                   "explicit train-set size (0 = ceiling rule)");

    app.add_option("--sample", o.sample, "sentence pairs to sample (0 = all)");
    app.add_option("--n-max", o.n_max, "largest N for P_N");
    app.add_option("--distance", o.distance, "euclidean | cosine");

    app.add_option("--seed", o.seed, "root random seed");
    app.add_option("--threads", o.threads, "worker threads for embedding training");
    app.add_flag("--deterministic", o.deterministic, "force single-threaded training");

    app.add_subcommand("train-embeddings", "learn word or paragraph vectors from a corpus")
        ->fallthrough()
        ->callback([&] { cmd_train_embeddings(o); });
    app.add_subcommand("cluster", "fit a k-means or brown cluster model")
        ->fallthrough()
        ->callback([&] { cmd_cluster(o); });
    app.add_subcommand("featurize", "compose per-document feature vectors")
        ->fallthrough()
        ->callback([&] { cmd_featurize(o); });
    app.add_subcommand("train-regressor", "fit the readability SVR on a feature TSV")
        ->fallthrough()
        ->callback([&] { cmd_train_regressor(o); });
    app.add_subcommand("predict", "score a document or feature rows")
        ->fallthrough()
        ->callback([&] { cmd_predict(o); });
    app.add_subcommand("evaluate", "run the split/train/score experiment end to end")
        ->fallthrough()
        ->callback([&] { cmd_evaluate(o); });
    app.add_subcommand("match", "nearest-neighbor sentence matching (P_N)")
        ->fallthrough()
        ->callback([&] { cmd_match(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const IoError& e) {
        std::cerr << "readlm: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "readlm: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "readlm: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "readlm: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
