#include "readlm/embed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "io_util.hpp"

namespace readlm::embed {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

std::vector<char32_t> decode_utf8(const std::string& s) {
    std::vector<char32_t> cps;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = b0;
        int len = 1;
        if ((b0 & 0xe0) == 0xc0) {
            len = 2;
            cp = b0 & 0x1f;
        } else if ((b0 & 0xf0) == 0xe0) {
            len = 3;
            cp = b0 & 0x0f;
        } else if ((b0 & 0xf8) == 0xf0) {
            len = 4;
            cp = b0 & 0x07;
        }
        if (len == 1 || i + len > s.size()) {
            cps.push_back(b0);
            ++i;
            continue;
        }
        bool valid = true;
        for (int k = 1; k < len; ++k) {
            const unsigned char bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xc0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3f);
        }
        if (!valid) {
            cps.push_back(b0);
            ++i;
        } else {
            cps.push_back(cp);
            i += len;
        }
    }
    return cps;
}

std::string encode_utf8(std::span<const char32_t> cps) {
    std::string out;
    for (char32_t cp : cps) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else {
            out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        }
    }
    return out;
}

void init_uniform(Mat& m, int dimension, std::mt19937_64& rng) {
    const double half = 0.5 / dimension;
    for (double& v : m.data()) v = (uniform01(rng) * 2.0 - 1.0) * half;
}

// Documents mapped to vocabulary indices; out-of-vocabulary tokens are
// dropped, so windows span the filtered sequence.
std::vector<std::vector<int>> index_documents(const text::Corpus& corpus,
                                              const Vocabulary& vocab) {
    std::vector<std::vector<int>> docs;
    docs.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        std::vector<int> ids;
        ids.reserve(doc.tokens.size());
        for (const auto& tok : doc.tokens)
            if (auto idx = vocab.index_of(tok)) ids.push_back(*idx);
        docs.push_back(std::move(ids));
    }
    return docs;
}

std::int64_t count_window_pairs(const std::vector<std::vector<int>>& docs, int window) {
    std::int64_t pairs = 0;
    for (const auto& doc : docs) {
        const std::int64_t n = static_cast<std::int64_t>(doc.size());
        for (std::int64_t t = 0; t < n; ++t)
            pairs += std::min(n - 1, t + window) - std::max<std::int64_t>(0, t - window);
    }
    return pairs;
}

}  // namespace

std::string_view kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::SkipGram: return "skip-gram";
        case ModelKind::CharNgram: return "char-ngram";
        case ModelKind::PvDbow: return "pv-dbow";
    }
    return "skip-gram";
}

ModelKind parse_kind(std::string_view name) {
    if (name == "skip-gram") return ModelKind::SkipGram;
    if (name == "char-ngram") return ModelKind::CharNgram;
    if (name == "pv-dbow") return ModelKind::PvDbow;
    throw ValidationError("unknown model kind: \"" + std::string(name) + "\"");
}

Vocabulary Vocabulary::build(const text::Corpus& corpus, std::int64_t min_count) {
    if (corpus.documents.empty()) throw ValidationError("corpus is empty");
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& doc : corpus.documents)
        for (const auto& tok : doc.tokens) ++counts[tok];

    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (auto& [word, count] : counts)
        if (count >= min_count) kept.emplace_back(word, count);
    if (kept.empty())
        throw ValidationError("empty vocabulary: no word reaches min_count=" +
                              std::to_string(min_count));
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    for (auto& [word, count] : kept) {
        vocab.index_.emplace(word, static_cast<int>(vocab.words_.size()));
        vocab.words_.push_back(word);
        vocab.counts_.push_back(count);
        vocab.total_tokens_ += count;
    }
    return vocab;
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
    Vocabulary vocab;
    for (auto& w : words) {
        const auto [it, inserted] =
            vocab.index_.emplace(w, static_cast<int>(vocab.words_.size()));
        if (!inserted) throw ValidationError("duplicate word: \"" + w + "\"");
        vocab.words_.push_back(std::move(w));
        vocab.counts_.push_back(0);
    }
    return vocab;
}

std::optional<int> Vocabulary::index_of(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void TrainConfig::validate() const {
    if (dimension < 1) throw ValidationError("dimension must be >= 1");
    if (context_window < 1) throw ValidationError("context_window must be >= 1");
    if (negatives < 1) throw ValidationError("negatives must be >= 1");
    if (epochs < 0) throw ValidationError("epochs must be >= 0");
    if (!(lr_initial > 0.0) || !(lr_final > 0.0))
        throw ValidationError("learning rates must be positive");
    if (lr_final > lr_initial)
        throw ValidationError("lr_final must not exceed lr_initial");
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
    if (kind == ModelKind::CharNgram) {
        if (ngram_min < 1) throw ValidationError("ngram_min must be >= 1");
        if (ngram_max < ngram_min) throw ValidationError("ngram_max must be >= ngram_min");
    }
    if (threads < 1) throw ValidationError("threads must be >= 1");
}

std::set<std::string> ngram_set(const std::string& word, int n_min, int n_max) {
    if (word.empty()) throw ValidationError("ngram_set: word is empty");
    std::vector<char32_t> wrapped;
    wrapped.push_back(U'<');
    for (char32_t cp : decode_utf8(word)) wrapped.push_back(cp);
    wrapped.push_back(U'>');

    std::set<std::string> grams;
    const int len = static_cast<int>(wrapped.size());
    for (int n = n_min; n <= n_max && n <= len; ++n)
        for (int start = 0; start + n <= len; ++start)
            grams.insert(encode_utf8({wrapped.data() + start, static_cast<std::size_t>(n)}));
    grams.insert(encode_utf8(wrapped));  // whole-word token
    return grams;
}

bool EmbeddingModel::has_vector(const std::string& word) const {
    if (kind == ModelKind::CharNgram) return !word.empty();
    return vocab.index_of(word).has_value();
}

std::vector<double> word_vector(const std::string& word, const EmbeddingModel& model) {
    if (model.kind == ModelKind::CharNgram) {
        if (word.empty()) throw ValidationError("word_vector: word is empty");
        std::vector<double> v(model.dimension, 0.0);
        for (const auto& gram : ngram_set(word, model.ngram_min, model.ngram_max)) {
            const auto it = model.ngram_index.find(gram);
            if (it != model.ngram_index.end())
                axpy(1.0, model.ngram_vectors.row(it->second), v);
        }
        return v;
    }
    const auto idx = model.vocab.index_of(word);
    if (!idx) throw OovError(word);
    const auto row = model.input_vectors.row(*idx);
    return {row.begin(), row.end()};
}

std::vector<double> softmax_distribution(const std::string& center,
                                         const EmbeddingModel& model) {
    if (!model.vocab.index_of(center)) throw OovError(center);
    const std::vector<double> rep = word_vector(center, model);

    const std::size_t v = model.vocab.size();
    std::vector<double> scores(v);
    double max_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v; ++i) {
        scores[i] = dot(rep, model.output_vectors.row(i));
        max_score = std::max(max_score, scores[i]);
    }
    double total = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_score);
        total += s;
    }
    for (double& s : scores) s /= total;
    return scores;
}

double softmax_prob(const std::string& center, const std::string& context,
                    const EmbeddingModel& model) {
    const auto ctx = model.vocab.index_of(context);
    if (!ctx) throw OovError(context);
    return softmax_distribution(center, model)[*ctx];
}

NsGradient ns_loss_grad(std::span<const double> center, const Mat& targets,
                        std::span<const double> labels) {
    if (targets.rows() != labels.size())
        throw ValidationError("ns_loss_grad: targets/labels size mismatch");
    NsGradient g;
    g.d_center.assign(center.size(), 0.0);
    g.d_targets = Mat(targets.rows(), targets.cols());
    for (std::size_t t = 0; t < targets.rows(); ++t) {
        const auto row = targets.row(t);
        const double s = dot(center, row);
        g.loss -= labels[t] > 0.5 ? log_sigmoid(s) : log_sigmoid(-s);
        const double coeff = sigmoid(s) - labels[t];  // dL/ds
        axpy(coeff, row, g.d_center);
        axpy(coeff, center, g.d_targets.row(t));
    }
    return g;
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab) {
    cumulative_.reserve(vocab.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        total += std::pow(static_cast<double>(std::max<std::int64_t>(vocab.count(
                              static_cast<int>(i)), 1)), 0.75);
        cumulative_.push_back(total);
    }
}

int NegativeSampler::sample(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<int>(std::min<std::size_t>(it - cumulative_.begin(),
                                                  cumulative_.size() - 1));
}

namespace {

struct SgdContext {
    const TrainConfig* config;
    const NegativeSampler* sampler;
    std::int64_t total_pairs;
    std::atomic<std::int64_t> pairs_done{0};

    double learning_rate() const {
        if (total_pairs <= 0) return config->lr_initial;
        const double frac = std::min(
            1.0, static_cast<double>(pairs_done.load(std::memory_order_relaxed)) /
                     static_cast<double>(total_pairs));
        return config->lr_initial + (config->lr_final - config->lr_initial) * frac;
    }
};

// One positive/negative bundle around (center representation, context).
// Gradients follow ns_loss_grad exactly: the output rows are read before
// being written so the step uses the pre-update parameters.
void sgd_step(std::span<const double> center_rep, int context_idx, Mat& outputs,
              std::span<double> center_grad_accum, SgdContext& ctx,
              std::mt19937_64& rng) {
    const double lr = ctx.learning_rate();
    std::fill(center_grad_accum.begin(), center_grad_accum.end(), 0.0);

    const int rounds = ctx.config->negatives + 1;
    for (int t = 0; t < rounds; ++t) {
        int target = context_idx;
        double label = 1.0;
        if (t > 0) {
            target = ctx.sampler->sample(rng);
            if (target == context_idx) continue;  // dropped, word2vec convention
            label = 0.0;
        }
        auto out_row = outputs.row(target);
        const double coeff = (label - sigmoid(dot(center_rep, out_row))) * lr;
        axpy(coeff, out_row, center_grad_accum);
        axpy(coeff, center_rep, out_row);
    }
    ctx.pairs_done.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

EmbeddingModel train(const text::Corpus& corpus, const TrainConfig& config) {
    config.validate();
    if (config.kind == ModelKind::PvDbow)
        throw ValidationError("train: use train_pvdbow for pv-dbow models");

    EmbeddingModel model;
    model.vocab = Vocabulary::build(corpus, config.min_count);
    model.dimension = config.dimension;
    model.kind = config.kind;

    const std::size_t v = model.vocab.size();
    const int d = config.dimension;
    model.input_vectors = Mat(v, d);
    model.output_vectors = Mat(v, d);

    std::mt19937_64 rng_init(stage_seed(config.seed, "init"));

    // Per-word n-gram id lists for the char-ngram scoring function.
    std::vector<std::vector<int>> word_ngrams;
    if (config.kind == ModelKind::CharNgram) {
        model.ngram_min = config.ngram_min;
        model.ngram_max = config.ngram_max;
        word_ngrams.resize(v);
        for (std::size_t i = 0; i < v; ++i) {
            for (const auto& gram :
                 ngram_set(model.vocab.word(static_cast<int>(i)), config.ngram_min,
                           config.ngram_max)) {
                const auto [it, inserted] = model.ngram_index.emplace(
                    gram, static_cast<int>(model.ngram_index.size()));
                word_ngrams[i].push_back(it->second);
            }
        }
        model.ngram_vectors = Mat(model.ngram_index.size(), d);
        init_uniform(model.ngram_vectors, d, rng_init);
    } else {
        init_uniform(model.input_vectors, d, rng_init);
    }

    const auto docs = index_documents(corpus, model.vocab);
    const NegativeSampler sampler(model.vocab);
    SgdContext ctx;
    ctx.config = &config;
    ctx.sampler = &sampler;
    ctx.total_pairs = count_window_pairs(docs, config.context_window) * config.epochs;

    auto worker = [&](std::size_t doc_begin, std::size_t doc_end, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::vector<double> center_buf(d), grad_buf(d);
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            for (std::size_t di = doc_begin; di < doc_end; ++di) {
                const auto& doc = docs[di];
                const int n = static_cast<int>(doc.size());
                for (int t = 0; t < n; ++t) {
                    const int center = doc[t];
                    for (int j = -config.context_window; j <= config.context_window; ++j) {
                        if (j == 0) continue;
                        const int pos = t + j;
                        if (pos < 0 || pos >= n) continue;
                        std::span<const double> rep;
                        if (config.kind == ModelKind::CharNgram) {
                            std::fill(center_buf.begin(), center_buf.end(), 0.0);
                            for (int gid : word_ngrams[center])
                                axpy(1.0, model.ngram_vectors.row(gid), center_buf);
                            rep = center_buf;
                        } else {
                            rep = model.input_vectors.row(center);
                        }
                        sgd_step(rep, doc[pos], model.output_vectors, grad_buf, ctx, rng);
                        if (config.kind == ModelKind::CharNgram) {
                            for (int gid : word_ngrams[center])
                                axpy(1.0, grad_buf, model.ngram_vectors.row(gid));
                        } else {
                            axpy(1.0, grad_buf, model.input_vectors.row(center));
                        }
                    }
                }
            }
        }
    };

    const int threads =
        std::min(config.threads, static_cast<int>(std::max<std::size_t>(docs.size(), 1)));
    if (threads <= 1) {
        worker(0, docs.size(), stage_seed(config.seed, "train:0"));
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (docs.size() + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(docs.size(), w * chunk);
            const std::size_t end = std::min(docs.size(), begin + chunk);
            pool.emplace_back(worker, begin, end,
                              stage_seed(config.seed, "train:" + std::to_string(w)));
        }
        for (auto& th : pool) th.join();
    }

    if (config.kind == ModelKind::CharNgram) {
        // Cache the summed n-gram vectors as the per-word input rows.
        for (std::size_t i = 0; i < v; ++i) {
            auto row = model.input_vectors.row(i);
            std::fill(row.begin(), row.end(), 0.0);
            for (int gid : word_ngrams[i]) axpy(1.0, model.ngram_vectors.row(gid), row);
        }
    }
    return model;
}

ParagraphVectors train_pvdbow(const text::Corpus& corpus, const TrainConfig& config) {
    config.validate();
    Vocabulary vocab = Vocabulary::build(corpus, config.min_count);

    const int d = config.dimension;
    ParagraphVectors pv;
    for (const auto& doc : corpus.documents) pv.doc_ids.push_back(doc.id);
    pv.vectors = Mat(corpus.documents.size(), d);

    std::mt19937_64 rng_init(stage_seed(config.seed, "init"));
    init_uniform(pv.vectors, d, rng_init);
    Mat outputs(vocab.size(), d);

    const auto docs = index_documents(corpus, vocab);
    const NegativeSampler sampler(vocab);
    SgdContext ctx;
    ctx.config = &config;
    ctx.sampler = &sampler;
    std::int64_t targets_per_epoch = 0;
    for (const auto& doc : docs)
        targets_per_epoch += static_cast<std::int64_t>(doc.size()) * config.context_window;
    ctx.total_pairs = targets_per_epoch * config.epochs;

    std::mt19937_64 rng(stage_seed(config.seed, "train:0"));
    std::vector<double> grad_buf(d);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t di = 0; di < docs.size(); ++di) {
            const auto& doc = docs[di];
            if (doc.empty()) continue;
            auto para = pv.vectors.row(di);
            for (std::size_t step = 0; step < doc.size(); ++step) {
                for (int k = 0; k < config.context_window; ++k) {
                    const int target =
                        doc[static_cast<std::size_t>(uniform_below(rng, doc.size()))];
                    sgd_step(para, target, outputs, grad_buf, ctx, rng);
                    axpy(1.0, grad_buf, para);
                }
            }
        }
    }
    return pv;
}

std::vector<double> pool(const std::vector<std::vector<double>>& vectors,
                         const std::vector<double>& weights) {
    if (vectors.empty()) throw ValidationError("pool: empty input");
    if (vectors.size() != weights.size())
        throw ValidationError("pool: vectors/weights length mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ValidationError("pool: negative weight");
        total += w;
    }
    if (total == 0.0) throw ValidationError("pool: weights sum to zero");

    std::vector<double> out(vectors.front().size(), 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != out.size())
            throw ValidationError("pool: inconsistent vector dimensions");
        axpy(weights[i] / total, vectors[i], out);
    }
    return out;
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path,
                const std::string& header_comment) {
    auto out = detail::open_output(path, "embedding file");
    std::string comment = header_comment;
    if (model.kind == ModelKind::CharNgram) {
        comment += (comment.empty() ? "" : " ");
        comment += "kind=char-ngram ngram_min=" + std::to_string(model.ngram_min) +
                   " ngram_max=" + std::to_string(model.ngram_max);
    }
    detail::write_comment(out, comment);
    out << model.vocab.size() << " " << model.dimension << "\n";
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
        out << model.vocab.word(static_cast<int>(i));
        for (double x : model.input_vectors.row(i)) out << " " << detail::format_double(x);
        out << "\n";
    }
    if (model.kind == ModelKind::CharNgram) {
        out << "#ngrams " << model.ngram_index.size() << " " << model.dimension << "\n";
        for (const auto& [gram, idx] : model.ngram_index) {
            out << gram;
            for (double x : model.ngram_vectors.row(idx)) out << " " << detail::format_double(x);
            out << "\n";
        }
    }
}

namespace {

// One `name v1 .. vd` line.
void parse_vector_line(const std::string& line, int dim, std::size_t lineno,
                       std::string& name, std::vector<double>& values) {
    std::istringstream in(line);
    if (!(in >> name))
        throw ValidationError("embedding file line " + std::to_string(lineno) + " is empty");
    values.clear();
    std::string tok;
    while (in >> tok)
        values.push_back(detail::parse_double(tok, "embedding file line " + std::to_string(lineno)));
    if (static_cast<int>(values.size()) != dim)
        throw ValidationError("embedding file line " + std::to_string(lineno) + ": expected " +
                              std::to_string(dim) + " values, got " +
                              std::to_string(values.size()));
    for (double x : values)
        if (!std::isfinite(x))
            throw ValidationError("embedding file line " + std::to_string(lineno) +
                                  ": non-finite value");
}

}  // namespace

EmbeddingModel load_model(const std::filesystem::path& path) {
    auto in = detail::open_input(path, "embedding file");
    std::vector<std::string> comments;
    std::string line;
    std::size_t lineno = 0;

    // Leading comment lines carry optional writer metadata.
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') {
            comments.push_back(line.substr(1));
        } else if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        } else {
            break;
        }
    }
    std::istringstream header(line);
    long long v = 0, d = 0;
    if (!(header >> v >> d) || v < 1 || d < 1)
        throw ValidationError("embedding file " + path.string() + ": malformed `V d` header");

    EmbeddingModel model;
    model.dimension = static_cast<int>(d);
    std::vector<std::string> words;
    Mat inputs(v, d);
    std::string name;
    std::vector<double> values;
    for (long long i = 0; i < v; ++i) {
        if (!std::getline(in, line))
            throw ValidationError("embedding file " + path.string() + ": truncated word section");
        ++lineno;
        parse_vector_line(line, model.dimension, lineno, name, values);
        words.push_back(name);
        std::copy(values.begin(), values.end(), inputs.row(i).begin());
    }
    model.vocab = Vocabulary::from_words(std::move(words));
    model.input_vectors = std::move(inputs);
    model.output_vectors = Mat(v, d);

    // Optional `#ngrams G d` section.
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.rfind("#ngrams", 0) != 0)
            throw ValidationError("embedding file line " + std::to_string(lineno) +
                                  ": unexpected content after word section");
        std::istringstream nh(line.substr(7));
        long long g = 0, gd = 0;
        if (!(nh >> g >> gd) || g < 0 || gd != d)
            throw ValidationError("embedding file line " + std::to_string(lineno) +
                                  ": malformed `#ngrams G d` header");
        model.kind = ModelKind::CharNgram;
        model.ngram_vectors = Mat(g, d);
        for (long long i = 0; i < g; ++i) {
            if (!std::getline(in, line))
                throw ValidationError("embedding file " + path.string() +
                                      ": truncated n-gram section");
            ++lineno;
            parse_vector_line(line, model.dimension, lineno, name, values);
            const auto [it, inserted] = model.ngram_index.emplace(name, static_cast<int>(i));
            if (!inserted)
                throw ValidationError("embedding file line " + std::to_string(lineno) +
                                      ": duplicate n-gram \"" + name + "\"");
            std::copy(values.begin(), values.end(), model.ngram_vectors.row(i).begin());
        }
    }

    const auto meta = detail::comment_metadata(comments);
    if (model.kind == ModelKind::CharNgram) {
        model.ngram_min = meta.count("ngram_min")
                              ? static_cast<int>(detail::parse_int(meta.at("ngram_min"),
                                                                   "ngram_min metadata"))
                              : 3;
        model.ngram_max = meta.count("ngram_max")
                              ? static_cast<int>(detail::parse_int(meta.at("ngram_max"),
                                                                   "ngram_max metadata"))
                              : 6;
    }
    return model;
}

void save_paragraph_vectors(const ParagraphVectors& pv, const std::filesystem::path& path,
                            const std::string& header_comment) {
    auto out = detail::open_output(path, "paragraph vector file");
    detail::write_comment(out, header_comment);
    out << pv.doc_ids.size() << " " << pv.vectors.cols() << "\n";
    for (std::size_t i = 0; i < pv.doc_ids.size(); ++i) {
        out << pv.doc_ids[i];
        for (double x : pv.vectors.row(i)) out << " " << detail::format_double(x);
        out << "\n";
    }
}

}  // namespace readlm::embed
