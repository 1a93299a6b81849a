#include "readlm/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "io_util.hpp"

namespace readlm::featurize {

std::string_view scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::HistogramCount: return "histogram-count";
        case Scheme::HistogramBinary: return "histogram-binary";
        case Scheme::PooledUniform: return "pooled-uniform";
        case Scheme::PooledTfidf: return "pooled-tfidf";
        case Scheme::Bow: return "bow";
    }
    throw ValidationError("unknown feature scheme");
}

Scheme parse_scheme(std::string_view name) {
    if (name == "histogram-count") return Scheme::HistogramCount;
    if (name == "histogram-binary") return Scheme::HistogramBinary;
    if (name == "pooled-uniform") return Scheme::PooledUniform;
    if (name == "pooled-tfidf") return Scheme::PooledTfidf;
    if (name == "bow") return Scheme::Bow;
    throw ValidationError("unknown feature scheme: \"" + std::string(name) + "\"");
}

IdfTable IdfTable::build(const text::Corpus& corpus) {
    if (corpus.documents.empty()) throw ValidationError("IdfTable: empty corpus");
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : corpus.documents) {
        std::unordered_map<std::string, char> seen;
        for (const auto& tok : doc.tokens)
            if (seen.emplace(tok, 1).second) ++df[tok];
    }
    IdfTable table;
    table.n_docs_ = corpus.documents.size();
    const double n = static_cast<double>(table.n_docs_);
    for (const auto& [word, count] : df)
        table.idf_.emplace(word, std::log(n / static_cast<double>(count)));
    return table;
}

double IdfTable::value(const std::string& word) const {
    const auto it = idf_.find(word);
    if (it != idf_.end()) return it->second;
    return std::log(static_cast<double>(n_docs_));
}

FeatureVector cluster_histogram(const text::Document& doc, const WordAssigner& assign, int k,
                                bool binary) {
    if (k < 1) throw ValidationError("cluster_histogram: K must be >= 1");
    FeatureVector out;
    out.scheme = binary ? Scheme::HistogramBinary : Scheme::HistogramCount;
    out.values.assign(k, 0.0);
    for (const auto& tok : doc.tokens) {
        const auto cls = assign(tok);
        if (!cls) continue;
        if (*cls < 0 || *cls >= k)
            throw ValidationError("cluster_histogram: assigner returned " +
                                  std::to_string(*cls) + " outside 0.." + std::to_string(k - 1));
        if (binary)
            out.values[*cls] = 1.0;
        else
            out.values[*cls] += 1.0;
    }
    return out;
}

FeatureVector unit_normalize(const FeatureVector& v) {
    FeatureVector out = v;
    const double norm = l2_norm(out.values);
    if (norm > 0.0)
        for (double& x : out.values) x /= norm;
    return out;
}

std::string_view normalize_name(Normalize mode) {
    switch (mode) {
        case Normalize::Auto: return "auto";
        case Normalize::On: return "on";
        case Normalize::Off: return "off";
    }
    throw ValidationError("unknown normalize mode");
}

Normalize parse_normalize(std::string_view name) {
    if (name == "auto") return Normalize::Auto;
    if (name == "on") return Normalize::On;
    if (name == "off") return Normalize::Off;
    throw ValidationError("unknown normalize mode: \"" + std::string(name) + "\"");
}

bool should_normalize(Scheme scheme, Normalize mode) {
    if (mode == Normalize::On) return true;
    if (mode == Normalize::Off) return false;
    return scheme == Scheme::HistogramCount || scheme == Scheme::Bow;
}

FeatureVector pooled_feature(const text::Document& doc, const embed::EmbeddingModel& model,
                             Scheme weighting, const IdfTable* idf) {
    if (weighting != Scheme::PooledUniform && weighting != Scheme::PooledTfidf)
        throw ValidationError("pooled_feature: weighting must be pooled-uniform or pooled-tfidf");
    if (weighting == Scheme::PooledTfidf && idf == nullptr)
        throw ValidationError("pooled_feature: tfidf weighting requires an idf table");

    std::vector<std::vector<double>> vectors;
    std::vector<double> weights;
    if (weighting == Scheme::PooledUniform) {
        for (const auto& tok : doc.tokens) {
            if (!model.has_vector(tok)) continue;
            vectors.push_back(embed::word_vector(tok, model));
            weights.push_back(1.0);
        }
    } else {
        std::unordered_map<std::string, std::size_t> tf;
        std::vector<std::string> order;
        for (const auto& tok : doc.tokens) {
            if (!model.has_vector(tok)) continue;
            if (++tf[tok] == 1) order.push_back(tok);
        }
        for (const auto& word : order) {
            vectors.push_back(embed::word_vector(word, model));
            weights.push_back(static_cast<double>(tf.at(word)) * idf->value(word));
        }
    }
    if (vectors.empty())
        throw ValidationError("pooled_feature: document \"" + doc.id +
                              "\" has no in-model tokens");

    FeatureVector out;
    out.scheme = weighting;
    out.values = embed::pool(vectors, weights);
    return out;
}

FeatureVector bow_feature(const text::Document& doc, const embed::Vocabulary& vocab) {
    FeatureVector out;
    out.scheme = Scheme::Bow;
    out.values.assign(vocab.size(), 0.0);
    for (const auto& tok : doc.tokens) {
        const auto idx = vocab.index_of(tok);
        if (idx) out.values[*idx] += 1.0;
    }
    return out;
}

WordAssigner make_kmeans_assigner(const cluster::KMeansModel& kmeans,
                                  const embed::EmbeddingModel& embeddings) {
    return [&kmeans, &embeddings](const std::string& word) -> std::optional<int> {
        if (!embeddings.has_vector(word)) return std::nullopt;
        return cluster::kmeans_assign(embed::word_vector(word, embeddings), kmeans);
    };
}

WordAssigner make_brown_assigner(const cluster::BrownModel& brown) {
    return [&brown](const std::string& word) -> std::optional<int> {
        const auto it = brown.class_of.find(word);
        if (it == brown.class_of.end()) return std::nullopt;
        return it->second;
    };
}

void save_features(const FeatureFile& features, const std::filesystem::path& path,
                   const std::string& header_comment) {
    auto out = detail::open_output(path, "feature file");
    detail::write_comment(out, header_comment);
    detail::write_comment(out, "scheme=" + std::string(scheme_name(features.scheme)));
    for (const auto& row : features.rows) {
        out << row.doc_id << "\t";
        if (row.label)
            out << detail::format_double(*row.label);
        else
            out << "NA";
        out << "\t";
        for (std::size_t i = 0; i < row.values.size(); ++i) {
            if (i) out << ",";
            out << detail::format_double(row.values[i]);
        }
        out << "\n";
    }
}

FeatureFile load_features(const std::filesystem::path& path) {
    auto in = detail::open_input(path, "feature file");
    FeatureFile features;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> comments;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') {
            comments.push_back(line.substr(1));
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        const std::string where = "feature file line " + std::to_string(lineno);
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab1 == 0 || tab2 == std::string::npos)
            throw ValidationError(where + ": expected doc_id<TAB>label<TAB>values");

        FeatureRow row;
        row.doc_id = line.substr(0, tab1);
        const std::string label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        if (label != "NA") row.label = detail::parse_double(label, where);

        std::istringstream values(line.substr(tab2 + 1));
        std::string tok;
        while (std::getline(values, tok, ','))
            row.values.push_back(detail::parse_double(tok, where));
        if (row.values.empty()) throw ValidationError(where + ": no feature values");
        if (!features.rows.empty() && row.values.size() != features.rows.front().values.size())
            throw ValidationError(where + ": inconsistent feature length");
        features.rows.push_back(std::move(row));
    }
    if (features.rows.empty())
        throw ValidationError("feature file " + path.string() + ": no rows");

    const auto meta = detail::comment_metadata(comments);
    if (meta.count("scheme")) features.scheme = parse_scheme(meta.at("scheme"));
    return features;
}

}  // namespace readlm::featurize
