#include "readlm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "io_util.hpp"

namespace readlm::cluster {

namespace {

int nearest_centroid(std::span<const double> v, const Mat& centroids) {
    int best = 0;
    double best_d = squared_distance(v, centroids.row(0));
    for (std::size_t j = 1; j < centroids.rows(); ++j) {
        const double d = squared_distance(v, centroids.row(j));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

std::size_t count_distinct_rows(const Mat& points) {
    std::vector<std::size_t> order(points.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto less = [&](std::size_t a, std::size_t b) {
        const auto ra = points.row(a), rb = points.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = points.rows() == 0 ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (less(order[i - 1], order[i])) ++distinct;
    return distinct;
}

void seed_plusplus(const Mat& points, Mat& centroids, std::mt19937_64& rng) {
    const std::size_t n = points.rows();
    const std::size_t first = static_cast<std::size_t>(uniform_below(rng, n));
    std::copy(points.row(first).begin(), points.row(first).end(), centroids.row(0).begin());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
        d2[i] = squared_distance(points.row(i), centroids.row(0));
    for (std::size_t j = 1; j < centroids.rows(); ++j) {
        double total = 0.0;
        for (double d : d2) total += d;
        const double r = uniform01(rng) * total;
        std::size_t pick = n;
        double cum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cum += d2[i];
            if (d2[i] > 0.0 && r < cum) {
                pick = i;
                break;
            }
        }
        if (pick == n) {
            // r landed past the last positive mass; take the final candidate
            for (std::size_t i = n; i-- > 0;)
                if (d2[i] > 0.0) {
                    pick = i;
                    break;
                }
        }
        std::copy(points.row(pick).begin(), points.row(pick).end(), centroids.row(j).begin());
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(j)));
    }
}

}  // namespace

KMeansModel kmeans_fit(const Mat& points, int k, int max_iters, std::uint64_t seed,
                       KMeansTrace* trace) {
    if (points.rows() == 0) throw ValidationError("kmeans_fit: empty input");
    if (k < 1) throw ValidationError("kmeans_fit: K must be >= 1");
    if (max_iters < 1) throw ValidationError("kmeans_fit: max_iters must be >= 1");
    const std::size_t distinct = count_distinct_rows(points);
    if (static_cast<std::size_t>(k) > distinct)
        throw ValidationError("kmeans_fit: K=" + std::to_string(k) + " exceeds " +
                              std::to_string(distinct) + " distinct points");

    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    std::mt19937_64 rng(seed);
    KMeansModel model;
    model.k = k;
    model.centroids = Mat(k, d);
    seed_plusplus(points, model.centroids, rng);

    KMeansTrace local;
    std::vector<int> assign(n, -1), prev(n, -1);
    std::vector<std::size_t> sizes(k);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            assign[i] = nearest_centroid(points.row(i), model.centroids);
        const bool fixpoint = assign == prev;
        prev = assign;

        Mat sums(k, d);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            axpy(1.0, points.row(i), sums.row(assign[i]));
            ++sizes[assign[i]];
        }
        for (int j = 0; j < k; ++j) {
            if (sizes[j] == 0) continue;
            auto row = model.centroids.row(j);
            for (std::size_t c = 0; c < d; ++c) row[c] = sums.at(j, c) / sizes[j];
        }

        // Re-seed each empty cluster at the unclaimed point farthest from
        // its assigned centroid.
        bool repaired = false;
        std::vector<char> claimed(n, 0);
        for (int j = 0; j < k; ++j) {
            if (sizes[j] != 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (claimed[i]) continue;
                const double dist =
                    squared_distance(points.row(i), model.centroids.row(assign[i]));
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            std::copy(points.row(far).begin(), points.row(far).end(),
                      model.centroids.row(j).begin());
            claimed[far] = 1;
            repaired = true;
        }

        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sse += squared_distance(points.row(i), model.centroids.row(assign[i]));
        local.sse_per_iter.push_back(sse);
        ++local.iterations;
        if (fixpoint && !repaired) {
            local.converged = true;
            break;
        }
    }
    if (trace) *trace = std::move(local);
    return model;
}

KMeansModel kmeans_fit_best(const Mat& points, int k, int max_iters, std::uint64_t seed,
                            int restarts, KMeansTrace* trace) {
    if (restarts < 1) throw ValidationError("kmeans_fit_best: restarts must be >= 1");
    KMeansModel best;
    KMeansTrace best_trace;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        KMeansTrace t;
        KMeansModel m = kmeans_fit(points, k, max_iters, seed + static_cast<std::uint64_t>(r), &t);
        const double sse = kmeans_sse(points, m);
        if (sse < best_sse) {
            best_sse = sse;
            best = std::move(m);
            best_trace = std::move(t);
        }
    }
    if (trace) *trace = std::move(best_trace);
    return best;
}

int kmeans_assign(std::span<const double> v, const KMeansModel& model) {
    if (model.centroids.rows() == 0) throw ValidationError("kmeans_assign: empty model");
    if (v.size() != model.centroids.cols())
        throw ValidationError("kmeans_assign: vector dimension " + std::to_string(v.size()) +
                              " does not match centroid dimension " +
                              std::to_string(model.centroids.cols()));
    return nearest_centroid(v, model.centroids);
}

double kmeans_sse(const Mat& points, const KMeansModel& model) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const int j = kmeans_assign(points.row(i), model);
        sse += squared_distance(points.row(i), model.centroids.row(j));
    }
    return sse;
}

void save_kmeans(const KMeansModel& model, const std::filesystem::path& path,
                 const std::string& header_comment) {
    auto out = detail::open_output(path, "k-means model file");
    detail::write_comment(out, header_comment);
    out << model.k << " " << model.centroids.cols() << "\n";
    for (int j = 0; j < model.k; ++j) {
        out << "centroid_" << j;
        for (double x : model.centroids.row(j)) out << " " << detail::format_double(x);
        out << "\n";
    }
}

KMeansModel load_kmeans(const std::filesystem::path& path) {
    auto in = detail::open_input(path, "k-means model file");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        break;
    }
    std::istringstream header(line);
    long long k = 0, d = 0;
    if (!(header >> k >> d) || k < 1 || d < 1)
        throw ValidationError("k-means model file " + path.string() + ": malformed `K d` header");

    KMeansModel model;
    model.k = static_cast<int>(k);
    model.centroids = Mat(k, d);
    for (long long j = 0; j < k; ++j) {
        if (!std::getline(in, line))
            throw ValidationError("k-means model file " + path.string() + ": truncated");
        ++lineno;
        std::istringstream row(line);
        std::string name, tok;
        if (!(row >> name))
            throw ValidationError("k-means model file line " + std::to_string(lineno) +
                                  " is empty");
        std::size_t c = 0;
        while (row >> tok) {
            if (c == static_cast<std::size_t>(d)) break;
            const double x =
                detail::parse_double(tok, "k-means model file line " + std::to_string(lineno));
            if (!std::isfinite(x))
                throw ValidationError("k-means model file line " + std::to_string(lineno) +
                                      ": non-finite value");
            model.centroids.at(j, c++) = x;
        }
        if (c != static_cast<std::size_t>(d) || row >> tok)
            throw ValidationError("k-means model file line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(d) + " values");
    }
    return model;
}

double brown_quality(const text::Corpus& corpus,
                     const std::unordered_map<std::string, int>& class_of) {
    int max_class = -1;
    for (const auto& [word, cls] : class_of) {
        if (cls < 0)
            throw ValidationError("brown_quality: negative class id for \"" + word + "\"");
        max_class = std::max(max_class, cls);
    }
    const int n_classes = max_class + 1;
    std::vector<std::int64_t> joint(static_cast<std::size_t>(n_classes) * n_classes, 0);
    std::vector<std::int64_t> left(n_classes, 0), right(n_classes, 0);
    std::int64_t total = 0;
    for (const auto& doc : corpus.documents) {
        int prev = -1;
        for (const auto& tok : doc.tokens) {
            const auto it = class_of.find(tok);
            if (it == class_of.end())
                throw ValidationError("brown_quality: word \"" + tok +
                                      "\" not covered by the class map");
            if (prev >= 0) {
                ++joint[static_cast<std::size_t>(prev) * n_classes + it->second];
                ++left[prev];
                ++right[it->second];
                ++total;
            }
            prev = it->second;
        }
    }
    if (total == 0) return 0.0;

    const double b = static_cast<double>(total);
    double mi = 0.0;
    for (int c1 = 0; c1 < n_classes; ++c1) {
        for (int c2 = 0; c2 < n_classes; ++c2) {
            const std::int64_t n = joint[static_cast<std::size_t>(c1) * n_classes + c2];
            if (n == 0) continue;
            const double p = n / b;
            const double pl = left[c1] / b;
            const double pr = right[c2] / b;
            mi += p * std::log(p / (pl * pr));
        }
    }
    return mi;
}

namespace {

// One summand of the average mutual information; 0 log 0 := 0.
double mi_term(double joint, double left, double right) {
    if (joint <= 0.0) return 0.0;
    return joint * std::log(joint / (left * right));
}

}  // namespace

BrownModel brown_fit(const text::Corpus& corpus, int k, std::int64_t min_count) {
    if (k < 1) throw ValidationError("brown_fit: K must be >= 1");
    if (min_count < 1) throw ValidationError("brown_fit: min_count must be >= 1");

    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& doc : corpus.documents)
        for (const auto& tok : doc.tokens) ++counts[tok];
    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (const auto& [word, count] : counts)
        if (count >= min_count) kept.emplace_back(word, count);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const int v = static_cast<int>(kept.size());
    if (v < k)
        throw ValidationError("brown_fit: corpus has " + std::to_string(v) +
                              " distinct words above min_count, need at least " +
                              std::to_string(k));

    BrownModel model;
    model.k = k;
    model.initial_words.reserve(v);
    std::unordered_map<std::string, int> id;
    for (int i = 0; i < v; ++i) {
        model.initial_words.push_back(kept[i].first);
        id.emplace(kept[i].first, i);
    }

    // Bigram probabilities over kept tokens; dropped tokens splice their
    // neighbors together.
    Mat p(v, v);
    std::vector<double> pl(v, 0.0), pr(v, 0.0);
    {
        std::int64_t total = 0;
        for (const auto& doc : corpus.documents) {
            int prev = -1;
            for (const auto& tok : doc.tokens) {
                const auto it = id.find(tok);
                if (it == id.end()) continue;
                if (prev >= 0) {
                    p.at(prev, it->second) += 1.0;
                    ++total;
                }
                prev = it->second;
            }
        }
        if (total > 0)
            for (double& x : p.data()) x /= static_cast<double>(total);
        for (int i = 0; i < v; ++i)
            for (int j = 0; j < v; ++j) {
                pl[i] += p.at(i, j);
                pr[j] += p.at(i, j);
            }
    }

    // q holds each pair's MI contribution; s[x] sums every term involving
    // class x. All tables are indexed by initial class id throughout; merged
    // classes keep the lower id and the higher id goes inactive.
    Mat q(v, v);
    std::vector<double> s(v, 0.0);
    for (int i = 0; i < v; ++i)
        for (int j = 0; j < v; ++j) q.at(i, j) = mi_term(p.at(i, j), pl[i], pr[j]);
    for (int x = 0; x < v; ++x) {
        double sum = 0.0;
        for (int c = 0; c < v; ++c) sum += q.at(x, c) + q.at(c, x);
        s[x] = sum - q.at(x, x);
    }

    std::vector<char> active(v, 1);
    auto pair_loss = [&](int x, int y) {
        const double plm = pl[x] + pl[y], prm = pr[x] + pr[y];
        double added = mi_term(p.at(x, x) + p.at(x, y) + p.at(y, x) + p.at(y, y), plm, prm);
        for (int c = 0; c < v; ++c) {
            if (!active[c] || c == x || c == y) continue;
            added += mi_term(p.at(x, c) + p.at(y, c), plm, pr[c]);
            added += mi_term(p.at(c, x) + p.at(c, y), pl[c], prm);
        }
        return s[x] + s[y] - q.at(x, y) - q.at(y, x) - added;
    };

    Mat loss(v, v);
    for (int x = 0; x < v; ++x)
        for (int y = x + 1; y < v; ++y) loss.at(x, y) = pair_loss(x, y);

    std::vector<std::vector<int>> members(v);
    for (int i = 0; i < v; ++i) members[i] = {i};

    std::vector<double> row_a(v), col_a(v), row_b(v), col_b(v), ds(v);
    int active_count = v;
    while (active_count > k) {
        int a = -1, b = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int x = 0; x < v; ++x) {
            if (!active[x]) continue;
            for (int y = x + 1; y < v; ++y) {
                if (!active[y]) continue;
                if (loss.at(x, y) < best) {
                    best = loss.at(x, y);
                    a = x;
                    b = y;
                }
            }
        }

        const double pla = pl[a], plb = pl[b], pra = pr[a], prb = pr[b];
        for (int c = 0; c < v; ++c) {
            row_a[c] = p.at(a, c);
            col_a[c] = p.at(c, a);
            row_b[c] = p.at(b, c);
            col_b[c] = p.at(c, b);
        }

        // How each surviving class's term sum changes when a and b fuse.
        for (int x = 0; x < v; ++x) {
            if (!active[x] || x == a || x == b) continue;
            ds[x] = -q.at(x, a) - q.at(a, x) - q.at(x, b) - q.at(b, x) +
                    mi_term(col_a[x] + col_b[x], pl[x], pra + prb) +
                    mi_term(row_a[x] + row_b[x], pla + plb, pr[x]);
        }

        // Candidate pairs not touching a or b see the merge only through
        // the a/b rows and columns; patch their losses in O(1) each.
        for (int x = 0; x < v; ++x) {
            if (!active[x] || x == a || x == b) continue;
            for (int y = x + 1; y < v; ++y) {
                if (!active[y] || y == a || y == b) continue;
                const double plxy = pl[x] + pl[y], prxy = pr[x] + pr[y];
                double delta = ds[x] + ds[y];
                delta += mi_term(col_a[x] + col_a[y], plxy, pra) +
                         mi_term(row_a[x] + row_a[y], pla, prxy) +
                         mi_term(col_b[x] + col_b[y], plxy, prb) +
                         mi_term(row_b[x] + row_b[y], plb, prxy);
                delta -= mi_term(col_a[x] + col_a[y] + col_b[x] + col_b[y], plxy, pra + prb) +
                         mi_term(row_a[x] + row_a[y] + row_b[x] + row_b[y], pla + plb, prxy);
                loss.at(x, y) += delta;
            }
        }

        for (int c = 0; c < v; ++c) {
            if (!active[c] || c == a || c == b) continue;
            p.at(a, c) = row_a[c] + row_b[c];
            p.at(c, a) = col_a[c] + col_b[c];
        }
        p.at(a, a) = row_a[a] + row_a[b] + row_b[a] + row_b[b];
        for (int c = 0; c < v; ++c) {
            p.at(b, c) = 0.0;
            p.at(c, b) = 0.0;
        }
        pl[a] = pla + plb;
        pr[a] = pra + prb;
        pl[b] = pr[b] = 0.0;
        active[b] = 0;
        --active_count;

        for (int c = 0; c < v; ++c) {
            if (!active[c]) continue;
            q.at(a, c) = mi_term(p.at(a, c), pl[a], pr[c]);
            q.at(c, a) = mi_term(p.at(c, a), pl[c], pr[a]);
        }
        double sa = 0.0;
        for (int c = 0; c < v; ++c)
            if (active[c]) sa += q.at(a, c) + q.at(c, a);
        s[a] = sa - q.at(a, a);
        for (int x = 0; x < v; ++x)
            if (active[x] && x != a) s[x] += ds[x];
        for (int x = 0; x < v; ++x) {
            if (!active[x] || x == a) continue;
            loss.at(std::min(x, a), std::max(x, a)) = pair_loss(std::min(x, a), std::max(x, a));
        }

        members[a].insert(members[a].end(), members[b].begin(), members[b].end());
        members[b].clear();
        model.merges.emplace_back(a, b);
    }

    int next = 0;
    for (int c = 0; c < v; ++c) {
        if (!active[c]) continue;
        for (int w : members[c]) model.class_of.emplace(model.initial_words[w], next);
        ++next;
    }
    return model;
}

int brown_assign(const std::string& word, const BrownModel& model) {
    const auto it = model.class_of.find(word);
    if (it == model.class_of.end()) throw OovError(word);
    return it->second;
}

void save_brown(const BrownModel& model, const std::filesystem::path& path,
                const std::filesystem::path& merges_path, const std::string& header_comment) {
    auto out = detail::open_output(path, "brown model file");
    detail::write_comment(out, header_comment);
    if (!model.initial_words.empty()) {
        for (const auto& word : model.initial_words)
            out << word << "\t" << model.class_of.at(word) << "\n";
    } else {
        std::vector<std::pair<std::string, int>> rows(model.class_of.begin(),
                                                      model.class_of.end());
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;
        });
        for (const auto& [word, cls] : rows) out << word << "\t" << cls << "\n";
    }
    if (!merges_path.empty()) {
        auto mout = detail::open_output(merges_path, "brown merge history file");
        detail::write_comment(mout, header_comment);
        for (const auto& [kept, absorbed] : model.merges)
            mout << kept << "\t" << absorbed << "\t" << model.initial_words[kept] << "\t"
                 << model.initial_words[absorbed] << "\n";
    }
}

BrownModel load_brown(const std::filesystem::path& path) {
    auto in = detail::open_input(path, "brown model file");
    BrownModel model;
    std::string line;
    std::size_t lineno = 0;
    int max_class = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') continue;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw ValidationError("brown model file line " + std::to_string(lineno) +
                                  ": expected word<TAB>class_id");
        const std::string word = line.substr(0, tab);
        const long long cls = detail::parse_int(
            line.substr(tab + 1), "brown model file line " + std::to_string(lineno));
        if (cls < 0)
            throw ValidationError("brown model file line " + std::to_string(lineno) +
                                  ": negative class id");
        if (!model.class_of.emplace(word, static_cast<int>(cls)).second)
            throw ValidationError("brown model file line " + std::to_string(lineno) +
                                  ": duplicate word \"" + word + "\"");
        max_class = std::max(max_class, static_cast<int>(cls));
    }
    if (model.class_of.empty())
        throw ValidationError("brown model file " + path.string() + ": no entries");
    model.k = max_class + 1;
    std::vector<char> seen(model.k, 0);
    for (const auto& [word, cls] : model.class_of) seen[cls] = 1;
    for (int c = 0; c < model.k; ++c)
        if (!seen[c])
            throw ValidationError("brown model file " + path.string() +
                                  ": class ids are not dense 0..K-1");
    return model;
}

}  // namespace readlm::cluster
