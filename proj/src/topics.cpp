#include "toxtrace/topics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "toxtrace/error.hpp"
#include "toxtrace/util.hpp"

namespace toxtrace {

std::string HashEmbedder::id() const {
    return "hash-unigram-" + std::to_string(dim_);
}

void HashEmbedder::embed_one(std::string_view text, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    std::string token;
    auto flush = [&] {
        if (!token.empty()) out[fnv1a64(token) % dim_] += 1.0;
        token.clear();
    };
    for (char c : text) {
        if (is_alnum_ascii(c)) token += to_lower_ascii(c);
        else flush();
    }
    flush();
    double norm_sq = 0.0;
    for (double v : out) norm_sq += v * v;
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : out) v *= inv;
    }
}

EmbeddingMatrix embed(const std::vector<std::string>& texts,
                      const EmbeddingProvider& provider, int threads) {
    EmbeddingMatrix out;
    out.provider_id = provider.id();
    out.vectors = Matrix(texts.size(), provider.dim());
    parallel_for(texts.size(), threads, [&](std::size_t i) {
        provider.embed_one(texts[i], out.vectors.row(i));
    });
    return out;
}

namespace {

constexpr double kPowerIterTolerance = 1e-9;
constexpr std::size_t kPowerIterMax = 20000;

// Dominant eigenpair of a symmetric matrix via power iteration, kept
// orthogonal to the `ndone` components already extracted. When the residual
// spectrum is (numerically) zero the basis is completed with an arbitrary
// direction orthogonal to the extracted ones.
double dominant_eigenpair(const Matrix& sym, std::uint64_t seed, const Matrix& done,
                          std::size_t ndone, std::vector<double>& vec) {
    const std::size_t n = sym.cols;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    vec.assign(n, 0.0);
    for (double& v : vec) v = unit(rng);

    auto orthogonalize = [&](std::vector<double>& v) {
        for (std::size_t c = 0; c < ndone; ++c) {
            auto comp = done.row(c);
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += v[j] * comp[j];
            for (std::size_t j = 0; j < n; ++j) v[j] -= dot * comp[j];
        }
    };
    auto try_normalize = [&](std::vector<double>& v) {
        double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norm < 1e-12) return false;
        for (double& x : v) x /= norm;
        return true;
    };
    auto reset_to_free_direction = [&](std::vector<double>& v) {
        for (std::size_t j = 0; j < n; ++j) {
            v.assign(n, 0.0);
            v[j] = 1.0;
            orthogonalize(v);
            if (try_normalize(v)) return;
        }
    };

    orthogonalize(vec);
    if (!try_normalize(vec)) reset_to_free_direction(vec);

    std::vector<double> next(n);
    double lambda = 0.0;
    for (std::size_t iter = 0; iter < kPowerIterMax; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += sym.at(i, j) * vec[j];
            next[i] = acc;
        }
        double new_lambda =
            std::inner_product(vec.begin(), vec.end(), next.begin(), 0.0);
        orthogonalize(next);
        if (!try_normalize(next)) {
            // residual is zero along this direction: complete the basis
            reset_to_free_direction(next);
            vec = next;
            lambda = 0.0;
            break;
        }
        // sign-insensitive distance between successive directions
        double diff_same = 0.0, diff_flip = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diff_same += (next[i] - vec[i]) * (next[i] - vec[i]);
            diff_flip += (next[i] + vec[i]) * (next[i] + vec[i]);
        }
        vec = next;
        if (std::min(diff_same, diff_flip) < kPowerIterTolerance * kPowerIterTolerance &&
            std::abs(new_lambda - lambda) < kPowerIterTolerance * std::max(1.0, std::abs(new_lambda))) {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    return lambda;
}

} // namespace

Matrix PcaReducer::reduce(const Matrix& input, std::size_t d, std::uint64_t seed) const {
    const std::size_t n = input.rows;
    const std::size_t dim = input.cols;
    if (d > dim)
        throw Error(ErrorKind::input, "reduce: target dimension " + std::to_string(d) +
                                          " exceeds input dimension " + std::to_string(dim));
    if (n < 2)
        throw Error(ErrorKind::input, "reduce: need at least 2 rows");

    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = input.row(i);
        for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    Matrix centered(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            centered.at(i, j) = input.at(i, j) - mean[j];

    // sample covariance, deflated in place as components are extracted
    Matrix cov(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = centered.row(i);
        for (std::size_t a = 0; a < dim; ++a) {
            double ra = row[a];
            if (ra == 0.0) continue;
            for (std::size_t b = 0; b < dim; ++b) cov.at(a, b) += ra * row[b];
        }
    }
    double denom = static_cast<double>(n - 1);
    for (double& v : cov.data) v /= denom;

    Matrix components(d, dim);
    std::vector<double> vec;
    for (std::size_t c = 0; c < d; ++c) {
        double lambda = dominant_eigenpair(
            cov, derive_seed(seed, "pca-" + std::to_string(c)), components, c, vec);
        // largest-magnitude loading positive; ties resolved by lowest index
        std::size_t arg = 0;
        for (std::size_t j = 1; j < dim; ++j)
            if (std::abs(vec[j]) > std::abs(vec[arg])) arg = j;
        if (vec[arg] < 0.0)
            for (double& v : vec) v = -v;
        for (std::size_t j = 0; j < dim; ++j) components.at(c, j) = vec[j];
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b)
                cov.at(a, b) -= lambda * vec[a] * vec[b];
    }

    Matrix out(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            double acc = 0.0;
            auto row = centered.row(i);
            auto comp = components.row(c);
            for (std::size_t j = 0; j < dim; ++j) acc += row[j] * comp[j];
            out.at(i, c) = acc;
        }
    return out;
}

namespace {

double sq_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

} // namespace

double kmeans_objective(const Matrix& points, const std::vector<int>& assignments,
                        const Matrix& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i)
        total += sq_distance(points.row(i), centroids.row(static_cast<std::size_t>(assignments[i])));
    return total;
}

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations) {
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    if (k == 0) throw Error(ErrorKind::input, "kmeans: k must be positive");
    if (k > n)
        throw Error(ErrorKind::input, "kmeans: k = " + std::to_string(k) +
                                          " exceeds point count " + std::to_string(n));
    if (max_iterations == 0)
        throw Error(ErrorKind::input, "kmeans: max_iterations must be positive");

    // seeded draw of k distinct rows (partial Fisher-Yates)
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }

    KMeansResult result;
    result.centroids = Matrix(k, d);
    for (std::size_t c = 0; c < k; ++c) {
        auto src = points.row(order[c]);
        std::copy(src.begin(), src.end(), result.centroids.row(c).begin());
    }
    result.assignments.assign(n, -1);

    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            auto p = points.row(i);
            std::size_t best = 0;
            double best_dist = sq_distance(p, result.centroids.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                double dist = sq_distance(p, result.centroids.row(c));
                if (dist < best_dist) {
                    best_dist = dist;
                    best = c;
                }
            }
            if (result.assignments[i] != static_cast<int>(best)) {
                result.assignments[i] = static_cast<int>(best);
                changed = true;
            }
        }

        // re-seed empty clusters with the point farthest from its centroid
        std::fill(counts.begin(), counts.end(), 0);
        for (int a : result.assignments) ++counts[static_cast<std::size_t>(a)];
        std::vector<bool> moved(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            double farthest = -1.0;
            std::size_t pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (moved[i]) continue;
                std::size_t home = static_cast<std::size_t>(result.assignments[i]);
                if (counts[home] <= 1) continue;
                double dist = sq_distance(points.row(i), result.centroids.row(home));
                if (dist > farthest) {
                    farthest = dist;
                    pick = i;
                }
            }
            if (pick == n) continue;
            --counts[static_cast<std::size_t>(result.assignments[pick])];
            result.assignments[pick] = static_cast<int>(c);
            ++counts[c];
            moved[pick] = true;
            changed = true;
        }

        if (!changed) break; // first iteration always changes (from the -1 init)

        for (double& v : result.centroids.data) v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto p = points.row(i);
            auto cen = result.centroids.row(static_cast<std::size_t>(result.assignments[i]));
            for (std::size_t j = 0; j < d; ++j) cen[j] += p[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            auto cen = result.centroids.row(c);
            double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < d; ++j) cen[j] *= inv;
        }
        result.iterations = iter + 1;
        result.objective_trace.push_back(
            kmeans_objective(points, result.assignments, result.centroids));
    }
    return result;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> out;
    std::string token;
    for (char c : text) {
        if (is_alnum_ascii(c)) {
            token += to_lower_ascii(c);
        } else if (!token.empty()) {
            out.push_back(std::move(token));
            token.clear();
        }
    }
    if (!token.empty()) out.push_back(std::move(token));
    return out;
}

std::vector<std::string> tokenize_for_ctfidf(std::string_view text) {
    std::vector<std::string> out = tokenize_words(text);
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const std::string& t) { return t.size() < 2; }),
              out.end());
    return out;
}

CTfIdfModel fit_ctfidf(const std::vector<int>& assignments,
                       const std::vector<std::vector<std::string>>& tokens,
                       std::size_t num_classes) {
    if (assignments.size() != tokens.size())
        throw Error(ErrorKind::input, "fit_ctfidf: assignments and tokens differ in length");

    CTfIdfModel model;
    model.num_classes = num_classes;

    std::map<std::string, std::size_t> vocab_sorted;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (assignments[i] < 0) continue;
        for (const std::string& w : tokens[i]) vocab_sorted.emplace(w, 0);
    }
    model.vocab.reserve(vocab_sorted.size());
    for (auto& [word, idx] : vocab_sorted) {
        idx = model.vocab.size();
        model.vocab.push_back(word);
        model.word_index.emplace(word, idx);
    }

    const std::size_t v = model.vocab.size();
    model.tf.assign(num_classes, std::vector<std::int64_t>(v, 0));
    model.corpus_freq.assign(v, 0);

    std::int64_t total_words = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        int cls = assignments[i];
        if (cls < 0) continue;
        if (static_cast<std::size_t>(cls) >= num_classes)
            throw Error(ErrorKind::input,
                        "fit_ctfidf: assignment " + std::to_string(cls) + " out of range");
        for (const std::string& w : tokens[i]) {
            std::size_t idx = vocab_sorted[w];
            ++model.tf[static_cast<std::size_t>(cls)][idx];
            ++model.corpus_freq[idx];
            ++total_words;
        }
    }
    model.avg_words_per_class =
        num_classes == 0 ? 0.0
                         : static_cast<double>(total_words) / static_cast<double>(num_classes);

    model.weight.assign(num_classes, std::vector<double>(v, 0.0));
    for (std::size_t c = 0; c < num_classes; ++c)
        for (std::size_t x = 0; x < v; ++x) {
            std::int64_t tf = model.tf[c][x];
            if (tf == 0) continue;
            double f = static_cast<double>(model.corpus_freq[x]);
            model.weight[c][x] =
                static_cast<double>(tf) * std::log(1.0 + model.avg_words_per_class / f);
        }
    return model;
}

std::vector<std::string> top_keywords(const CTfIdfModel& model, std::size_t topic,
                                      std::size_t n) {
    if (topic >= model.num_classes)
        throw Error(ErrorKind::input, "top_keywords: topic " + std::to_string(topic) +
                                          " out of range");
    const auto& w = model.weight[topic];
    std::vector<std::size_t> idx;
    for (std::size_t x = 0; x < w.size(); ++x)
        if (w[x] > 0.0) idx.push_back(x);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] > w[b];
        return model.vocab[a] < model.vocab[b];
    });
    if (idx.size() > n) idx.resize(n);
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t x : idx) out.push_back(model.vocab[x]);
    return out;
}

const std::vector<std::pair<std::string, std::string>>& CategoryMap::labels() {
    static const std::vector<std::pair<std::string, std::string>> names = {
        {"D", "Disease"},
        {"H", "Health Policy and Healthcare"},
        {"O", "Homophobia"},
        {"P", "Politics"},
        {"R", "Racism"},
    };
    return names;
}

bool CategoryMap::valid_code(std::string_view code) {
    for (const auto& [c, name] : labels())
        if (c == code) return true;
    return false;
}

CategoryMap CategoryMap::from_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorKind::config, "category map must be a JSON object");
    CategoryMap map;
    for (auto& [key, value] : j.items()) {
        int topic;
        try {
            topic = std::stoi(key);
        } catch (...) {
            throw Error(ErrorKind::config, "category map key '" + key + "' is not a topic id");
        }
        if (!value.is_string() || !valid_code(value.get<std::string>()))
            throw Error(ErrorKind::config,
                        "category map for topic " + key + " must be one of D, H, O, P, R");
        map.topic_to_category[topic] = value.get<std::string>();
    }
    return map;
}

TopicModel fit_topics(const std::vector<std::string>& cleaned_texts,
                      const TopicConfig& config, const EmbeddingProvider& provider,
                      const Reducer& reducer, int threads) {
    EmbeddingMatrix embedded = embed(cleaned_texts, provider, threads);
    const std::size_t n = embedded.vectors.rows;

    std::vector<std::size_t> usable; // rows with a nonzero embedding
    for (std::size_t i = 0; i < n; ++i) {
        auto row = embedded.vectors.row(i);
        double norm_sq = std::inner_product(row.begin(), row.end(), row.begin(), 0.0);
        if (norm_sq > 0.0) usable.push_back(i);
    }
    if (usable.size() < config.k)
        throw Error(ErrorKind::input,
                    "topics: only " + std::to_string(usable.size()) +
                        " embeddable records for k = " + std::to_string(config.k));

    Matrix subset(usable.size(), embedded.vectors.cols);
    for (std::size_t r = 0; r < usable.size(); ++r) {
        auto src = embedded.vectors.row(usable[r]);
        std::copy(src.begin(), src.end(), subset.row(r).begin());
    }

    Matrix reduced = reducer.reduce(subset, config.reduce_dim, derive_seed(config.seed, "reduce"));
    KMeansResult clustered =
        kmeans(reduced, config.k, derive_seed(config.seed, "kmeans"), config.max_iterations);

    TopicModel model;
    model.assignments.assign(n, -1);
    for (std::size_t r = 0; r < usable.size(); ++r)
        model.assignments[usable[r]] = clustered.assignments[r];
    model.centroids = std::move(clustered.centroids);

    model.viz = Matrix(n, config.viz_dim);
    if (config.viz_dim > 0) {
        Matrix planar = reducer.reduce(subset, config.viz_dim, derive_seed(config.seed, "viz"));
        for (std::size_t r = 0; r < usable.size(); ++r) {
            auto src = planar.row(r);
            std::copy(src.begin(), src.end(), model.viz.row(usable[r]).begin());
        }
    }

    std::vector<std::vector<std::string>> tokens(n);
    for (std::size_t i = 0; i < n; ++i) tokens[i] = tokenize_for_ctfidf(cleaned_texts[i]);
    model.ctfidf = fit_ctfidf(model.assignments, tokens, config.k);

    model.keywords.reserve(config.k);
    for (std::size_t t = 0; t < config.k; ++t)
        model.keywords.push_back(top_keywords(model.ctfidf, t, config.keywords_per_topic));
    return model;
}

std::vector<std::string> apply_categories(const TopicModel& model, const CategoryMap& map) {
    std::vector<std::string> out;
    out.reserve(model.assignments.size());
    for (int topic : model.assignments) {
        if (topic < 0) {
            out.emplace_back();
            continue;
        }
        auto it = map.topic_to_category.find(topic);
        if (it == map.topic_to_category.end())
            throw Error(ErrorKind::config,
                        "no category mapped for topic " + std::to_string(topic));
        out.push_back(it->second);
    }
    return out;
}

} // namespace toxtrace
