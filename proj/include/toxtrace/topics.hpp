#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace toxtrace {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
};

struct EmbeddingMatrix {
    Matrix vectors;
    std::string provider_id;
};

struct TopicConfig {
    std::size_t k = 50;
    std::size_t reduce_dim = 5;
    std::size_t viz_dim = 2;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 100;
    std::size_t keywords_per_topic = 10;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dim() const = 0;
    virtual std::string id() const = 0;
    // Writes dim() values into `out`; zero vector for texts with no tokens.
    virtual void embed_one(std::string_view text, std::span<double> out) const = 0;
};

// Hashes lowercase word unigrams into dim buckets and L2-normalizes.
class HashEmbedder : public EmbeddingProvider {
public:
    explicit HashEmbedder(std::size_t dim = 384) : dim_(dim) {}
    std::size_t dim() const override { return dim_; }
    std::string id() const override;
    void embed_one(std::string_view text, std::span<double> out) const override;

private:
    std::size_t dim_;
};

EmbeddingMatrix embed(const std::vector<std::string>& texts,
                      const EmbeddingProvider& provider, int threads = 1);

class Reducer {
public:
    virtual ~Reducer() = default;
    virtual std::string id() const = 0;
    virtual Matrix reduce(const Matrix& input, std::size_t d, std::uint64_t seed) const = 0;
};

// Mean-centered projection onto the top-d principal directions. Power
// iteration with deflation, tolerance 1e-9; each component's sign is fixed so
// its largest-magnitude loading is positive.
class PcaReducer : public Reducer {
public:
    std::string id() const override { return "pca"; }
    Matrix reduce(const Matrix& input, std::size_t d, std::uint64_t seed) const override;
};

struct KMeansResult {
    std::vector<int> assignments;        // one topic id per row
    Matrix centroids;                    // k x d
    std::vector<double> objective_trace; // sum of squared distances, per iteration
    std::size_t iterations = 0;
};

// Lloyd iterations, squared-Euclidean assignment, seeded choice of k distinct
// rows as initial centroids. Stops when assignments no longer change. An
// empty cluster is re-seeded with the point farthest from its centroid.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations);

double kmeans_objective(const Matrix& points, const std::vector<int>& assignments,
                        const Matrix& centroids);

// Tokenization: lowercase, split on non-alphanumerics.
std::vector<std::string> tokenize_words(std::string_view text);      // len >= 1 (embedding)
std::vector<std::string> tokenize_for_ctfidf(std::string_view text); // len >= 2

struct CTfIdfModel {
    std::vector<std::string> vocab; // sorted; index is the word id
    std::unordered_map<std::string, std::size_t> word_index;
    std::size_t num_classes = 0;
    std::vector<std::vector<std::int64_t>> tf; // [class][word]
    std::vector<std::int64_t> corpus_freq;     // f_x = sum over classes
    double avg_words_per_class = 0.0;          // A
    std::vector<std::vector<double>> weight;   // W[class][word] = tf * ln(1 + A/f)
};

// Each class is the concatenation of its records' tokens. Records assigned -1
// are skipped. Empty classes get all-zero rows.
CTfIdfModel fit_ctfidf(const std::vector<int>& assignments,
                       const std::vector<std::vector<std::string>>& tokens,
                       std::size_t num_classes);

// Words with the largest positive weight in the class; ties alphabetical.
std::vector<std::string> top_keywords(const CTfIdfModel& model, std::size_t topic,
                                      std::size_t n);

struct CategoryMap {
    std::map<int, std::string> topic_to_category; // topic id -> code in {D,H,O,P,R}

    static const std::vector<std::pair<std::string, std::string>>& labels();
    static bool valid_code(std::string_view code);
    static CategoryMap from_json(std::istream& in);
};

struct TopicModel {
    std::vector<int> assignments; // -1 for records excluded from clustering
    Matrix centroids;
    Matrix viz; // viz_dim coordinates per record, zero rows where topic is -1
    CTfIdfModel ctfidf;
    std::vector<std::vector<std::string>> keywords; // per topic
    std::map<int, std::string> category_map;
};

// embed -> reduce -> cluster -> c-TF-IDF keywords. Zero-vector texts are kept
// out of clustering and get topic -1.
TopicModel fit_topics(const std::vector<std::string>& cleaned_texts,
                      const TopicConfig& config, const EmbeddingProvider& provider,
                      const Reducer& reducer, int threads = 1);

// One category code per record; "" for records with topic -1. Throws
// Error(config) if a real topic id is missing from the map.
std::vector<std::string> apply_categories(const TopicModel& model, const CategoryMap& map);

} // namespace toxtrace
