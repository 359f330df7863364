#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "toxtrace/error.hpp"
#include "toxtrace/topics.hpp"

using namespace toxtrace;

namespace {

double l2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(rows, cols);
    for (double& x : m.data) x = u(rng);
    return m;
}

// scatter matrix of the mean-centered rows, no variance normalization
std::vector<std::vector<double>> scatter_of(const Matrix& m) {
    std::vector<double> mean(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) mean[c] += m.at(r, c);
    for (double& v : mean) v /= static_cast<double>(m.rows);
    std::vector<std::vector<double>> s(m.cols, std::vector<double>(m.cols, 0.0));
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t i = 0; i < m.cols; ++i)
            for (std::size_t j = 0; j < m.cols; ++j)
                s[i][j] += (m.at(r, i) - mean[i]) * (m.at(r, j) - mean[j]);
    return s;
}

} // namespace

TEST_CASE("hash embeddings are unit length and deterministic") {
    HashEmbedder e(64);
    CHECK(e.dim() == 64);
    CHECK(HashEmbedder().dim() == 384);

    std::vector<double> v(64, 0.0);
    e.embed_one("a a b", v);
    int nonzero = 0;
    for (double x : v) nonzero += x != 0.0;
    CHECK(nonzero >= 1);
    CHECK(nonzero <= 2); // at most one bucket per distinct word
    CHECK(l2(v) == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<double> w(64, 0.0);
    e.embed_one("A a B", w);
    CHECK(v == w); // lowercase folding

    std::fill(w.begin(), w.end(), 0.0);
    e.embed_one("!!! ...", w);
    CHECK(l2(w) == 0.0);
    std::fill(w.begin(), w.end(), 0.0);
    e.embed_one("", w);
    CHECK(l2(w) == 0.0);
}

TEST_CASE("embedding a text list keeps one row per text") {
    HashEmbedder e(32);
    EmbeddingMatrix m = embed({"one two", "one two", "three", ""}, e);
    CHECK(m.vectors.rows == 4);
    CHECK(m.vectors.cols == 32);
    CHECK(m.provider_id == e.id());
    CHECK(std::equal(m.vectors.row(0).begin(), m.vectors.row(0).end(),
                     m.vectors.row(1).begin()));
    CHECK(l2(m.vectors.row(3)) == 0.0);
    CHECK(dist(m.vectors.row(0), m.vectors.row(2)) > 0.1);
}

TEST_CASE("projection to the top principal directions preserves structure") {
    PcaReducer pca;

    SUBCASE("collinear points collapse losslessly to one dimension") {
        Matrix x(6, 5);
        double dir[5] = {1, -2, 0.5, 3, -1};
        for (std::size_t r = 0; r < 6; ++r)
            for (std::size_t c = 0; c < 5; ++c)
                x.at(r, c) = 10.0 + static_cast<double>(r) * dir[c];
        Matrix y = pca.reduce(x, 1, 99);
        REQUIRE(y.rows == 6);
        REQUIRE(y.cols == 1);
        for (std::size_t a = 0; a < 6; ++a)
            for (std::size_t b = a + 1; b < 6; ++b)
                CHECK(dist(y.row(a), y.row(b)) ==
                      doctest::Approx(dist(x.row(a), x.row(b))).epsilon(1e-9));
    }

    SUBCASE("keeping every direction is an isometry") {
        Matrix x = random_matrix(12, 4, 5);
        Matrix y = pca.reduce(x, 4, 1);
        for (std::size_t a = 0; a < x.rows; ++a)
            for (std::size_t b = a + 1; b < x.rows; ++b)
                CHECK(dist(y.row(a), y.row(b)) ==
                      doctest::Approx(dist(x.row(a), x.row(b))).epsilon(1e-9));
    }

    SUBCASE("captured energy per column matches the scatter spectrum") {
        Matrix x = random_matrix(20, 10, 11);
        Matrix y = pca.reduce(x, 3, 2);
        std::vector<double> eig = oracle::symmetric_eigenvalues(scatter_of(x));
        for (std::size_t c = 0; c < 3; ++c) {
            double sumsq = 0.0, mean = 0.0;
            for (std::size_t r = 0; r < y.rows; ++r) {
                sumsq += y.at(r, c) * y.at(r, c);
                mean += y.at(r, c);
            }
            CHECK(mean / static_cast<double>(y.rows) ==
                  doctest::Approx(0.0).epsilon(1e-9)); // centered output
            CHECK(sumsq == doctest::Approx(eig[c]).epsilon(1e-6));
        }
    }

    SUBCASE("impossible dimensions are rejected") {
        Matrix x = random_matrix(5, 3, 1);
        CHECK_THROWS_AS(pca.reduce(x, 4, 1), Error);
        Matrix one(1, 3);
        CHECK_THROWS_AS(pca.reduce(one, 1, 1), Error);
    }
}

TEST_CASE("kmeans with one cluster returns the mean") {
    Matrix x = random_matrix(9, 3, 21);
    KMeansResult r = kmeans(x, 1, 4, 50);
    REQUIRE(r.centroids.rows == 1);
    for (std::size_t c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (std::size_t row = 0; row < x.rows; ++row) mean += x.at(row, c);
        mean /= static_cast<double>(x.rows);
        CHECK(r.centroids.at(0, c) == doctest::Approx(mean).epsilon(1e-9));
    }
    CHECK(std::set<int>(r.assignments.begin(), r.assignments.end()) == std::set<int>{0});
}

TEST_CASE("kmeans separates two far-apart blobs exactly") {
    Matrix x(6, 2);
    for (std::size_t r = 0; r < 3; ++r) {
        x.at(r, 0) = 0.0 + 0.01 * static_cast<double>(r);
        x.at(r, 1) = 0.0;
        x.at(r + 3, 0) = 10.0 + 0.01 * static_cast<double>(r);
        x.at(r + 3, 1) = 10.0;
    }
    for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 1234ULL}) {
        KMeansResult r = kmeans(x, 2, seed, 100);
        CHECK(r.assignments[0] == r.assignments[1]);
        CHECK(r.assignments[1] == r.assignments[2]);
        CHECK(r.assignments[3] == r.assignments[4]);
        CHECK(r.assignments[4] == r.assignments[5]);
        CHECK(r.assignments[0] != r.assignments[3]);
        // each centroid sits on its blob's mean
        int low = r.assignments[0];
        CHECK(r.centroids.at(low, 0) == doctest::Approx(0.01).epsilon(1e-9));
        CHECK(r.centroids.at(low, 1) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(r.centroids.at(1 - low, 0) == doctest::Approx(10.01).epsilon(1e-9));
    }
}

TEST_CASE("kmeans objective never increases and matches a direct recount") {
    Matrix x = random_matrix(60, 4, 33);
    KMeansResult r = kmeans(x, 4, 9, 100);
    REQUIRE(!r.objective_trace.empty());
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-12);
    CHECK(r.objective_trace.back() ==
          doctest::Approx(kmeans_objective(x, r.assignments, r.centroids)).epsilon(1e-9));
    CHECK(r.iterations == r.objective_trace.size());

    KMeansResult again = kmeans(x, 4, 9, 100);
    CHECK(again.assignments == r.assignments); // same seed, same answer
}

TEST_CASE("kmeans argument validation") {
    Matrix x = random_matrix(4, 2, 3);
    CHECK_THROWS_AS(kmeans(x, 0, 1, 10), Error);
    CHECK_THROWS_AS(kmeans(x, 5, 1, 10), Error);
    CHECK_THROWS_AS(kmeans(x, 2, 1, 0), Error);
}

TEST_CASE("tokenizers lowercase and split on non-alphanumerics") {
    CHECK(tokenize_words("The cat, the CAT!") ==
          std::vector<std::string>{"the", "cat", "the", "cat"});
    CHECK(tokenize_words("a b2c") == std::vector<std::string>{"a", "b2c"});
    CHECK(tokenize_words("") == std::vector<std::string>{});
    // keyword tokens must be at least two characters
    CHECK(tokenize_for_ctfidf("a bb c dd2") == std::vector<std::string>{"bb", "dd2"});
    CHECK(tokenize_for_ctfidf("x y z") == std::vector<std::string>{});
}

TEST_CASE("class keyword weights match hand-worked values") {
    // two classes, four words total: A = 2
    // "w" appears twice in class 0 and once in class 1: f = 3
    std::vector<int> assign = {0, 1};
    std::vector<std::vector<std::string>> tokens = {{"ww", "ww"}, {"ww", "xx"}};
    CTfIdfModel m = fit_ctfidf(assign, tokens, 2);
    CHECK(m.avg_words_per_class == doctest::Approx(2.0));
    REQUIRE(m.vocab == std::vector<std::string>{"ww", "xx"});
    CHECK(m.corpus_freq[0] == 3);
    CHECK(m.corpus_freq[1] == 1);
    CHECK(m.tf[0][0] == 2);
    CHECK(m.tf[1][0] == 1);
    CHECK(m.weight[0][0] == doctest::Approx(2.0 * std::log(5.0 / 3.0)).epsilon(1e-12));
    CHECK(m.weight[0][0] == doctest::Approx(1.021651).epsilon(1e-6));
    CHECK(m.weight[1][1] == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(m.weight[0][1] == 0.0); // absent from the class

    // one class, one word four times: A = f = 4, so the log term is ln 2
    CTfIdfModel single = fit_ctfidf({0}, {{"yy", "yy", "yy", "yy"}}, 1);
    CHECK(single.weight[0][0] == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(single.weight[0][0] == doctest::Approx(2.772589).epsilon(1e-6));
}

TEST_CASE("class keyword weights agree with a direct evaluation") {
    std::vector<std::vector<std::string>> class_tokens = {
        {"virus", "spread", "virus", "vaccine", "risk"},
        {"policy", "mandate", "policy", "risk"},
        {"slur", "attack", "attack", "virus", "slur", "slur"},
    };
    std::vector<int> assign;
    std::vector<std::vector<std::string>> tokens;
    // split each class across two records; a -1 record must change nothing
    for (int c = 0; c < 3; ++c) {
        const auto& words = class_tokens[static_cast<std::size_t>(c)];
        std::size_t half = words.size() / 2;
        tokens.emplace_back(words.begin(), words.begin() + static_cast<long>(half));
        assign.push_back(c);
        tokens.emplace_back(words.begin() + static_cast<long>(half), words.end());
        assign.push_back(c);
    }
    tokens.push_back({"noise", "noise"});
    assign.push_back(-1);

    CTfIdfModel m = fit_ctfidf(assign, tokens, 3);
    auto direct = oracle::ctfidf_direct(class_tokens);

    CHECK(m.vocab.size() == direct.size());
    CHECK(m.word_index.count("noise") == 0); // unassigned records stay out
    std::int64_t total = 0;
    for (std::size_t x = 0; x < m.vocab.size(); ++x) {
        const auto& expected = direct.at(m.vocab[x]);
        std::int64_t f = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(m.weight[c][x] == doctest::Approx(expected[c]).epsilon(1e-9));
            f += m.tf[c][x];
        }
        CHECK(f == m.corpus_freq[x]); // class counts partition the corpus count
        total += f;
    }
    CHECK(m.avg_words_per_class == doctest::Approx(static_cast<double>(total) / 3.0));

    // equal term frequency in every class means equal weight in every class
    CTfIdfModel even = fit_ctfidf({0, 1}, {{"same", "same"}, {"same", "same"}}, 2);
    CHECK(even.weight[0][0] == doctest::Approx(even.weight[1][0]).epsilon(1e-12));
}

TEST_CASE("fit_ctfidf argument validation") {
    CHECK_THROWS_AS(fit_ctfidf({0, 1}, {{"aa"}}, 2), Error);
    CHECK_THROWS_AS(fit_ctfidf({2}, {{"aa"}}, 2), Error);
}

TEST_CASE("top keywords rank by weight with alphabetical ties") {
    CTfIdfModel m = fit_ctfidf({0, 1}, {{"zz", "zz", "mm", "aa"}, {"mm", "qq"}}, 2);
    // class 0: zz twice (unique to it), aa once (unique), mm once (shared)
    std::vector<std::string> top = top_keywords(m, 0, 10);
    REQUIRE(top.size() == 3);
    CHECK(top[0] == "zz");
    CHECK(top[1] == "aa"); // aa and mm have equal tf, aa's f is lower
    CHECK(top[2] == "mm");
    CHECK(top_keywords(m, 0, 1) == std::vector<std::string>{"zz"});
    // qq has zero weight in class 0 and must not appear at any n
    for (const std::string& w : top_keywords(m, 0, 100)) CHECK(w != "qq");

    // a genuine tie: two words with identical tf and f sort alphabetically
    CTfIdfModel tie = fit_ctfidf({0}, {{"bb", "ab"}}, 1);
    CHECK(top_keywords(tie, 0, 2) == std::vector<std::string>{"ab", "bb"});

    CHECK_THROWS_AS(top_keywords(m, 2, 1), Error);
}

TEST_CASE("category maps parse topic ids and fixed codes") {
    std::istringstream good(R"({"0":"D","1":"H","2":"O","3":"P","4":"R"})");
    CategoryMap map = CategoryMap::from_json(good);
    REQUIRE(map.topic_to_category.size() == 5);
    CHECK(map.topic_to_category.at(0) == "D");
    CHECK(map.topic_to_category.at(4) == "R");

    std::istringstream bad_code(R"({"0":"X"})");
    CHECK_THROWS_AS(CategoryMap::from_json(bad_code), Error);
    std::istringstream bad_key(R"({"zero":"D"})");
    CHECK_THROWS_AS(CategoryMap::from_json(bad_key), Error);
    std::istringstream not_object("[1,2]");
    CHECK_THROWS_AS(CategoryMap::from_json(not_object), Error);

    CHECK(CategoryMap::valid_code("D"));
    CHECK(CategoryMap::valid_code("R"));
    CHECK_FALSE(CategoryMap::valid_code("d"));
    CHECK_FALSE(CategoryMap::valid_code(""));
    CHECK_FALSE(CategoryMap::valid_code("DH"));
    CHECK(CategoryMap::labels().size() == 5);
}

TEST_CASE("categories apply per record with blanks for unclustered rows") {
    TopicModel model;
    model.assignments = {0, 1, -1, 0};
    CategoryMap map;
    map.topic_to_category = {{0, "D"}, {1, "P"}};
    CHECK(apply_categories(model, map) == std::vector<std::string>{"D", "P", "", "D"});

    map.topic_to_category.erase(1);
    CHECK_THROWS_WITH_AS(apply_categories(model, map), "no category mapped for topic 1",
                         Error);
}

TEST_CASE("topic fitting separates disjoint vocabularies end to end") {
    std::vector<std::string> texts;
    for (int i = 0; i < 6; ++i)
        texts.push_back(i % 2 ? "storm rain flood warning tonight"
                              : "heavy storm flood rain coast");
    for (int i = 0; i < 6; ++i)
        texts.push_back(i % 2 ? "match goal striker win league"
                              : "final match win goal crowd");
    texts.push_back("");
    texts.push_back("!!!");

    TopicConfig cfg;
    cfg.k = 2;
    cfg.reduce_dim = 2;
    cfg.viz_dim = 2;
    cfg.seed = 7;
    cfg.keywords_per_topic = 5;
    HashEmbedder embedder(128);
    PcaReducer pca;
    TopicModel model = fit_topics(texts, cfg, embedder, pca);

    REQUIRE(model.assignments.size() == texts.size());
    CHECK(model.assignments[12] == -1); // nothing to embed
    CHECK(model.assignments[13] == -1);
    for (std::size_t i = 0; i < 12; ++i) CHECK(model.assignments[i] >= 0);
    // both themes exist and never mix
    std::set<int> weather(model.assignments.begin(), model.assignments.begin() + 6);
    std::set<int> sport(model.assignments.begin() + 6, model.assignments.begin() + 12);
    CHECK(weather.size() == 1);
    CHECK(sport.size() == 1);
    CHECK(*weather.begin() != *sport.begin());

    REQUIRE(model.keywords.size() == 2);
    std::set<std::string> weather_kw(model.keywords[static_cast<std::size_t>(
                                         *weather.begin())].begin(),
                                     model.keywords[static_cast<std::size_t>(
                                         *weather.begin())].end());
    CHECK(weather_kw.count("storm") == 1);
    CHECK(weather_kw.count("goal") == 0);

    REQUIRE(model.viz.rows == texts.size());
    REQUIRE(model.viz.cols == 2);
    CHECK(l2(model.viz.row(12)) == 0.0); // sentinel rows carry no coordinates
    double spread = 0.0;
    for (std::size_t i = 0; i < 12; ++i) spread += l2(model.viz.row(i));
    CHECK(spread > 0.0);

    TopicModel rerun = fit_topics(texts, cfg, embedder, pca);
    CHECK(rerun.assignments == model.assignments);

    TopicConfig too_many = cfg;
    too_many.k = 20;
    CHECK_THROWS_AS(fit_topics(texts, too_many, embedder, pca), Error);
}
