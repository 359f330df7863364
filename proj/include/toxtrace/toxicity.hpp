#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "toxtrace/corpus.hpp"

namespace toxtrace {

enum class ScoreProvider { remote, stub };

std::string_view provider_name(ScoreProvider p);

struct ToxicityScore {
    std::string record_id;
    double value = 0.0; // in [0,1]
    ScoreProvider provider = ScoreProvider::stub;
};

struct ToxicityConfig {
    double threshold = 0.7;
    std::string endpoint;
    int max_retries = 3;
    double requests_per_second = 10.0;
    std::string api_key;                              // wins over the env var
    std::string api_key_env = "PERSPECTIVE_API_KEY";
    int backoff_base_ms = 100;                        // doubled per retry, capped at 5s
};

class ToxicityScorer {
public:
    virtual ~ToxicityScorer() = default;
    virtual std::vector<double> score(const std::vector<std::string>& texts) = 0;
    virtual ScoreProvider provider() const = 0;
};

// Deterministic test provider: score = min(1, lexicon hits / 3), matched
// case-insensitively on word boundaries. The lexicon and slope are test
// fixtures, not a toxicity model.
class StubScorer : public ToxicityScorer {
public:
    std::vector<double> score(const std::vector<std::string>& texts) override;
    ScoreProvider provider() const override { return ScoreProvider::stub; }

    static const std::vector<std::string>& lexicon();
    static double score_text(std::string_view text);
};

// AnalyzeComment-style HTTP client with retry/backoff and request pacing.
class RemoteScorer : public ToxicityScorer {
public:
    explicit RemoteScorer(ToxicityConfig config);
    std::vector<double> score(const std::vector<std::string>& texts) override;
    ScoreProvider provider() const override { return ScoreProvider::remote; }

private:
    ToxicityConfig config_;
    std::int64_t last_request_ns_ = 0;
};

std::unique_ptr<ToxicityScorer> make_scorer(ScoreProvider p, const ToxicityConfig& config);

// Spec-level entry points: one score per text, order preserved.
std::vector<double> score_stub(const std::vector<std::string>& texts);
std::vector<double> score_remote(const std::vector<std::string>& texts,
                                 const ToxicityConfig& config);

// Scores every record (raw text) and binds ids.
std::vector<ToxicityScore> score_corpus(const Corpus& corpus, ToxicityScorer& scorer);

// Keeps records with score >= threshold ("0.7 or higher" is inclusive).
// Throws Error(input) naming the first record without a score.
Corpus filter_toxic(const Corpus& corpus,
                    const std::unordered_map<std::string, ToxicityScore>& scores,
                    double threshold);

// JSON Lines cache {id, value, provider}; '#' comment lines are skipped.
class ScoreCache {
public:
    static ScoreCache load(std::istream& in);
    void save(std::ostream& out) const;

    bool contains(const std::string& id) const { return scores_.count(id) > 0; }
    void put(const ToxicityScore& s) { scores_[s.record_id] = s; }
    const std::unordered_map<std::string, ToxicityScore>& all() const { return scores_; }

private:
    std::unordered_map<std::string, ToxicityScore> scores_;
};

} // namespace toxtrace
