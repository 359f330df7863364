#include "toxtrace/toxicity.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_set>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "toxtrace/error.hpp"
#include "toxtrace/util.hpp"

namespace toxtrace {

std::string_view provider_name(ScoreProvider p) {
    return p == ScoreProvider::remote ? "remote" : "stub";
}

const std::vector<std::string>& StubScorer::lexicon() {
    static const std::vector<std::string> terms = {
        "awful",    "clown",    "corrupt", "creep",   "disgusting", "dumb",
        "evil",     "filthy",   "fool",    "fraud",   "garbage",    "gross",
        "hate",     "horrible", "idiot",   "idiots",  "lame",       "liar",
        "loser",    "moron",    "nasty",   "pathetic", "scum",      "stupid",
        "terrible", "toxic",    "trash",   "vile",    "worst",      "wretched",
    };
    return terms;
}

double StubScorer::score_text(std::string_view text) {
    static const std::unordered_set<std::string> terms(lexicon().begin(), lexicon().end());
    int hits = 0;
    std::string token;
    auto flush = [&] {
        if (!token.empty() && terms.count(token)) ++hits;
        token.clear();
    };
    for (char c : text) {
        if (is_word_char(c)) token += to_lower_ascii(c);
        else flush();
    }
    flush();
    return std::min(1.0, hits / 3.0);
}

std::vector<double> StubScorer::score(const std::vector<std::string>& texts) {
    std::vector<double> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(score_text(t));
    return out;
}

namespace {

struct ParsedUrl {
    bool https = false;
    std::string host_port; // host[:port]
    std::string path;      // leading '/'
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    std::string rest;
    if (url.rfind("https://", 0) == 0) {
        out.https = true;
        rest = url.substr(8);
    } else if (url.rfind("http://", 0) == 0) {
        rest = url.substr(7);
    } else {
        throw Error(ErrorKind::config, "endpoint must be an http(s) URL: " + url);
    }
    std::size_t slash = rest.find('/');
    out.host_port = rest.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    if (out.host_port.empty())
        throw Error(ErrorKind::config, "endpoint URL has no host: " + url);
    return out;
}

double extract_score(const std::string& body, std::size_t index) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorKind::protocol,
                    "response for text " + std::to_string(index) + " is not valid JSON");
    const auto* node = &j;
    for (const char* key : {"attributeScores", "TOXICITY", "summaryScore", "value"}) {
        auto it = node->find(key);
        if (it == node->end())
            throw Error(ErrorKind::protocol, "response for text " + std::to_string(index) +
                                                 " lacks field '" + key + "'");
        node = &*it;
    }
    if (!node->is_number())
        throw Error(ErrorKind::protocol,
                    "score for text " + std::to_string(index) + " is not a number");
    double v = node->get<double>();
    if (v < 0.0 || v > 1.0)
        throw Error(ErrorKind::protocol, "score " + format_double(v) + " for text " +
                                             std::to_string(index) + " outside [0,1]");
    return v;
}

} // namespace

RemoteScorer::RemoteScorer(ToxicityConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty())
        throw Error(ErrorKind::config, "remote scoring requires an endpoint URL");
}

std::vector<double> RemoteScorer::score(const std::vector<std::string>& texts) {
    if (texts.empty())
        throw Error(ErrorKind::input, "no texts to score");

    ParsedUrl url = parse_url(config_.endpoint);
    httplib::Client client(url.https ? ("https://" + url.host_port)
                                     : ("http://" + url.host_port));
    client.set_connection_timeout(10);
    client.set_read_timeout(30);

    std::string key = config_.api_key;
    if (key.empty() && !config_.api_key_env.empty()) {
        if (const char* env = std::getenv(config_.api_key_env.c_str())) key = env;
    }
    std::string path = url.path;
    if (!key.empty())
        path += (path.find('?') == std::string::npos ? "?key=" : "&key=") + key;

    const std::int64_t min_gap_ns =
        config_.requests_per_second > 0
            ? static_cast<std::int64_t>(1e9 / config_.requests_per_second)
            : 0;

    std::vector<double> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        nlohmann::json body;
        body["comment"]["text"] = texts[i];
        body["requestedAttributes"]["TOXICITY"] = nlohmann::json::object();
        std::string payload = body.dump();

        int attempt = 0;
        for (;;) {
            if (min_gap_ns > 0) {
                std::int64_t now =
                    std::chrono::steady_clock::now().time_since_epoch().count();
                std::int64_t wait = last_request_ns_ + min_gap_ns - now;
                if (wait > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(wait));
                last_request_ns_ =
                    std::chrono::steady_clock::now().time_since_epoch().count();
            }
            httplib::Result res = client.Post(path, payload, "application/json");
            if (res && res->status == 200) {
                out.push_back(extract_score(res->body, i));
                break;
            }
            bool transient = !res || res->status == 429 || res->status >= 500;
            if (!transient)
                throw Error(ErrorKind::provider,
                            "scoring text " + std::to_string(i) + " failed with HTTP " +
                                std::to_string(res->status));
            if (attempt >= config_.max_retries)
                throw Error(ErrorKind::provider,
                            "scoring text " + std::to_string(i) + " failed after " +
                                std::to_string(attempt + 1) + " attempts" +
                                (res ? " (last HTTP " + std::to_string(res->status) + ")"
                                     : " (connection error)"));
            int backoff = config_.backoff_base_ms << std::min(attempt, 10);
            backoff = std::min(backoff, 5000);
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            ++attempt;
        }
    }
    return out;
}

std::unique_ptr<ToxicityScorer> make_scorer(ScoreProvider p, const ToxicityConfig& config) {
    if (p == ScoreProvider::stub) return std::make_unique<StubScorer>();
    return std::make_unique<RemoteScorer>(config);
}

std::vector<double> score_stub(const std::vector<std::string>& texts) {
    return StubScorer().score(texts);
}

std::vector<double> score_remote(const std::vector<std::string>& texts,
                                 const ToxicityConfig& config) {
    return RemoteScorer(config).score(texts);
}

std::vector<ToxicityScore> score_corpus(const Corpus& corpus, ToxicityScorer& scorer) {
    std::vector<std::string> texts;
    texts.reserve(corpus.records.size());
    for (const TweetRecord& rec : corpus.records) texts.push_back(rec.text);
    std::vector<double> values = scorer.score(texts);
    std::vector<ToxicityScore> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out.push_back({corpus.records[i].id, values[i], scorer.provider()});
    return out;
}

Corpus filter_toxic(const Corpus& corpus,
                    const std::unordered_map<std::string, ToxicityScore>& scores,
                    double threshold) {
    Corpus out;
    out.dropped_duplicates = corpus.dropped_duplicates;
    out.dropped_invalid = corpus.dropped_invalid;
    for (const TweetRecord& rec : corpus.records) {
        auto it = scores.find(rec.id);
        if (it == scores.end())
            throw Error(ErrorKind::input, "no toxicity score for record '" + rec.id + "'");
        if (it->second.value >= threshold) out.records.push_back(rec);
    }
    return out;
}

ScoreCache ScoreCache::load(std::istream& in) {
    ScoreCache cache;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) continue;
        auto id = j.find("id");
        auto value = j.find("value");
        if (id == j.end() || !id->is_string() || value == j.end() || !value->is_number())
            continue;
        ToxicityScore s;
        s.record_id = id->get<std::string>();
        s.value = value->get<double>();
        if (s.value < 0.0 || s.value > 1.0) continue;
        auto prov = j.find("provider");
        s.provider = (prov != j.end() && prov->is_string() && *prov == "remote")
                         ? ScoreProvider::remote
                         : ScoreProvider::stub;
        cache.scores_[s.record_id] = s;
    }
    return cache;
}

void ScoreCache::save(std::ostream& out) const {
    std::vector<std::string> ids;
    ids.reserve(scores_.size());
    for (const auto& [id, s] : scores_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
        const ToxicityScore& s = scores_.at(id);
        nlohmann::json j;
        j["id"] = s.record_id;
        j["value"] = s.value;
        j["provider"] = std::string(provider_name(s.provider));
        out << j.dump() << '\n';
    }
}

} // namespace toxtrace
