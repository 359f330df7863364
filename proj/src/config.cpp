#include "toxtrace/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "toxtrace/error.hpp"
#include "toxtrace/util.hpp"

namespace toxtrace {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::config, what); }

void check_keys(const nlohmann::json& j, std::string_view scope,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            bad("unknown " + std::string(scope) + " key '" + key + "'");
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
        bad(std::string("field '") + key + "' has the wrong type");
    }
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) bad("config must be a JSON object");
    check_keys(j, "config",
               {"input", "output_dir", "seed", "threads", "top_users", "top_hashtags",
                "toxicity", "topics", "category_map", "profiles", "relations"});

    RunConfig c;
    read_field(j, "input", c.input);
    read_field(j, "output_dir", c.output_dir);
    read_field(j, "seed", c.seed);
    read_field(j, "threads", c.threads);
    read_field(j, "top_users", c.top_users);
    read_field(j, "top_hashtags", c.top_hashtags);
    read_field(j, "category_map", c.category_map);
    read_field(j, "profiles", c.profiles);

    if (auto it = j.find("toxicity"); it != j.end()) {
        if (!it->is_object()) bad("'toxicity' must be an object");
        check_keys(*it, "toxicity",
                   {"provider", "threshold", "endpoint", "max_retries",
                    "requests_per_second", "api_key", "api_key_env", "backoff_base_ms"});
        std::string provider = "stub";
        read_field(*it, "provider", provider);
        if (provider == "stub") c.provider = ScoreProvider::stub;
        else if (provider == "remote") c.provider = ScoreProvider::remote;
        else bad("toxicity provider must be 'stub' or 'remote'");
        read_field(*it, "threshold", c.toxicity.threshold);
        read_field(*it, "endpoint", c.toxicity.endpoint);
        read_field(*it, "max_retries", c.toxicity.max_retries);
        read_field(*it, "requests_per_second", c.toxicity.requests_per_second);
        read_field(*it, "api_key", c.toxicity.api_key);
        read_field(*it, "api_key_env", c.toxicity.api_key_env);
        read_field(*it, "backoff_base_ms", c.toxicity.backoff_base_ms);
    }
    if (auto it = j.find("topics"); it != j.end()) {
        if (!it->is_object()) bad("'topics' must be an object");
        check_keys(*it, "topics",
                   {"k", "reduce_dim", "viz_dim", "max_iterations", "keywords_per_topic"});
        read_field(*it, "k", c.topics.k);
        read_field(*it, "reduce_dim", c.topics.reduce_dim);
        read_field(*it, "viz_dim", c.topics.viz_dim);
        read_field(*it, "max_iterations", c.topics.max_iterations);
        read_field(*it, "keywords_per_topic", c.topics.keywords_per_topic);
    }
    if (auto it = j.find("relations"); it != j.end()) {
        if (!it->is_array()) bad("'relations' must be an array");
        c.relations.clear();
        for (const auto& r : *it) {
            if (!r.is_string()) bad("relation entries must be strings");
            c.relations.push_back(relation_from_name(r.get<std::string>()));
        }
    }
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) bad("config file '" + path + "' is not valid JSON");
    return from_json(j);
}

// output_dir is deliberately absent: where reports land must not change
// their bytes, and the hash goes into every report header.
nlohmann::json RunConfig::to_json() const {
    nlohmann::json relation_names = nlohmann::json::array();
    for (Relation r : relations) relation_names.push_back(std::string(relation_name(r)));
    return {
        {"input", input},
        {"seed", seed},
        {"threads", threads},
        {"top_users", top_users},
        {"top_hashtags", top_hashtags},
        {"toxicity",
         {{"provider", std::string(provider_name(provider))},
          {"threshold", toxicity.threshold},
          {"endpoint", toxicity.endpoint},
          {"max_retries", toxicity.max_retries},
          {"requests_per_second", toxicity.requests_per_second},
          {"api_key_env", toxicity.api_key_env},
          {"backoff_base_ms", toxicity.backoff_base_ms}}},
        {"topics",
         {{"k", topics.k},
          {"reduce_dim", topics.reduce_dim},
          {"viz_dim", topics.viz_dim},
          {"max_iterations", topics.max_iterations},
          {"keywords_per_topic", topics.keywords_per_topic}}},
        {"category_map", category_map},
        {"profiles", profiles},
        {"relations", relation_names},
    };
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

std::uint64_t RunConfig::stage_seed(std::string_view stage) const {
    return derive_seed(seed, stage);
}

void RunConfig::validate(bool for_pipeline) const {
    if (toxicity.threshold < 0.0 || toxicity.threshold > 1.0)
        bad("toxicity threshold must be in [0, 1]");
    if (toxicity.max_retries < 0) bad("max_retries must be non-negative");
    if (toxicity.requests_per_second <= 0.0) bad("requests_per_second must be positive");
    if (toxicity.backoff_base_ms < 0) bad("backoff_base_ms must be non-negative");
    if (topics.k == 0) bad("topics.k must be positive");
    if (topics.reduce_dim == 0) bad("topics.reduce_dim must be positive");
    if (topics.max_iterations == 0) bad("topics.max_iterations must be positive");
    if (threads < 1) bad("threads must be at least 1");
    if (relations.empty()) bad("at least one relation is required");
    if (input.empty()) bad("input path is required");
    if (for_pipeline) {
        // the categorize stage cannot run without a topic-to-category map
        if (category_map.empty()) bad("category_map path is required");
        for (const std::string& path : {input, category_map}) {
            if (!std::filesystem::exists(path))
                bad("referenced file '" + path + "' does not exist");
        }
        if (!profiles.empty() && !std::filesystem::exists(profiles))
            bad("referenced file '" + profiles + "' does not exist");
    }
}

} // namespace toxtrace
