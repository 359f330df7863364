#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toxtrace/corpus.hpp"
#include "toxtrace/topics.hpp"
#include "toxtrace/toxicity.hpp"

namespace toxtrace {

// One declarative run description. Every stage seed and every report header
// derives from this.
struct RunConfig {
    std::string input;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t top_users = 30;
    std::size_t top_hashtags = 20;
    ScoreProvider provider = ScoreProvider::stub;
    ToxicityConfig toxicity;
    TopicConfig topics;
    std::string category_map; // path
    std::string profiles;     // path, optional
    std::vector<Relation> relations = {Relation::mention, Relation::retweet};

    static RunConfig from_json(const nlohmann::json& j); // throws Error(config)
    static RunConfig from_file(const std::string& path); // throws Error(io|config)

    // Canonical form used for hashing and the manifest. The API key is a
    // secret and never serialized.
    nlohmann::json to_json() const;
    std::string hash() const; // 16 hex digits

    std::uint64_t stage_seed(std::string_view stage) const;

    // Range checks; with for_pipeline also the category map requirement and
    // existence of every referenced path. Throws Error(config).
    void validate(bool for_pipeline = true) const;
};

} // namespace toxtrace
