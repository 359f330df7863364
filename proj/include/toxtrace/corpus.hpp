#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace toxtrace {

enum class Relation { mention, retweet };

std::string_view relation_name(Relation r);
Relation relation_from_name(std::string_view name); // throws Error(usage)

struct TweetRecord {
    std::string id;
    std::string author;          // handle without '@'
    std::int64_t created_at = 0; // UTC epoch seconds
    std::string text;
    std::vector<std::string> hashtags;
    std::vector<std::string> mentions;
    std::optional<std::string> retweet_of; // set iff text starts with "RT @<handle>"
    std::optional<bool> verified;
    std::optional<std::int64_t> followers;
    nlohmann::json metadata = nlohmann::json::object(); // unknown input fields, preserved
};

struct Corpus {
    std::vector<TweetRecord> records; // sorted by (created_at, id)
    std::size_t dropped_duplicates = 0;
    std::size_t dropped_invalid = 0;
};

// Token extraction

// Every '#' followed by a maximal [A-Za-z0-9_]+ run, lowercased, '#' stripped.
// Duplicates kept in order of appearance.
std::vector<std::string> extract_hashtags(std::string_view text);

// '@handle' where handle is 1-15 word chars and the '@' sits at text start or
// after a non-word character. Longer runs are not handles (platform rule).
std::vector<std::string> extract_mentions(std::string_view text);

struct RelationTargets {
    enum class Kind { retweet, mention, none } kind = Kind::none;
    std::vector<std::string> targets;
};

RelationTargets classify_relation(const TweetRecord& record);

// Strips @-tokens, a leading "RT" token, and whitespace-delimited tokens
// starting with "http"; collapses whitespace.
std::string clean_for_embedding(std::string_view text);

// Parsing & serialization

// One JSON object per line; blank lines and '#' comment lines are skipped.
// Malformed lines are counted and reported to `diag` with their line number.
// Throws Error(io) on an unreadable stream, Error(input) when nothing parses.
Corpus parse_records(std::istream& in, std::ostream* diag = nullptr);

// Normalized JSON Lines (sorted keys, UTC timestamps, metadata inlined).
// Derived fields are recomputed on parse, so they are not written.
void serialize_corpus(const Corpus& corpus, std::ostream& out);

struct DedupResult {
    Corpus corpus;
    std::size_t removed = 0;
};

// Drops records whose (author, exact text) repeats an earlier record.
DedupResult dedup_for_network(const Corpus& corpus);

} // namespace toxtrace
