#include "toxtrace/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "toxtrace/datetime.hpp"
#include "toxtrace/error.hpp"
#include "toxtrace/util.hpp"

namespace toxtrace {

std::string_view relation_name(Relation r) {
    return r == Relation::mention ? "mention" : "retweet";
}

Relation relation_from_name(std::string_view name) {
    if (name == "mention" || name == "mentions") return Relation::mention;
    if (name == "retweet" || name == "retweets") return Relation::retweet;
    throw Error(ErrorKind::usage, "unknown relation '" + std::string(name) +
                                      "' (expected mention or retweet)");
}

std::vector<std::string> extract_hashtags(std::string_view text) {
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '#') continue;
        std::size_t j = i + 1;
        while (j < text.size() && is_word_char(text[j])) ++j;
        if (j > i + 1) {
            std::string tag;
            tag.reserve(j - i - 1);
            for (std::size_t k = i + 1; k < j; ++k) tag += to_lower_ascii(text[k]);
            tags.push_back(std::move(tag));
        }
        i = j - 1;
    }
    return tags;
}

namespace {

constexpr std::size_t kMaxHandleLen = 15;

} // namespace

std::vector<std::string> extract_mentions(std::string_view text) {
    std::vector<std::string> handles;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '@') continue;
        if (i > 0 && is_word_char(text[i - 1])) continue; // emails etc.
        std::size_t j = i + 1;
        while (j < text.size() && is_word_char(text[j])) ++j;
        std::size_t len = j - (i + 1);
        if (len >= 1 && len <= kMaxHandleLen)
            handles.emplace_back(text.substr(i + 1, len));
        i = j - 1;
    }
    return handles;
}

RelationTargets classify_relation(const TweetRecord& record) {
    RelationTargets out;
    if (record.retweet_of) {
        out.kind = RelationTargets::Kind::retweet;
        out.targets.push_back(*record.retweet_of);
    } else if (!record.mentions.empty()) {
        out.kind = RelationTargets::Kind::mention;
        out.targets = record.mentions;
    }
    return out;
}

std::string clean_for_embedding(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    bool first_token = true;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                                   text[i] == '\r' || text[i] == '\f' || text[i] == '\v'))
            ++i;
        if (i >= text.size()) break;
        std::size_t j = i;
        while (j < text.size() && !(text[j] == ' ' || text[j] == '\t' || text[j] == '\n' ||
                                    text[j] == '\r' || text[j] == '\f' || text[j] == '\v'))
            ++j;
        std::string_view tok = text.substr(i, j - i);
        bool drop = tok[0] == '@' || tok.substr(0, 4) == "http" ||
                    (first_token && tok == "RT");
        if (!drop) {
            if (!out.empty()) out += ' ';
            out += tok;
        }
        first_token = false;
        i = j;
    }
    return out;
}

namespace {

// Retweet marker: exact prefix "RT @" and a valid handle right after it.
std::optional<std::string> detect_retweet_target(std::string_view text) {
    if (text.substr(0, 4) != "RT @") return std::nullopt;
    std::size_t j = 4;
    while (j < text.size() && is_word_char(text[j])) ++j;
    std::size_t len = j - 4;
    if (len < 1 || len > kMaxHandleLen) return std::nullopt;
    return std::string(text.substr(4, len));
}

void annotate(TweetRecord& rec) {
    rec.hashtags = extract_hashtags(rec.text);
    rec.mentions = extract_mentions(rec.text);
    rec.retweet_of = detect_retweet_target(rec.text);
}

bool parse_line_record(const std::string& line, TweetRecord& rec, std::string& why) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        why = "not a JSON object";
        return false;
    }
    auto need_string = [&](const char* key, std::string& dst) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            why = std::string("missing or non-string field '") + key + "'";
            return false;
        }
        dst = it->get<std::string>();
        return true;
    };
    std::string created;
    if (!need_string("id", rec.id) || !need_string("user", rec.author) ||
        !need_string("created_at", created) || !need_string("text", rec.text))
        return false;
    if (rec.id.empty()) {
        why = "empty id";
        return false;
    }
    try {
        rec.created_at = parse_rfc3339(created);
    } catch (const Error& e) {
        why = e.what();
        return false;
    }
    if (auto it = j.find("verified"); it != j.end()) {
        if (!it->is_boolean()) {
            why = "field 'verified' must be a boolean";
            return false;
        }
        rec.verified = it->get<bool>();
    }
    if (auto it = j.find("followers"); it != j.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned()) {
            why = "field 'followers' must be an integer";
            return false;
        }
        rec.followers = it->get<std::int64_t>();
        if (*rec.followers < 0) {
            why = "field 'followers' must be non-negative";
            return false;
        }
    }
    for (auto& [key, value] : j.items()) {
        if (key == "id" || key == "user" || key == "created_at" || key == "text" ||
            key == "verified" || key == "followers")
            continue;
        rec.metadata[key] = value;
    }
    annotate(rec);
    return true;
}

} // namespace

Corpus parse_records(std::istream& in, std::ostream* diag) {
    if (!in.good()) throw Error(ErrorKind::io, "cannot read input stream");

    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;

        TweetRecord rec;
        std::string why;
        if (!parse_line_record(line, rec, why)) {
            ++corpus.dropped_invalid;
            if (diag) *diag << "line " << line_no << ": skipped (" << why << ")\n";
            continue;
        }
        if (!seen_ids.insert(rec.id).second) {
            ++corpus.dropped_duplicates;
            continue;
        }
        corpus.records.push_back(std::move(rec));
    }
    if (in.bad()) throw Error(ErrorKind::io, "I/O failure while reading input");
    if (corpus.records.empty())
        throw Error(ErrorKind::input, "no valid records in input");

    std::sort(corpus.records.begin(), corpus.records.end(),
              [](const TweetRecord& a, const TweetRecord& b) {
                  if (a.created_at != b.created_at) return a.created_at < b.created_at;
                  return a.id < b.id;
              });
    return corpus;
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
    for (const TweetRecord& rec : corpus.records) {
        nlohmann::json j;
        j["id"] = rec.id;
        j["user"] = rec.author;
        j["created_at"] = format_rfc3339_utc(rec.created_at);
        j["text"] = rec.text;
        if (rec.verified) j["verified"] = *rec.verified;
        if (rec.followers) j["followers"] = *rec.followers;
        for (auto& [key, value] : rec.metadata.items()) j[key] = value;
        out << j.dump() << '\n';
    }
}

DedupResult dedup_for_network(const Corpus& corpus) {
    DedupResult result;
    result.corpus.dropped_duplicates = corpus.dropped_duplicates;
    result.corpus.dropped_invalid = corpus.dropped_invalid;
    std::unordered_set<std::string> seen;
    for (const TweetRecord& rec : corpus.records) {
        std::string key = rec.author;
        key += '\x1f';
        key += rec.text;
        if (seen.insert(std::move(key)).second)
            result.corpus.records.push_back(rec);
        else
            ++result.removed;
    }
    return result;
}

} // namespace toxtrace
