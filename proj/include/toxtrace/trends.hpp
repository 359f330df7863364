#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toxtrace/corpus.hpp"
#include "toxtrace/graph.hpp"

namespace toxtrace {

// Toxic tweet counts per (UTC day, category code). Days are counted from
// the Unix epoch; only days with at least one record appear.
struct DailySeries {
    std::map<std::int64_t, std::map<std::string, std::int64_t>> by_day;

    std::int64_t total() const;
};

struct CompositionTable {
    std::map<std::string, std::map<std::string, double>> weekly; // iso week -> code -> share
    std::map<std::string, double> overall;
};

// categories[i] labels corpus.records[i]; an empty label is an input error.
DailySeries daily_volume(const Corpus& corpus, const std::vector<std::string>& categories);

CompositionTable composition(const DailySeries& series);

// Highest-volume days, ties broken by earlier date. Returns (day, count).
std::vector<std::pair<std::int64_t, std::int64_t>> top_days(const DailySeries& series,
                                                            std::size_t k);

// Hashtag occurrence counts with multiplicity, count descending then tag ascending.
std::vector<std::pair<std::string, std::int64_t>> hashtag_counts(const Corpus& corpus,
                                                                 std::size_t n);

// Per target user, how many distinct tweets of each category link to them.
// A tweet naming the same user twice counts once. Every edge's record must
// have a category.
std::map<std::string, std::map<std::string, std::int64_t>> user_category_mentions(
    const std::vector<GraphEdge>& edges,
    const std::unordered_map<std::string, std::string>& category_of_record);

} // namespace toxtrace
