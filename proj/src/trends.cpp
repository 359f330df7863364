#include "toxtrace/trends.hpp"

#include <algorithm>
#include <set>

#include "toxtrace/datetime.hpp"
#include "toxtrace/error.hpp"

namespace toxtrace {

std::int64_t DailySeries::total() const {
    std::int64_t sum = 0;
    for (const auto& [day, counts] : by_day)
        for (const auto& [code, count] : counts) sum += count;
    return sum;
}

DailySeries daily_volume(const Corpus& corpus, const std::vector<std::string>& categories) {
    if (categories.size() != corpus.records.size())
        throw Error(ErrorKind::input, "daily_volume: one category per record required");
    DailySeries series;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        if (categories[i].empty())
            throw Error(ErrorKind::input,
                        "daily_volume: record '" + corpus.records[i].id + "' has no category");
        std::int64_t day = utc_day_of(corpus.records[i].created_at);
        ++series.by_day[day][categories[i]];
    }
    return series;
}

CompositionTable composition(const DailySeries& series) {
    CompositionTable table;
    std::map<std::string, std::map<std::string, std::int64_t>> weekly_counts;
    std::map<std::string, std::int64_t> overall_counts;
    std::int64_t total = 0;
    for (const auto& [day, counts] : series.by_day) {
        std::string week = iso_week_of_day(day).str();
        for (const auto& [code, count] : counts) {
            weekly_counts[week][code] += count;
            overall_counts[code] += count;
            total += count;
        }
    }
    for (const auto& [week, counts] : weekly_counts) {
        std::int64_t week_total = 0;
        for (const auto& [code, count] : counts) week_total += count;
        for (const auto& [code, count] : counts)
            table.weekly[week][code] =
                static_cast<double>(count) / static_cast<double>(week_total);
    }
    for (const auto& [code, count] : overall_counts)
        table.overall[code] = static_cast<double>(count) / static_cast<double>(total);
    return table;
}

std::vector<std::pair<std::int64_t, std::int64_t>> top_days(const DailySeries& series,
                                                            std::size_t k) {
    std::vector<std::pair<std::int64_t, std::int64_t>> days;
    days.reserve(series.by_day.size());
    for (const auto& [day, counts] : series.by_day) {
        std::int64_t total = 0;
        for (const auto& [code, count] : counts) total += count;
        days.emplace_back(day, total);
    }
    std::stable_sort(days.begin(), days.end(), [](const auto& a, const auto& b) {
        return a.second > b.second; // stable keeps earlier days first on ties
    });
    if (days.size() > k) days.resize(k);
    return days;
}

std::vector<std::pair<std::string, std::int64_t>> hashtag_counts(const Corpus& corpus,
                                                                 std::size_t n) {
    std::map<std::string, std::int64_t> counts;
    for (const TweetRecord& rec : corpus.records)
        for (const std::string& tag : rec.hashtags) ++counts[tag];
    std::vector<std::pair<std::string, std::int64_t>> rows(counts.begin(), counts.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (rows.size() > n) rows.resize(n);
    return rows;
}

std::map<std::string, std::map<std::string, std::int64_t>> user_category_mentions(
    const std::vector<GraphEdge>& edges,
    const std::unordered_map<std::string, std::string>& category_of_record) {
    std::map<std::string, std::map<std::string, std::int64_t>> tally;
    std::set<std::pair<std::string, std::string>> seen; // (target, record): tweet counts once
    for (const GraphEdge& e : edges) {
        auto it = category_of_record.find(e.record_id);
        if (it == category_of_record.end() || it->second.empty())
            throw Error(ErrorKind::input, "record '" + e.record_id + "' has no category");
        if (!seen.emplace(e.target, e.record_id).second) continue;
        ++tally[e.target][it->second];
    }
    return tally;
}

} // namespace toxtrace
