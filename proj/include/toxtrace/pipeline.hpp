#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "toxtrace/config.hpp"
#include "toxtrace/error.hpp"

namespace toxtrace {

// Pipeline stages in execution order. A stage that fails for operational
// reasons aborts the run with exit code 10 + its position; bad input or
// config keeps the usual user-error exit 2.
enum class Stage : int {
    ingest = 0,
    score,
    filter,
    topics,
    categorize,
    network,
    trends,
    manifest,
};

std::string_view stage_name(Stage s);

class StageError : public Error {
public:
    StageError(Stage stage, const Error& cause)
        : Error(cause.kind(),
                "stage " + std::string(stage_name(stage)) + ": " + cause.what()),
          stage_(stage) {}

    Stage stage() const { return stage_; }
    int exit_code() const { return is_user_error() ? 2 : 10 + static_cast<int>(stage_); }

private:
    Stage stage_;
};

struct RunSummary {
    std::size_t records = 0;
    std::size_t duplicates = 0;
    std::size_t invalid = 0;
    std::size_t toxic = 0;
    std::size_t unclustered = 0; // toxic records with no embeddable text
    std::vector<std::string> reports;
};

// Runs ingest through trends and writes the report bundle plus the run
// manifest into config.output_dir. Progress goes to `log`.
RunSummary run_all(const RunConfig& config, std::ostream& log);

} // namespace toxtrace
