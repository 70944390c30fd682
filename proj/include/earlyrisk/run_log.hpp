#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "earlyrisk/common.hpp"

namespace earlyrisk {

struct RunLogRecord {
    int run = 0;
    int round = 0;  // 0-based wire round
    std::string nick;
    int decision = 0;
    double score = 0.0;
    int64_t elapsed_ms = 0;  // wall-clock duration of the round, repeated per record
};

// Per user, in round order.
struct UserRoundHistory {
    std::vector<int> rounds;
    std::vector<double> scores;
    std::vector<int> decisions;
};

// run id -> nick -> history
using RunHistories = std::map<int, std::map<std::string, UserRoundHistory>>;

// Append-only JSONL, one record per line.
void export_run_logs(const std::vector<RunLogRecord>& records, const std::string& path);

std::vector<RunLogRecord> read_run_logs(const std::string& path);

// Reconstructs per-user score/decision histories. Records duplicated by a
// crash-recovery resume are deduplicated keeping the last occurrence.
RunHistories replay_run_logs(const std::string& path);
RunHistories replay_run_logs(const std::vector<RunLogRecord>& records);

std::string run_log_line(const RunLogRecord& r);

}  // namespace earlyrisk
