#include "earlyrisk/run_log.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

std::string run_log_line(const RunLogRecord& r) {
    ordered_json j;
    j["run"] = r.run;
    j["round"] = r.round;
    j["nick"] = r.nick;
    j["decision"] = r.decision;
    j["score"] = r.score;
    j["elapsed_ms"] = r.elapsed_ms;
    return j.dump();
}

void export_run_logs(const std::vector<RunLogRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write run log '" + path + "'");
    for (const auto& r : records) out << run_log_line(r) << "\n";
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<RunLogRecord> read_run_logs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open run log '" + path + "'");
    std::vector<RunLogRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            RunLogRecord r;
            r.run = j.at("run").get<int>();
            r.round = j.at("round").get<int>();
            r.nick = j.at("nick").get<std::string>();
            r.decision = j.at("decision").get<int>();
            r.score = j.at("score").get<double>();
            r.elapsed_ms = j.at("elapsed_ms").get<int64_t>();
            records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw DataError(strfmt("%s:%zu: corrupt log line: %s", path.c_str(), line_no, e.what()));
        }
    }
    return records;
}

RunHistories replay_run_logs(const std::vector<RunLogRecord>& records) {
    // Last record wins per (run, round, nick); a resumed server may have
    // re-logged a round that was only partially flushed before a crash.
    std::map<std::tuple<int, int, std::string>, std::pair<double, int>> dedup;
    for (const auto& r : records)
        dedup[{r.run, r.round, r.nick}] = {r.score, r.decision};
    RunHistories out;
    for (const auto& [key, val] : dedup) {
        const auto& [run, round, nick] = key;
        UserRoundHistory& h = out[run][nick];
        h.rounds.push_back(round);
        h.scores.push_back(val.first);
        h.decisions.push_back(val.second);
    }
    // Map iteration delivers rounds ascending already; keep the invariant explicit.
    for (auto& [run, users] : out)
        for (auto& [nick, h] : users)
            if (!std::is_sorted(h.rounds.begin(), h.rounds.end()))
                throw DataError("run log rounds out of order after replay");
    return out;
}

RunHistories replay_run_logs(const std::string& path) {
    return replay_run_logs(read_run_logs(path));
}

}  // namespace earlyrisk
