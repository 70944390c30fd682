#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "earlyrisk/decision_policy.hpp"
#include "earlyrisk/risk_scoring.hpp"
#include "earlyrisk/run_log.hpp"
#include "earlyrisk/textprep.hpp"

namespace earlyrisk {

// One evaluation run: either an in-process scorer or an external model host.
struct RunScorer {
    std::shared_ptr<RiskScorer> builtin;
    std::optional<ExternalScorerEndpoint> external;

    std::vector<double> score_batch(
        const std::vector<std::pair<std::string, std::string>>& id_text) const;
};

struct ClientOptions {
    std::string base_url;  // e.g. http://127.0.0.1:8080
    std::string token;
    HistoricRuleParams rule;
    WindowConfig window;
    NormalizationConfig norm;
    std::string log_path;  // empty: keep records in memory only
    int max_retries = 5;
    int initial_backoff_ms = 100;
};

// Drives the round loop: fetch writings, window, score, apply the historic
// rule, submit one answer set per run. Scores keep flowing after an alarm.
class StreamClient {
public:
    StreamClient(ClientOptions opts, std::vector<RunScorer> runs);
    ~StreamClient();

    // Processes one round; false once the server reports the stream finished.
    bool step();
    // Loops step() to completion.
    void run();

    // Lets a caller repoint the client after a server restart.
    void set_server(const std::string& base_url);

    int rounds_completed() const { return rounds_completed_; }
    size_t run_count() const { return runs_.size(); }
    const std::map<std::string, UserDecisionState>& states(size_t run) const;
    const std::vector<RunLogRecord>& log_records() const { return records_; }

private:
    struct Http;
    std::string get_with_retry(const std::string& path);
    std::string post_with_retry(const std::string& path, const std::string& body);

    ClientOptions opts_;
    std::vector<RunScorer> runs_;
    std::unique_ptr<Http> http_;
    std::map<std::string, std::vector<std::string>> histories_;  // normalized post texts
    std::vector<std::map<std::string, UserDecisionState>> states_;
    std::vector<RunLogRecord> records_;
    std::unique_ptr<std::ofstream> log_out_;
    int rounds_completed_ = 0;
    bool finished_ = false;
};

// Runs a client to completion and returns its log records.
std::vector<RunLogRecord> run_client(const ClientOptions& opts, std::vector<RunScorer> runs);

}  // namespace earlyrisk
