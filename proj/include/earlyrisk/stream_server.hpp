#pragma once

#include <chrono>
#include <fstream>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "earlyrisk/corpus.hpp"
#include "earlyrisk/run_log.hpp"

namespace earlyrisk {

struct RoundItem {
    std::string nick;
    int number = 0;  // 1-based post number within the user's history
    std::string title;
    std::string content;
    std::string date;
};

struct Round {
    int number = 0;  // 0-based
    std::vector<RoundItem> items;
    bool finished = false;  // empty items: the stream is exhausted
};

struct SubmissionDecision {
    std::string nick;
    int decision = 0;
    double score = 0.0;
};

// Releases one post per user per round and holds a barrier until every run of
// the team has submitted. All submissions append to a JSONL log from which a
// restarted server rebuilds its state.
class MockServer {
public:
    struct Options {
        std::string token;
        int runs_expected = 1;
        std::string log_path;  // empty: in-memory only
        bool resume = false;
    };

    MockServer(Corpus corpus, Options opts);

    // Current round; repeated calls before the barrier clears return the same
    // round. Empty items marks the stream as finished.
    Round get_writings(const std::string& token);

    // Validates and persists one run's decisions for the current round;
    // advances the round once every run has submitted. Returns the round the
    // submission was accepted for.
    int submit(const std::string& token, int run,
               const std::vector<SubmissionDecision>& decisions);

    int current_round() const;
    bool finished() const;
    int runs_expected() const { return opts_.runs_expected; }
    std::vector<RunLogRecord> log_records() const;

private:
    std::vector<std::string> round_nicks(int round) const;
    void check_token(const std::string& token) const;
    void rebuild_from_log();

    Corpus corpus_;
    Options opts_;
    mutable std::mutex mu_;
    int round_ = 0;
    bool finished_ = false;
    std::set<int> submitted_runs_;
    std::vector<RunLogRecord> records_;
    std::unique_ptr<std::ofstream> log_out_;
    bool round_open_ = false;
    std::chrono::steady_clock::time_point round_opened_at_;
};

// HTTP face of the mock server:
//   GET  /getwritings/{token}      -> JSON array of round items ([] = finished)
//   POST /submit/{token}/{run}     -> {"status":"ok","round":r}
class HttpStreamServer {
public:
    explicit HttpStreamServer(MockServer& core);
    ~HttpStreamServer();

    // Binds to an ephemeral port and serves on a background thread.
    int start(const std::string& host = "127.0.0.1");
    // Serves on a fixed port, blocking until stop().
    void serve_blocking(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace earlyrisk
