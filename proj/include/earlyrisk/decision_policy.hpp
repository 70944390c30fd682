#pragma once

#include <string>
#include <vector>

#include "earlyrisk/common.hpp"

namespace earlyrisk {

struct HistoricRuleParams {
    double threshold = 0.7;
    int m = 10;          // prior predictions that must also exceed the threshold
    int min_delay = 10;  // posts seen before the rule starts to apply

    void validate() const;
};

struct WindowConfig {
    int n = 10;              // posts in the window
    int token_budget = 512;  // tokens after joining

    void validate() const;
};

struct Decision {
    int value = 0;  // sticky: stays 1 after the first alarm
    double score = 0.0;
};

struct UserDecisionState {
    std::string nick;
    std::vector<double> scores;  // one per round observed
    bool alarmed = false;
    int alarm_round = 0;  // 1-based; meaningful only when alarmed
};

// Joins the last min(n, current_round) normalized post texts, current post
// first and then newest-to-oldest, truncated to the token budget. The current
// post can never be truncated away.
std::string build_window(const std::vector<std::string>& history, int current_round,
                         const WindowConfig& w);

// Appends the score and applies the historic rule: alarm at round r iff
// r >= min_delay, r >= m+1, and the last m+1 scores all strictly exceed the
// threshold. Alarms are sticky.
Decision observe(UserDecisionState& s, double score, const HistoricRuleParams& p);

// 1 if alarmed, else 0; users whose stream ended without an alarm count as
// negative predictions.
int finalize(const UserDecisionState& s);

// {"type":"historic","threshold":0.7,"m":10,"min_delay":10,
//  "window":{"n":10,"token_budget":512}}
struct PolicyConfig {
    HistoricRuleParams rule;
    WindowConfig window;
};

PolicyConfig load_policy(const std::string& path);
void save_policy(const PolicyConfig& p, const std::string& path);

}  // namespace earlyrisk
