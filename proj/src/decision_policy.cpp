#include "earlyrisk/decision_policy.hpp"

#include <fstream>

#include "earlyrisk/textprep.hpp"
#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

void HistoricRuleParams::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must be in (0,1)");
    if (m < 0) throw ConfigError("m must be >= 0");
    if (min_delay < 1) throw ConfigError("min_delay must be >= 1");
}

void WindowConfig::validate() const {
    if (n < 1) throw ConfigError("window size n must be >= 1");
    if (token_budget < 1) throw ConfigError("token budget must be >= 1");
}

std::string build_window(const std::vector<std::string>& history, int current_round,
                         const WindowConfig& w) {
    w.validate();
    if (current_round < 1 || static_cast<size_t>(current_round) > history.size())
        throw ConfigError(strfmt("round %d out of range [1,%zu]", current_round, history.size()));
    const int take = std::min(w.n, current_round);
    std::string joined;
    for (int i = 0; i < take; ++i) {
        const std::string& text = history[static_cast<size_t>(current_round - 1 - i)];
        if (text.empty()) continue;
        if (!joined.empty()) joined.push_back(' ');
        joined += text;
    }
    return truncate_tokens(joined.empty() ? std::string() : joined,
                           static_cast<size_t>(w.token_budget));
}

Decision observe(UserDecisionState& s, double score, const HistoricRuleParams& p) {
    p.validate();
    if (!(score >= 0.0 && score <= 1.0))
        throw ConfigError(strfmt("score %g out of range [0,1]", score));
    s.scores.push_back(score);
    if (s.alarmed) return {1, score};
    const int r = static_cast<int>(s.scores.size());
    if (r >= p.min_delay && r >= p.m + 1) {
        bool all_above = true;
        for (int i = r - p.m - 1; i < r; ++i)
            if (!(s.scores[static_cast<size_t>(i)] > p.threshold)) {
                all_above = false;
                break;
            }
        if (all_above) {
            s.alarmed = true;
            s.alarm_round = r;
            return {1, score};
        }
    }
    return {0, score};
}

int finalize(const UserDecisionState& s) { return s.alarmed ? 1 : 0; }

PolicyConfig load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open policy file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(strfmt("%s: malformed JSON: %s", path.c_str(), e.what()));
    }
    if (j.value("type", "historic") != "historic")
        throw ConfigError(path + ": unknown policy type '" + j["type"].get<std::string>() + "'");
    PolicyConfig p;
    p.rule.threshold = j.value("threshold", p.rule.threshold);
    p.rule.m = j.value("m", p.rule.m);
    p.rule.min_delay = j.value("min_delay", p.rule.min_delay);
    if (j.contains("window")) {
        p.window.n = j["window"].value("n", p.window.n);
        p.window.token_budget = j["window"].value("token_budget", p.window.token_budget);
    }
    p.rule.validate();
    p.window.validate();
    return p;
}

void save_policy(const PolicyConfig& p, const std::string& path) {
    ordered_json j;
    j["type"] = "historic";
    j["threshold"] = p.rule.threshold;
    j["m"] = p.rule.m;
    j["min_delay"] = p.rule.min_delay;
    j["window"] = {{"n", p.window.n}, {"token_budget", p.window.token_budget}};
    std::ofstream out(path);
    if (!out) throw DataError("cannot write policy file '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace earlyrisk
