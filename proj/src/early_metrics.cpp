#include "earlyrisk/early_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "earlyrisk/ir_metrics.hpp"

namespace earlyrisk {

void EarlyMetricsConfig::validate() const {
    for (int o : deadlines)
        if (o < 1) throw ConfigError("ERDE deadline must be >= 1");
    if (c_fp && !(*c_fp >= 0.0 && *c_fp <= 1.0)) throw ConfigError("c_fp must be in [0,1]");
    if (!(c_fn >= 0.0 && c_fn <= 1.0)) throw ConfigError("c_fn must be in [0,1]");
    if (!(c_tp >= 0.0 && c_tp <= 1.0)) throw ConfigError("c_tp must be in [0,1]");
    if (!(penalty_p > 0.0)) throw ConfigError("penalty p must be positive");
}

Confusion confusion(const std::vector<UserOutcome>& outcomes) {
    Confusion c;
    for (const auto& u : outcomes) {
        const bool pred = u.final_decision == 1;
        if (pred && u.gold_positive)
            ++c.tp;
        else if (pred && !u.gold_positive)
            ++c.fp;
        else if (!pred && u.gold_positive)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

Prf precision_recall_f1(const Confusion& c) {
    Prf out;
    const double tp = static_cast<double>(c.tp);
    out.precision = c.tp + c.fp == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fp);
    out.recall = c.tp + c.fn == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fn);
    out.f1 = out.precision + out.recall == 0.0
                 ? 0.0
                 : 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

double latency_cost(int k, int o) {
    return 1.0 - 1.0 / (1.0 + std::exp(static_cast<double>(k - o)));
}

double erde(const std::vector<UserOutcome>& outcomes, int deadline,
            const EarlyMetricsConfig& cfg) {
    cfg.validate();
    if (outcomes.empty()) throw ConfigError("ERDE over an empty run");
    double c_fp;
    if (cfg.c_fp) {
        c_fp = *cfg.c_fp;
    } else {
        size_t n_pos = 0;
        for (const auto& u : outcomes) n_pos += u.gold_positive ? 1 : 0;
        c_fp = static_cast<double>(n_pos) / static_cast<double>(outcomes.size());
    }
    double total = 0.0;
    for (const auto& u : outcomes) {
        const bool pred = u.final_decision == 1;
        if (pred && u.gold_positive)
            total += latency_cost(u.k, deadline) * cfg.c_tp;
        else if (pred && !u.gold_positive)
            total += c_fp;
        else if (!pred && u.gold_positive)
            total += cfg.c_fn;
    }
    return total / static_cast<double>(outcomes.size());
}

double latency_penalty(int k, double p) {
    return -1.0 + 2.0 / (1.0 + std::exp(-p * static_cast<double>(k - 1)));
}

LatencyStats latency_speed_flatency(const std::vector<UserOutcome>& outcomes,
                                    const EarlyMetricsConfig& cfg, double f1) {
    cfg.validate();
    std::vector<double> ks;
    for (const auto& u : outcomes)
        if (u.final_decision == 1 && u.gold_positive) ks.push_back(static_cast<double>(u.k));
    LatencyStats out;
    if (ks.empty()) {
        // No true positive: flagged via the unset median, scored as zero.
        out.speed = 0.0;
        out.f_latency = 0.0;
        return out;
    }
    out.latency_tp = median(ks);
    if (cfg.latency_median == LatencyMedianMode::MedianOfPenalties) {
        std::vector<double> penalties;
        penalties.reserve(ks.size());
        for (double k : ks)
            penalties.push_back(latency_penalty(static_cast<int>(k), cfg.penalty_p));
        out.speed = 1.0 - median(penalties);
    } else {
        out.speed = 1.0 - (-1.0 + 2.0 / (1.0 + std::exp(-cfg.penalty_p * (*out.latency_tp - 1.0))));
    }
    out.f_latency = f1 * out.speed;
    return out;
}

RankingCheckpoint ranking_at_checkpoint(const std::vector<UserOutcome>& outcomes, int k) {
    if (k < 1) throw ConfigError("checkpoint k must be >= 1");
    std::vector<std::pair<std::string, double>> scored;
    std::set<std::string> relevant;
    for (const auto& u : outcomes) {
        if (u.score_history.empty())
            throw ConfigError("user '" + u.nick + "' has an empty score history");
        size_t idx = std::min<size_t>(static_cast<size_t>(k), u.score_history.size()) - 1;
        scored.emplace_back(u.nick, u.score_history[idx]);
        if (u.gold_positive) relevant.insert(u.nick);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> ranked;
    ranked.reserve(scored.size());
    for (const auto& [nick, score] : scored) ranked.push_back(nick);
    RankingCheckpoint cp;
    cp.k = k;
    cp.p_at_10 = precision_at_k(ranked, relevant, 10);
    cp.ndcg_at_10 = ndcg_at_k(ranked, relevant, 10);
    cp.ndcg_at_100 = ndcg_at_k(ranked, relevant, 100);
    return cp;
}

DecisionMetrics decision_report(const std::vector<UserOutcome>& outcomes,
                                const EarlyMetricsConfig& cfg) {
    cfg.validate();
    DecisionMetrics m;
    Prf prf = precision_recall_f1(confusion(outcomes));
    m.precision = prf.precision;
    m.recall = prf.recall;
    m.f1 = prf.f1;
    for (int o : cfg.deadlines) m.erde[o] = erde(outcomes, o, cfg);
    LatencyStats ls = latency_speed_flatency(outcomes, cfg, m.f1);
    m.latency_tp = ls.latency_tp;
    m.speed = ls.speed;
    m.f_latency = ls.f_latency;
    return m;
}

std::vector<UserOutcome> outcomes_from_histories(
    const std::map<std::string, UserRoundHistory>& histories,
    const std::map<std::string, Label>& gold) {
    std::vector<UserOutcome> out;
    for (const auto& [nick, h] : histories) {
        auto git = gold.find(nick);
        if (git == gold.end())
            throw DataError("user '" + nick + "' appears in the logs but has no gold label");
        UserOutcome u;
        u.nick = nick;
        u.gold_positive = git->second == Label::Positive;
        u.score_history = h.scores;
        u.final_decision = 0;
        u.k = static_cast<int>(h.rounds.size());
        for (size_t i = 0; i < h.decisions.size(); ++i) {
            if (h.decisions[i] == 1) {
                u.final_decision = 1;
                u.k = static_cast<int>(i) + 1;
                break;
            }
        }
        out.push_back(std::move(u));
    }
    for (const auto& [nick, label] : gold)
        if (!histories.count(nick))
            throw DataError("gold user '" + nick + "' never appears in the logs");
    return out;
}

std::map<int, int64_t> timing_report(const std::vector<RunLogRecord>& records) {
    // elapsed_ms is shared by all records of one (run, round); count it once.
    std::map<std::pair<int, int>, int64_t> per_round;
    for (const auto& r : records) per_round[{r.run, r.round}] = r.elapsed_ms;
    std::map<int, int64_t> totals;
    for (const auto& [key, ms] : per_round) totals[key.first] += ms;
    return totals;
}

std::string format_duration_ms(int64_t ms) {
    if (ms < 0) throw ConfigError("negative duration");
    int64_t minutes = ms / 60000;
    int64_t days = minutes / (24 * 60);
    minutes -= days * 24 * 60;
    int64_t hours = minutes / 60;
    minutes -= hours * 60;
    std::string hm = strfmt("%lldh:%lldm", static_cast<long long>(hours),
                            static_cast<long long>(minutes));
    if (days == 0) return hm;
    return strfmt("%lld day%s + %s", static_cast<long long>(days), days == 1 ? "" : "s",
                  hm.c_str());
}

}  // namespace earlyrisk
