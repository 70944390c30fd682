#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "earlyrisk/common.hpp"
#include "earlyrisk/corpus.hpp"
#include "earlyrisk/run_log.hpp"

namespace earlyrisk {

struct UserOutcome {
    std::string nick;
    bool gold_positive = false;
    int final_decision = 0;
    // Posts seen when the alarm fired (1-based), or total posts seen for
    // users that never alarmed.
    int k = 0;
    std::vector<double> score_history;
};

enum class LatencyMedianMode { MedianOfPenalties, PenaltyOfMedianK };

struct EarlyMetricsConfig {
    std::vector<int> deadlines{5, 50};
    // False-positive cost; defaults to the positive-user fraction of the
    // evaluated set when unset. c_fn and c_tp follow the standard convention.
    std::optional<double> c_fp;
    double c_fn = 1.0;
    double c_tp = 1.0;
    double penalty_p = 0.0078;
    LatencyMedianMode latency_median = LatencyMedianMode::MedianOfPenalties;

    void validate() const;
};

struct Confusion {
    size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct Prf {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct DecisionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::map<int, double> erde;            // deadline -> value
    std::optional<double> latency_tp;      // unset when the run has no true positive
    double speed = 0.0;
    double f_latency = 0.0;
};

struct RankingCheckpoint {
    int k = 0;
    double p_at_10 = 0.0;
    double ndcg_at_10 = 0.0;
    double ndcg_at_100 = 0.0;
};

Confusion confusion(const std::vector<UserOutcome>& outcomes);
Prf precision_recall_f1(const Confusion& c);

// Latency cost for a true positive detected after k posts with deadline o.
double latency_cost(int k, int o);
// ERDE = mean over users of {FP: c_fp, FN: c_fn, TP: lc_o(k)*c_tp, TN: 0}.
double erde(const std::vector<UserOutcome>& outcomes, int deadline,
            const EarlyMetricsConfig& cfg = {});

double latency_penalty(int k, double p);

struct LatencyStats {
    std::optional<double> latency_tp;  // median k over true positives
    double speed = 0.0;
    double f_latency = 0.0;
};

LatencyStats latency_speed_flatency(const std::vector<UserOutcome>& outcomes,
                                    const EarlyMetricsConfig& cfg, double f1);

RankingCheckpoint ranking_at_checkpoint(const std::vector<UserOutcome>& outcomes, int k);

DecisionMetrics decision_report(const std::vector<UserOutcome>& outcomes,
                                const EarlyMetricsConfig& cfg = {});

// Joins one run's replayed histories with gold labels. User sets must match.
std::vector<UserOutcome> outcomes_from_histories(
    const std::map<std::string, UserRoundHistory>& histories,
    const std::map<std::string, Label>& gold);

// Total wall-clock per run: per-round elapsed summed over rounds.
std::map<int, int64_t> timing_report(const std::vector<RunLogRecord>& records);

// 3,600,000 -> "1h:0m"; 94,620,000 -> "1 day + 2h:17m".
std::string format_duration_ms(int64_t ms);

}  // namespace earlyrisk
