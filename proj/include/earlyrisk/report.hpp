#pragma once

#include <string>
#include <vector>

#include "earlyrisk/corpus.hpp"
#include "earlyrisk/early_metrics.hpp"
#include "earlyrisk/symptom_ranking.hpp"

namespace earlyrisk {

struct Table {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

enum class TableFormat { Csv, Markdown };

TableFormat parse_table_format(std::string_view s);

std::string render_table(const Table& t, TableFormat format);

std::string fmt_metric(double v, int digits = 3);

// 8 columns in the decision-table order: P, R, F1, ERDE@o..., latencyTP, speed, Flatency.
Table decision_metrics_table(const std::vector<std::pair<std::string, DecisionMetrics>>& rows,
                             const std::vector<int>& deadlines);
// Single-row variant without the run label column.
Table decision_metrics_table(const DecisionMetrics& m, const std::vector<int>& deadlines);

Table checkpoint_table(const std::vector<std::pair<std::string, std::vector<RankingCheckpoint>>>& rows);

Table ranking_eval_table(const RankingEvalReport& report);

Table corpus_stats_table(const std::string& name, const CorpusStats& s);

Table timing_table(const std::vector<std::pair<std::string, int64_t>>& totals);

}  // namespace earlyrisk
