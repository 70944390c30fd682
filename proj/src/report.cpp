#include "earlyrisk/report.hpp"

#include <algorithm>
#include <cmath>

namespace earlyrisk {

TableFormat parse_table_format(std::string_view s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "md" || s == "markdown") return TableFormat::Markdown;
    throw ConfigError("format must be 'csv' or 'md'");
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string render_csv(const Table& t) {
    std::string out;
    for (size_t i = 0; i < t.header.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += csv_escape(t.header[i]);
    }
    out.push_back('\n');
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += csv_escape(row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string render_markdown(const Table& t) {
    std::string out;
    if (!t.title.empty()) out += "### " + t.title + "\n\n";
    auto emit_row = [&](const std::vector<std::string>& cells) {
        out += "|";
        for (const auto& c : cells) {
            out.push_back(' ');
            out += c;
            out += " |";
        }
        out.push_back('\n');
    };
    emit_row(t.header);
    std::vector<std::string> rule(t.header.size(), "---");
    emit_row(rule);
    for (const auto& row : t.rows) emit_row(row);
    return out;
}

}  // namespace

std::string render_table(const Table& t, TableFormat format) {
    return format == TableFormat::Csv ? render_csv(t) : render_markdown(t);
}

std::string fmt_metric(double v, int digits) {
    return strfmt("%.*f", digits, v);
}

namespace {

std::vector<std::string> decision_row(const DecisionMetrics& m, const std::vector<int>& deadlines) {
    std::vector<std::string> row;
    row.push_back(fmt_metric(m.precision));
    row.push_back(fmt_metric(m.recall));
    row.push_back(fmt_metric(m.f1));
    for (int o : deadlines) {
        auto it = m.erde.find(o);
        if (it == m.erde.end()) throw ConfigError(strfmt("no ERDE value for deadline %d", o));
        row.push_back(fmt_metric(it->second));
    }
    row.push_back(m.latency_tp ? fmt_metric(*m.latency_tp, 1) : "n/a");
    row.push_back(fmt_metric(m.speed));
    row.push_back(fmt_metric(m.f_latency));
    return row;
}

std::vector<std::string> decision_header(const std::vector<int>& deadlines) {
    std::vector<std::string> header{"P", "R", "F1"};
    for (int o : deadlines) header.push_back(strfmt("ERDE%d", o));
    header.push_back("latencyTP");
    header.push_back("speed");
    header.push_back("Flatency");
    return header;
}

}  // namespace

Table decision_metrics_table(const std::vector<std::pair<std::string, DecisionMetrics>>& rows,
                             const std::vector<int>& deadlines) {
    Table t;
    t.title = "Decision-based evaluation";
    t.header.push_back("Model");
    for (auto& h : decision_header(deadlines)) t.header.push_back(std::move(h));
    for (const auto& [name, m] : rows) {
        std::vector<std::string> row{name};
        for (auto& c : decision_row(m, deadlines)) row.push_back(std::move(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table decision_metrics_table(const DecisionMetrics& m, const std::vector<int>& deadlines) {
    Table t;
    t.title = "Decision-based evaluation";
    t.header = decision_header(deadlines);
    t.rows.push_back(decision_row(m, deadlines));
    return t;
}

Table checkpoint_table(
    const std::vector<std::pair<std::string, std::vector<RankingCheckpoint>>>& rows) {
    Table t;
    t.title = "Ranking-based evaluation by processed posts";
    t.header = {"Model", "Ranking", "P@10", "NDCG@10", "NDCG@100"};
    for (const auto& [name, cps] : rows)
        for (const auto& cp : cps)
            t.rows.push_back({name, strfmt("%d post%s", cp.k, cp.k == 1 ? "" : "s"),
                              fmt_metric(cp.p_at_10, 2), fmt_metric(cp.ndcg_at_10, 2),
                              fmt_metric(cp.ndcg_at_100, 2)});
    return t;
}

Table ranking_eval_table(const RankingEvalReport& report) {
    Table t;
    t.title = "Ranking-based evaluation";
    t.header = {"Symptom", "AP", "R-PREC", "P@10", "NDCG@1000"};
    auto row_of = [](const std::string& label, const SymptomEvalRow& r) {
        return std::vector<std::string>{label, fmt_metric(r.ap), fmt_metric(r.r_prec),
                                        fmt_metric(r.p_at_10), fmt_metric(r.ndcg_at_1000)};
    };
    for (const auto& r : report.per_symptom)
        t.rows.push_back(row_of(strfmt("%d", r.symptom_id), r));
    t.rows.push_back(row_of("macro", report.macro));
    return t;
}

Table corpus_stats_table(const std::string& name, const CorpusStats& s) {
    Table t;
    t.title = "Corpus details";
    t.header = {"Corpus",  "Total users", "Pos",      "Neg",      "Posts",
                "PPU med", "PPU min",     "PPU max",  "WPP med",  "WPP min",
                "WPP max"};
    auto count = [](double v) {
        double r = std::round(v);
        if (std::abs(v - r) < 1e-9) return strfmt("%.0f", v);
        return strfmt("%.2f", v);
    };
    t.rows.push_back({name, strfmt("%zu", s.n_users), strfmt("%zu", s.n_pos),
                      strfmt("%zu", s.n_neg), strfmt("%zu", s.n_posts),
                      count(s.posts_per_user.median), count(s.posts_per_user.min),
                      count(s.posts_per_user.max), count(s.words_per_post.median),
                      count(s.words_per_post.min), count(s.words_per_post.max)});
    return t;
}

Table timing_table(const std::vector<std::pair<std::string, int64_t>>& totals) {
    Table t;
    t.title = "Total time";
    t.header = {"Run", "Total time"};
    for (const auto& [name, ms] : totals) t.rows.push_back({name, format_duration_ms(ms)});
    return t;
}

}  // namespace earlyrisk
