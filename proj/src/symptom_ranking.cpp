#include "earlyrisk/symptom_ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "earlyrisk/ir_metrics.hpp"
#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;

std::set<std::string> SymptomSpec::word_set() const {
    std::set<std::string> s;
    s.insert(verbs.begin(), verbs.end());
    s.insert(adjectives.begin(), adjectives.end());
    s.insert(nouns.begin(), nouns.end());
    return s;
}

namespace {

void validate_word_list(const std::vector<std::string>& words, const std::string& what,
                        int symptom_id) {
    if (words.empty())
        throw DataError(strfmt("symptom %d: %s list is empty", symptom_id, what.c_str()));
    std::set<std::string> seen;
    for (const auto& w : words) {
        if (!seen.insert(w).second)
            throw DataError(strfmt("symptom %d: duplicate %s word '%s'", symptom_id, what.c_str(),
                                   w.c_str()));
        for (char c : w)
            if (c >= 'A' && c <= 'Z')
                throw DataError(
                    strfmt("symptom %d: word '%s' must be lowercase", symptom_id, w.c_str()));
    }
}

}  // namespace

std::vector<SymptomSpec> load_symptoms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open symptoms file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(strfmt("%s: malformed JSON: %s", path.c_str(), e.what()));
    }
    if (!j.is_array() || j.empty()) throw DataError(path + ": expected a non-empty JSON array");
    std::vector<SymptomSpec> out;
    std::set<int> ids;
    for (const auto& js : j) {
        SymptomSpec s;
        s.id = js.at("id").get<int>();
        s.name = js.at("name").get<std::string>();
        s.verbs = js.at("verbs").get<std::vector<std::string>>();
        s.adjectives = js.at("adjectives").get<std::vector<std::string>>();
        s.nouns = js.at("nouns").get<std::vector<std::string>>();
        if (s.id < 0 || !ids.insert(s.id).second)
            throw DataError(strfmt("%s: bad or duplicate symptom id %d", path.c_str(), s.id));
        validate_word_list(s.verbs, "verb", s.id);
        validate_word_list(s.adjectives, "adjective", s.id);
        validate_word_list(s.nouns, "noun", s.id);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScoreCell> score_table(const std::string& sentence_id, const PosWords& words,
                                   const SymptomSpec& symptom, const EmbeddingProvider& provider) {
    std::vector<ScoreCell> cells;
    auto embed = [&](const std::string& w) {
        try {
            return provider.embed(w, symptom.name);
        } catch (const std::exception& e) {
            throw Error(strfmt("embedding failed for word '%s' in symptom '%s': %s", w.c_str(),
                               symptom.name.c_str(), e.what()));
        }
    };
    auto run_category = [&](PosTag cat, const std::vector<std::string>& text_words,
                            const std::vector<std::string>& symptom_words) {
        if (text_words.empty() || symptom_words.empty()) return;
        std::vector<std::vector<double>> symptom_vecs;
        symptom_vecs.reserve(symptom_words.size());
        for (const auto& sw : symptom_words) symptom_vecs.push_back(embed(sw));
        std::unordered_map<std::string, std::vector<double>> text_cache;
        for (const auto& tw : text_words) {
            auto it = text_cache.find(tw);
            if (it == text_cache.end()) it = text_cache.emplace(tw, embed(tw)).first;
            for (size_t s = 0; s < symptom_words.size(); ++s) {
                ScoreCell cell;
                cell.sentence_id = sentence_id;
                cell.symptom_id = symptom.id;
                cell.category = cat;
                cell.text_word = tw;
                cell.symptom_word = symptom_words[s];
                cell.similarity = cosine(it->second, symptom_vecs[s]);
                cells.push_back(std::move(cell));
            }
        }
    };
    run_category(PosTag::Verb, words.verbs, symptom.verbs);
    run_category(PosTag::Adj, words.adjectives, symptom.adjectives);
    run_category(PosTag::Noun, words.nouns, symptom.nouns);
    return cells;
}

namespace {

void check_same_keys(const std::vector<ScoreCell>& cells) {
    for (size_t i = 1; i < cells.size(); ++i)
        if (cells[i].sentence_id != cells[0].sentence_id ||
            cells[i].symptom_id != cells[0].symptom_id)
            throw ConfigError("summarize over mixed sentence/symptom ids");
}

}  // namespace

std::optional<double> summarize_max(const std::vector<ScoreCell>& cells) {
    if (cells.empty()) return std::nullopt;
    check_same_keys(cells);
    double sum = 0.0;
    int n_categories = 0;
    for (PosTag cat : {PosTag::Verb, PosTag::Adj, PosTag::Noun}) {
        bool any = false;
        double best = 0.0;
        for (const auto& c : cells) {
            if (c.category != cat) continue;
            if (!any || c.similarity > best) best = c.similarity;
            any = true;
        }
        if (any) {
            sum += best;
            ++n_categories;
        }
    }
    return sum / n_categories;
}

std::optional<double> summarize_avg(const std::vector<ScoreCell>& cells) {
    if (cells.empty()) return std::nullopt;
    check_same_keys(cells);
    double sum = 0.0;
    int n_categories = 0;
    for (PosTag cat : {PosTag::Verb, PosTag::Adj, PosTag::Noun}) {
        // Mean over symptom words per text word, then the best text word wins.
        std::map<std::string, std::pair<double, size_t>> acc;
        for (const auto& c : cells)
            if (c.category == cat) {
                auto& slot = acc[c.text_word];
                slot.first += c.similarity;
                slot.second += 1;
            }
        if (acc.empty()) continue;
        bool any = false;
        double best = 0.0;
        for (const auto& [word, slot] : acc) {
            double mean = slot.first / static_cast<double>(slot.second);
            if (!any || mean > best) best = mean;
            any = true;
        }
        sum += best;
        ++n_categories;
    }
    if (n_categories == 0) return std::nullopt;
    return sum / n_categories;
}

Summarizer parse_summarizer(std::string_view s) {
    if (s == "max") return Summarizer::Max;
    if (s == "avg") return Summarizer::Avg;
    throw ConfigError("summarizer must be 'max' or 'avg'");
}

SentenceRanking build_ranking(const std::map<std::string, double>& scores, int symptom_id,
                              size_t limit) {
    for (const auto& [id, score] : scores)
        if (!std::isfinite(score))
            throw ConfigError("non-finite score for sentence '" + id + "'");
    SentenceRanking r;
    r.symptom_id = symptom_id;
    r.entries.assign(scores.begin(), scores.end());
    std::sort(r.entries.begin(), r.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (r.entries.size() > limit) r.entries.resize(limit);
    return r;
}

namespace {

std::optional<double> score_one(const SentenceInput& sentence, const SymptomSpec& symptom,
                                const EmbeddingProvider& provider, Summarizer summarizer) {
    std::vector<ScoreCell> cells = score_table(sentence.id, sentence.words, symptom, provider);
    return summarizer == Summarizer::Max ? summarize_max(cells) : summarize_avg(cells);
}

ScoresBySymptom compact(std::vector<std::vector<std::optional<double>>>& grid,
                        std::span<const SentenceInput> sentences,
                        std::span<const SymptomSpec> symptoms) {
    ScoresBySymptom out(symptoms.size());
    for (size_t s = 0; s < symptoms.size(); ++s) {
        out[s].reserve(sentences.size());
        for (size_t i = 0; i < sentences.size(); ++i)
            if (grid[s][i]) out[s].emplace_back(sentences[i].id, *grid[s][i]);
    }
    return out;
}

}  // namespace

ScoresBySymptom score_sentences_serial(std::span<const SentenceInput> sentences,
                                       std::span<const SymptomSpec> symptoms,
                                       const EmbeddingProvider& provider, Summarizer summarizer) {
    std::vector<std::vector<std::optional<double>>> grid(
        symptoms.size(), std::vector<std::optional<double>>(sentences.size()));
    for (size_t i = 0; i < sentences.size(); ++i)
        for (size_t s = 0; s < symptoms.size(); ++s)
            grid[s][i] = score_one(sentences[i], symptoms[s], provider, summarizer);
    return compact(grid, sentences, symptoms);
}

ScoresBySymptom score_sentences(std::span<const SentenceInput> sentences,
                                std::span<const SymptomSpec> symptoms,
                                const EmbeddingProvider& provider, Summarizer summarizer) {
    std::vector<std::vector<std::optional<double>>> grid(
        symptoms.size(), std::vector<std::optional<double>>(sentences.size()));
    std::exception_ptr error;
    const int64_t n = static_cast<int64_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < n; ++i) {
        try {
            for (size_t s = 0; s < symptoms.size(); ++s)
                grid[s][static_cast<size_t>(i)] =
                    score_one(sentences[static_cast<size_t>(i)], symptoms[s], provider, summarizer);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return compact(grid, sentences, symptoms);
}

QrelScheme parse_qrel_scheme(std::string_view s) {
    if (s == "majority") return QrelScheme::Majority;
    if (s == "unanimity") return QrelScheme::Unanimity;
    throw ConfigError("qrel scheme must be 'majority' or 'unanimity'");
}

std::set<std::string> Qrels::relevant_for(int symptom_id) const {
    std::set<std::string> out;
    for (const auto& [sid, sentence] : relevant)
        if (sid == symptom_id) out.insert(sentence);
    return out;
}

Qrels load_qrels(const std::string& path, QrelScheme scheme) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open qrels file '" + path + "'");
    Qrels q;
    q.scheme = scheme;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        int symptom_id = -1;
        std::string sentence_id;
        int rel = -1;
        if (!(ss >> symptom_id >> sentence_id >> rel) || (rel != 0 && rel != 1))
            throw DataError(
                strfmt("%s:%zu: expected symptom_id<TAB>sentence_id<TAB>0|1", path.c_str(), line_no));
        if (rel == 1) q.relevant.insert({symptom_id, sentence_id});
    }
    return q;
}

bool qrels_nested(const Qrels& majority, const Qrels& unanimity) {
    return std::includes(majority.relevant.begin(), majority.relevant.end(),
                         unanimity.relevant.begin(), unanimity.relevant.end());
}

RankingEvalReport evaluate_run(const std::vector<SentenceRanking>& rankings, const Qrels& q,
                               std::vector<int> expected_ids) {
    if (expected_ids.empty())
        for (int i = 0; i <= 20; ++i) expected_ids.push_back(i);
    std::map<int, const SentenceRanking*> by_id;
    for (const auto& r : rankings) by_id[r.symptom_id] = &r;
    RankingEvalReport report;
    for (int id : expected_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ConfigError(strfmt("missing ranking for symptom %d", id));
        std::vector<std::string> ranked;
        ranked.reserve(it->second->entries.size());
        for (const auto& [sid, score] : it->second->entries) ranked.push_back(sid);
        std::set<std::string> relevant = q.relevant_for(id);
        SymptomEvalRow row;
        row.symptom_id = id;
        row.ap = average_precision(ranked, relevant);
        row.r_prec = r_precision(ranked, relevant);
        row.p_at_10 = precision_at_k(ranked, relevant, 10);
        row.ndcg_at_1000 = ndcg_at_k(ranked, relevant, 1000);
        report.per_symptom.push_back(row);
    }
    report.macro.symptom_id = -1;
    for (const auto& row : report.per_symptom) {
        report.macro.ap += row.ap;
        report.macro.r_prec += row.r_prec;
        report.macro.p_at_10 += row.p_at_10;
        report.macro.ndcg_at_1000 += row.ndcg_at_1000;
    }
    const double n = static_cast<double>(report.per_symptom.size());
    report.macro.ap /= n;
    report.macro.r_prec /= n;
    report.macro.p_at_10 /= n;
    report.macro.ndcg_at_1000 /= n;
    return report;
}

void save_ranking(const SentenceRanking& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write ranking file '" + path + "'");
    for (size_t i = 0; i < r.entries.size(); ++i)
        out << (i + 1) << "\t" << r.entries[i].first << "\t"
            << strfmt("%.17g", r.entries[i].second) << "\n";
    if (!out) throw DataError("write failed for '" + path + "'");
}

SentenceRanking load_ranking(const std::string& path, int symptom_id) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ranking file '" + path + "'");
    SentenceRanking r;
    r.symptom_id = symptom_id;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        size_t rank = 0;
        std::string id;
        double score = 0.0;
        if (!(ss >> rank >> id >> score))
            throw DataError(strfmt("%s:%zu: expected rank<TAB>id<TAB>score", path.c_str(), line_no));
        r.entries.emplace_back(id, score);
    }
    return r;
}

}  // namespace earlyrisk
