#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "earlyrisk/common.hpp"
#include "earlyrisk/embedding.hpp"
#include "earlyrisk/textprep.hpp"

namespace earlyrisk {

struct SymptomSpec {
    int id = 0;
    std::string name;
    std::vector<std::string> verbs;
    std::vector<std::string> adjectives;
    std::vector<std::string> nouns;

    // Union of the three lists; feeds the stopword exception in pos_extract.
    std::set<std::string> word_set() const;
};

// JSON array of {"id":0,"name":"...","verbs":[...],"adjectives":[...],"nouns":[...]}
std::vector<SymptomSpec> load_symptoms(const std::string& path);

struct ScoreCell {
    std::string sentence_id;
    int symptom_id = 0;
    PosTag category = PosTag::Other;
    std::string text_word;
    std::string symptom_word;
    double similarity = 0.0;
};

// One cell per (text word, symptom word) pair within the same category.
std::vector<ScoreCell> score_table(const std::string& sentence_id, const PosWords& words,
                                   const SymptomSpec& symptom, const EmbeddingProvider& provider);

// Per category take the maximum similarity; average over non-empty categories.
// Empty table -> nullopt (sentence excluded from the ranking).
std::optional<double> summarize_max(const std::vector<ScoreCell>& cells);

// Per category, mean similarity per text word, keep the best word; average the
// per-category bests over non-empty categories.
std::optional<double> summarize_avg(const std::vector<ScoreCell>& cells);

enum class Summarizer { Max, Avg };

Summarizer parse_summarizer(std::string_view s);

struct SentenceRanking {
    int symptom_id = 0;
    std::vector<std::pair<std::string, double>> entries;  // score descending, id ascending on ties
};

SentenceRanking build_ranking(const std::map<std::string, double>& scores, int symptom_id,
                              size_t limit = 1000);

struct SentenceInput {
    std::string id;
    PosWords words;
};

// Summarized score of every sentence against every symptom, in input order.
// Sentences with no cells for a symptom are skipped for that symptom.
// One slot per symptom, ordered as `symptoms`.
using ScoresBySymptom = std::vector<std::vector<std::pair<std::string, double>>>;

// Serial reference implementation.
ScoresBySymptom score_sentences_serial(std::span<const SentenceInput> sentences,
                                       std::span<const SymptomSpec> symptoms,
                                       const EmbeddingProvider& provider, Summarizer summarizer);

// OpenMP-parallel over sentences; bit-identical to the serial reference.
ScoresBySymptom score_sentences(std::span<const SentenceInput> sentences,
                                std::span<const SymptomSpec> symptoms,
                                const EmbeddingProvider& provider, Summarizer summarizer);

enum class QrelScheme { Majority, Unanimity };

QrelScheme parse_qrel_scheme(std::string_view s);

struct Qrels {
    QrelScheme scheme = QrelScheme::Majority;
    std::set<std::pair<int, std::string>> relevant;

    std::set<std::string> relevant_for(int symptom_id) const;
};

// Lines: symptom_id<TAB>sentence_id<TAB>0|1
Qrels load_qrels(const std::string& path, QrelScheme scheme);

// Checks the assessment invariant: every unanimity pair is also a majority pair.
bool qrels_nested(const Qrels& majority, const Qrels& unanimity);

struct SymptomEvalRow {
    int symptom_id = 0;
    double ap = 0.0;
    double r_prec = 0.0;
    double p_at_10 = 0.0;
    double ndcg_at_1000 = 0.0;
};

struct RankingEvalReport {
    std::vector<SymptomEvalRow> per_symptom;
    SymptomEvalRow macro;  // unweighted mean over symptoms; symptom_id = -1
};

// Requires one ranking per expected symptom id (default 0..20).
RankingEvalReport evaluate_run(const std::vector<SentenceRanking>& rankings, const Qrels& q,
                               std::vector<int> expected_ids = {});

// Per-symptom run files: rank<TAB>sentence_id<TAB>score
void save_ranking(const SentenceRanking& r, const std::string& path);
SentenceRanking load_ranking(const std::string& path, int symptom_id);

}  // namespace earlyrisk
