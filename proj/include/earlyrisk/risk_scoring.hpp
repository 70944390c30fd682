#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "earlyrisk/common.hpp"
#include "earlyrisk/corpus.hpp"
#include "earlyrisk/textprep.hpp"

namespace earlyrisk {

// text -> probability of risk. Implementations must be deterministic for a
// fixed model state and safe for concurrent score() calls.
struct RiskScorer {
    virtual ~RiskScorer() = default;
    virtual double score(std::string_view normalized_text) const = 0;
};

// Smoothed log-odds of each token between the positive and negative class.
struct WordConfidenceModel : RiskScorer {
    std::map<std::string, double> weights;  // token -> lambda
    size_t n_pos_tokens = 0;
    size_t n_neg_tokens = 0;
    size_t vocab_size = 0;
    double alpha = 1.0;

    // logistic(mean lambda over tokens); unseen tokens contribute 0.
    double score(std::string_view normalized_text) const override;
};

// One training document per labeled user: the user's negativity-selected posts
// (all posts when lex is null), normalized and concatenated.
// lambda(w) = ln[ (c_pos(w)+a)/(N_pos+aV) / ((c_neg(w)+a)/(N_neg+aV)) ]
WordConfidenceModel train_word_confidence(const Corpus& train, double alpha = 1.0,
                                          const SentimentLexicon* lex = nullptr,
                                          const NormalizationConfig& cfg = {});

double score_document(const WordConfidenceModel& m, std::string_view normalized_text);

// k largest-lambda tokens, descending; equal lambdas ordered by token text.
std::vector<std::string> top_confidence_words(const WordConfidenceModel& m, size_t k = 40);

void save_model(const WordConfidenceModel& m, const std::string& path);
WordConfidenceModel load_model(const std::string& path);

// Each candidate classifies every user's concatenated (negativity-selected,
// truncated) document at threshold 0.5; the best positive-class F1 wins,
// earliest index on ties.
size_t select_best_model(const std::vector<const RiskScorer*>& candidates, const Corpus& valid,
                         const SentimentLexicon* lex = nullptr,
                         const NormalizationConfig& cfg = {}, size_t token_budget = 512);

// The document select_best_model scores; exposed for tests and the CLI.
std::string user_document(const UserHistory& u, const SentimentLexicon* lex,
                          const NormalizationConfig& cfg,
                          std::optional<size_t> token_budget = std::nullopt);

void export_extended_vocab(const std::vector<std::string>& words, const std::string& path);
std::vector<std::string> load_extended_vocab(const std::string& path);

enum class ScorerTransport { Stdio, Http };

struct ExternalScorerEndpoint {
    ScorerTransport transport = ScorerTransport::Stdio;
    std::string address;  // command line for stdio, base URL for http
    double timeout_s = 30.0;
};

// "stdio:<command>" or an http(s) URL.
ExternalScorerEndpoint parse_endpoint(const std::string& spec, double timeout_s = 30.0);

// Scores a batch through an external model host. Requests and responses are
// matched by id; any missing id, malformed line, or out-of-range score throws.
std::vector<std::pair<std::string, double>> external_score(
    const ExternalScorerEndpoint& e, const std::vector<std::pair<std::string, std::string>>& batch);

}  // namespace earlyrisk
