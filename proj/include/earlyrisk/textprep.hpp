#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "earlyrisk/common.hpp"
#include "earlyrisk/corpus.hpp"

namespace earlyrisk {

struct NormalizationConfig {
    bool lowercase = true;
    std::string url_token = "weblink";
    std::string number_token = "number";
    bool collapse_repeats = true;
    // Replacement text should itself be normalized (lowercase, no map keys inside).
    std::vector<std::pair<std::string, std::string>> emoji_map;

    void validate() const;
};

struct SentimentLexicon {
    std::map<std::string, double> entries;  // token -> signed valence

    double valence(const std::string& token) const;
};

enum class PosTag { Verb, Adj, Noun, Other };

PosTag parse_pos_tag(std::string_view s);

struct PosLexicon {
    std::map<std::string, std::vector<PosTag>> entries;  // first tag = priority tag
    std::set<std::string> stopwords;
};

struct PosWords {
    std::vector<std::string> verbs;
    std::vector<std::string> adjectives;
    std::vector<std::string> nouns;

    bool empty() const { return verbs.empty() && adjectives.empty() && nouns.empty(); }
};

// Lowercases, decodes HTML entities and \uXXXX escapes, maps emoji, replaces
// URL-shaped tokens with cfg.url_token and numeric tokens with cfg.number_token,
// collapses consecutive duplicate tokens, and normalizes whitespace. Idempotent.
std::string normalize(std::string_view text, const NormalizationConfig& cfg = {});

// Sum of |valence| over negative-valence tokens divided by max(1, token count).
double negativity_score(std::string_view normalized_text, const SentimentLexicon& lex);

std::vector<std::pair<std::string, std::string>> filter_negative(
    const std::vector<std::pair<std::string, std::string>>& sentences,
    const SentimentLexicon& lex, const NormalizationConfig& cfg = {});

// Buckets tokens by their priority tag. Stopwords are dropped unless listed in
// symptom_words; tokens missing from the lexicon count as Other and are dropped.
PosWords pos_extract(std::string_view normalized_text, const PosLexicon& pl,
                     const std::set<std::string>& symptom_words = {});

// Posts whose normalized content scores negativity > 0, chronological order.
std::vector<Post> select_negative_posts(const UserHistory& u, const SentimentLexicon& lex,
                                        const NormalizationConfig& cfg = {});

std::string truncate_tokens(std::string_view text, size_t budget = 512);

// TSV token<TAB>valence, extra columns ignored (VADER-style lexicon files load as-is).
SentimentLexicon load_sentiment_lexicon(const std::string& path);
// TSV token<TAB>TAG[,TAG...]; tags VERB, ADJ, NOUN, OTHER.
PosLexicon load_pos_lexicon(const std::string& path, const std::string& stopwords_path = "");
// One emoji<TAB>replacement per line.
std::vector<std::pair<std::string, std::string>> load_emoji_map(const std::string& path);

}  // namespace earlyrisk
