#include "earlyrisk/risk_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double WordConfidenceModel::score(std::string_view normalized_text) const {
    return score_document(*this, normalized_text);
}

double score_document(const WordConfidenceModel& m, std::string_view normalized_text) {
    std::vector<std::string> tokens = tokenize(normalized_text);
    if (tokens.empty()) return 0.5;
    double sum = 0.0;
    for (const auto& tok : tokens) {
        auto it = m.weights.find(tok);
        if (it != m.weights.end()) sum += it->second;
    }
    return logistic(sum / static_cast<double>(tokens.size()));
}

std::string user_document(const UserHistory& u, const SentimentLexicon* lex,
                          const NormalizationConfig& cfg, std::optional<size_t> token_budget) {
    std::vector<Post> posts = lex ? select_negative_posts(u, *lex, cfg) : u.posts;
    std::string doc;
    for (const auto& p : posts) {
        std::string text = normalize(post_text(p), cfg);
        if (text.empty()) continue;
        if (!doc.empty()) doc.push_back(' ');
        doc += text;
    }
    if (token_budget) return truncate_tokens(doc, *token_budget);
    return doc;
}

WordConfidenceModel train_word_confidence(const Corpus& train, double alpha,
                                          const SentimentLexicon* lex,
                                          const NormalizationConfig& cfg) {
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    std::map<std::string, std::pair<size_t, size_t>> counts;  // token -> (pos, neg)
    size_t n_pos_tokens = 0, n_neg_tokens = 0;
    size_t n_pos_users = 0, n_neg_users = 0;
    for (const auto& u : train.users) {
        if (!u.label) continue;
        const bool positive = *u.label == Label::Positive;
        (positive ? n_pos_users : n_neg_users) += 1;
        std::string doc = user_document(u, lex, cfg);
        for (const auto& tok : tokenize(doc)) {
            auto& slot = counts[tok];
            if (positive) {
                ++slot.first;
                ++n_pos_tokens;
            } else {
                ++slot.second;
                ++n_neg_tokens;
            }
        }
    }
    if (n_pos_users == 0 || n_neg_users == 0)
        throw ConfigError("training requires at least one positive and one negative user");
    WordConfidenceModel m;
    m.alpha = alpha;
    m.n_pos_tokens = n_pos_tokens;
    m.n_neg_tokens = n_neg_tokens;
    m.vocab_size = counts.size();
    const double v = static_cast<double>(m.vocab_size);
    for (const auto& [tok, c] : counts) {
        double p_pos = (static_cast<double>(c.first) + alpha) /
                       (static_cast<double>(n_pos_tokens) + alpha * v);
        double p_neg = (static_cast<double>(c.second) + alpha) /
                       (static_cast<double>(n_neg_tokens) + alpha * v);
        m.weights[tok] = std::log(p_pos / p_neg);
    }
    return m;
}

std::vector<std::string> top_confidence_words(const WordConfidenceModel& m, size_t k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    std::vector<std::pair<std::string, double>> items(m.weights.begin(), m.weights.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (items.size() > k) items.resize(k);
    std::vector<std::string> out;
    out.reserve(items.size());
    for (auto& [tok, w] : items) out.push_back(std::move(tok));
    return out;
}

void save_model(const WordConfidenceModel& m, const std::string& path) {
    ordered_json j;
    j["alpha"] = m.alpha;
    j["vocab_size"] = m.vocab_size;
    j["n_pos_tokens"] = m.n_pos_tokens;
    j["n_neg_tokens"] = m.n_neg_tokens;
    j["weights"] = m.weights;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw DataError("write failed for '" + path + "'");
}

WordConfidenceModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(strfmt("%s: malformed JSON: %s", path.c_str(), e.what()));
    }
    WordConfidenceModel m;
    m.alpha = j.at("alpha").get<double>();
    m.vocab_size = j.at("vocab_size").get<size_t>();
    m.n_pos_tokens = j.at("n_pos_tokens").get<size_t>();
    m.n_neg_tokens = j.at("n_neg_tokens").get<size_t>();
    m.weights = j.at("weights").get<std::map<std::string, double>>();
    for (const auto& [tok, w] : m.weights)
        if (!std::isfinite(w))
            throw DataError(strfmt("%s: non-finite weight for '%s'", path.c_str(), tok.c_str()));
    if (m.vocab_size < m.weights.size())
        throw DataError(path + ": vocab_size smaller than the weight table");
    return m;
}

size_t select_best_model(const std::vector<const RiskScorer*>& candidates, const Corpus& valid,
                         const SentimentLexicon* lex, const NormalizationConfig& cfg,
                         size_t token_budget) {
    if (candidates.empty()) throw ConfigError("no candidate scorers");
    std::vector<std::pair<std::string, bool>> docs;  // (document, gold positive)
    for (const auto& u : valid.users) {
        if (!u.label) throw ConfigError("validation user '" + u.nick + "' is unlabeled");
        docs.emplace_back(user_document(u, lex, cfg, token_budget), *u.label == Label::Positive);
    }
    size_t best_idx = 0;
    double best_f1 = -1.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        size_t tp = 0, fp = 0, fn = 0;
        for (const auto& [doc, gold_pos] : docs) {
            bool pred = candidates[i]->score(doc) > 0.5;
            if (pred && gold_pos) ++tp;
            if (pred && !gold_pos) ++fp;
            if (!pred && gold_pos) ++fn;
        }
        double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        double f1 = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
        if (f1 > best_f1) {
            best_f1 = f1;
            best_idx = i;
        }
    }
    return best_idx;
}

void export_extended_vocab(const std::vector<std::string>& words, const std::string& path) {
    if (words.empty()) throw ConfigError("refusing to export an empty vocabulary");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vocabulary file '" + path + "'");
    for (const auto& w : words) out << w << "\n";
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<std::string> load_extended_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file '" + path + "'");
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) words.push_back(line);
    return words;
}

ExternalScorerEndpoint parse_endpoint(const std::string& spec, double timeout_s) {
    ExternalScorerEndpoint e;
    e.timeout_s = timeout_s;
    if (spec.rfind("stdio:", 0) == 0) {
        e.transport = ScorerTransport::Stdio;
        e.address = spec.substr(6);
    } else if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
        e.transport = ScorerTransport::Http;
        e.address = spec;
    } else {
        throw ConfigError("external scorer spec must be 'stdio:<command>' or an http URL");
    }
    if (e.address.empty()) throw ConfigError("empty external scorer address");
    if (e.timeout_s <= 0.0) throw ConfigError("external scorer timeout must be positive");
    return e;
}

}  // namespace earlyrisk
