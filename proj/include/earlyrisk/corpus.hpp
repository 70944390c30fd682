#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "earlyrisk/common.hpp"

namespace earlyrisk {

enum class Label { Positive, Negative };

std::string label_name(Label l);
Label parse_label(std::string_view s);

struct Post {
    std::string author;
    std::string timestamp;  // ISO-8601 as loaded
    int64_t epoch_ms = 0;   // parsed from timestamp, used for ordering
    std::string title;
    std::string content;
};

// Title and content joined with one space; empty parts skipped.
std::string post_text(const Post& p);

// Accepts YYYY-MM-DDTHH:MM:SS with optional fractional seconds and
// 'Z' or +hh:mm offset. Throws DataError otherwise.
int64_t parse_timestamp_ms(const std::string& iso);
std::string format_timestamp_ms(int64_t epoch_ms);

struct UserHistory {
    std::string nick;
    std::optional<Label> label;
    std::vector<Post> posts;  // ascending by timestamp
};

struct Corpus {
    std::string name;
    std::vector<UserHistory> users;
    std::map<std::string, Label> gold;

    const UserHistory* find_user(const std::string& nick) const;
};

struct DistStats {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct CorpusStats {
    size_t n_users = 0;
    size_t n_pos = 0;
    size_t n_neg = 0;
    size_t n_posts = 0;
    DistStats posts_per_user;
    DistStats words_per_post;
};

// JSONL, one user object per line:
// {"nick":"...","label":"positive"|"negative"|null,"posts":[{"timestamp":...,"title":...,"content":...}]}
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& c, const std::string& path);

CorpusStats corpus_stats(const Corpus& c);

enum class MergePolicy { ErrorOnCollision, PrefixWithCorpusName };

Corpus merge_corpora(const std::vector<Corpus>& cs, const std::string& name,
                     MergePolicy policy = MergePolicy::ErrorOnCollision);

// Stratified per-label split; |train| = round(ratio * n) per class.
// Deterministic for a fixed seed, positives drawn first.
std::pair<Corpus, Corpus> split_train_valid(const Corpus& c, double ratio, uint64_t seed);

}  // namespace earlyrisk
