#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "earlyrisk/corpus.hpp"

namespace earlyrisk {

// Desk-scale corpus generator: labeled users with benign chatter, positive
// users salted with signal-lexicon tokens at the injection rate.
struct SyntheticSpec {
    std::string name = "synthetic";
    size_t n_users = 100;
    double positive_fraction = 0.1;
    int min_posts = 10;
    int max_posts = 30;
    int min_words = 6;
    int max_words = 14;
    std::vector<std::string> signal_words{"casino", "bet", "jackpot", "roulette", "wager"};
    double injection_rate = 1.0;  // probability a positive user's post carries signal
    double signal_density = 0.35;  // fraction of tokens replaced when it does
    uint64_t seed = 0;

    void validate() const;
};

Corpus make_synthetic(const SyntheticSpec& spec);

}  // namespace earlyrisk
