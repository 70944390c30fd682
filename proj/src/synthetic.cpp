#include "earlyrisk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace earlyrisk {

namespace {

const char* kBenignWords[] = {
    "morning", "coffee",  "walk",    "game",   "music",  "friend", "work",    "lunch",
    "movie",   "book",    "weather", "garden", "dinner", "train",  "weekend", "photo",
    "recipe",  "bike",    "park",    "family", "show",   "trip",   "team",    "project",
    "news",    "street",  "river",   "cat",    "dog",    "house",  "plan",    "idea",
};

}  // namespace

void SyntheticSpec::validate() const {
    if (n_users < 1) throw ConfigError("n_users must be >= 1");
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0))
        throw ConfigError("positive_fraction must be in (0,1)");
    if (min_posts < 1 || max_posts < min_posts) throw ConfigError("bad posts-per-user range");
    if (min_words < 1 || max_words < min_words) throw ConfigError("bad words-per-post range");
    if (!(injection_rate > 0.0 && injection_rate <= 1.0))
        throw ConfigError("injection_rate must be in (0,1]");
    if (!(signal_density > 0.0 && signal_density <= 1.0))
        throw ConfigError("signal_density must be in (0,1]");
    if (signal_words.empty()) throw ConfigError("signal lexicon must not be empty");
}

Corpus make_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const std::set<std::string> signal_set(spec.signal_words.begin(), spec.signal_words.end());
    std::vector<std::string> benign;
    for (const char* w : kBenignWords)
        if (!signal_set.count(w)) benign.push_back(w);

    const size_t n_pos =
        static_cast<size_t>(std::llround(spec.positive_fraction * static_cast<double>(spec.n_users)));
    std::vector<size_t> order(spec.n_users);
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> positive(spec.n_users, false);
    for (size_t i = 0; i < n_pos; ++i) positive[order[i]] = true;

    std::uniform_int_distribution<int> posts_dist(spec.min_posts, spec.max_posts);
    std::uniform_int_distribution<int> words_dist(spec.min_words, spec.max_words);
    std::uniform_int_distribution<size_t> benign_dist(0, benign.size() - 1);
    std::uniform_int_distribution<size_t> signal_dist(0, spec.signal_words.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Corpus c;
    c.name = spec.name;
    const int64_t base_epoch_ms = parse_timestamp_ms("2021-01-01T00:00:00Z");
    int width = spec.n_users >= 1000 ? 5 : 4;
    for (size_t i = 0; i < spec.n_users; ++i) {
        UserHistory u;
        u.nick = strfmt("subject%0*zu", width, i + 1);
        u.label = positive[i] ? Label::Positive : Label::Negative;
        const int n_posts = posts_dist(rng);
        for (int p = 0; p < n_posts; ++p) {
            Post post;
            post.author = u.nick;
            post.epoch_ms = base_epoch_ms + static_cast<int64_t>(p) * 3600000;
            post.timestamp = format_timestamp_ms(post.epoch_ms);
            const int n_words = words_dist(rng);
            std::vector<std::string> words;
            words.reserve(static_cast<size_t>(n_words));
            for (int w = 0; w < n_words; ++w) words.push_back(benign[benign_dist(rng)]);
            if (positive[i] && unit(rng) < spec.injection_rate) {
                const int n_signal = std::max(
                    1, static_cast<int>(std::lround(spec.signal_density * n_words)));
                for (int s = 0; s < n_signal; ++s)
                    words[static_cast<size_t>(s) % words.size()] =
                        spec.signal_words[signal_dist(rng)];
            }
            post.content = join_tokens(words);
            u.posts.push_back(std::move(post));
        }
        c.gold[u.nick] = *u.label;
        c.users.push_back(std::move(u));
    }
    return c;
}

}  // namespace earlyrisk
