#include "earlyrisk/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

std::string label_name(Label l) {
    return l == Label::Positive ? "positive" : "negative";
}

Label parse_label(std::string_view s) {
    if (s == "positive") return Label::Positive;
    if (s == "negative") return Label::Negative;
    throw DataError(strfmt("unknown label '%.*s'", static_cast<int>(s.size()), s.data()));
}

std::string post_text(const Post& p) {
    if (p.title.empty()) return p.content;
    if (p.content.empty()) return p.title;
    return p.title + " " + p.content;
}

namespace {

// Days since 1970-01-01 for a civil date (Gregorian, proleptic).
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

int64_t parse_timestamp_ms(const std::string& iso) {
    // YYYY-MM-DDTHH:MM:SS[.fff][Z|+hh:mm|-hh:mm]
    if (iso.size() < 19 || iso[4] != '-' || iso[7] != '-' ||
        (iso[10] != 'T' && iso[10] != ' ') || iso[13] != ':' || iso[16] != ':')
        throw DataError("unparseable timestamp '" + iso + "'");
    auto num = [&](size_t pos, size_t len) {
        std::string_view sv(iso.data() + pos, len);
        if (!all_digits(sv)) throw DataError("unparseable timestamp '" + iso + "'");
        int v = 0;
        for (char c : sv) v = v * 10 + (c - '0');
        return v;
    };
    int year = num(0, 4), month = num(5, 2), day = num(8, 2);
    int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        throw DataError("unparseable timestamp '" + iso + "'");
    size_t i = 19;
    int millis = 0;
    if (i < iso.size() && iso[i] == '.') {
        size_t start = ++i;
        while (i < iso.size() && iso[i] >= '0' && iso[i] <= '9') ++i;
        if (i == start) throw DataError("unparseable timestamp '" + iso + "'");
        std::string frac = iso.substr(start, std::min<size_t>(3, i - start));
        while (frac.size() < 3) frac.push_back('0');
        millis = std::stoi(frac);
    }
    int offset_min = 0;
    if (i < iso.size()) {
        if (iso[i] == 'Z' && i + 1 == iso.size()) {
            // UTC
        } else if ((iso[i] == '+' || iso[i] == '-') && i + 6 == iso.size() && iso[i + 3] == ':') {
            int sign = iso[i] == '+' ? 1 : -1;
            int oh = num(i + 1, 2), om = num(i + 4, 2);
            offset_min = sign * (oh * 60 + om);
        } else {
            throw DataError("unparseable timestamp '" + iso + "'");
        }
    }
    int64_t days = days_from_civil(year, month, day);
    int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_min * 60;
    return secs * 1000 + millis;
}

std::string format_timestamp_ms(int64_t epoch_ms) {
    int64_t secs = epoch_ms / 1000;
    if (epoch_ms < 0 && epoch_ms % 1000 != 0) --secs;
    int64_t days = secs / 86400;
    int64_t rem = secs - days * 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    return strfmt("%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
}

const UserHistory* Corpus::find_user(const std::string& nick) const {
    for (const auto& u : users)
        if (u.nick == nick) return &u;
    return nullptr;
}

namespace {

Post parse_post(const json& jp, const std::string& nick, size_t line_no) {
    Post p;
    p.author = nick;
    if (!jp.contains("timestamp") || !jp["timestamp"].is_string())
        throw DataError(strfmt("line %zu: post without timestamp", line_no));
    p.timestamp = jp["timestamp"].get<std::string>();
    p.epoch_ms = parse_timestamp_ms(p.timestamp);
    if (jp.contains("title") && !jp["title"].is_null()) p.title = jp["title"].get<std::string>();
    if (jp.contains("content") && !jp["content"].is_null())
        p.content = jp["content"].get<std::string>();
    if (!jp.contains("title") && !jp.contains("content"))
        throw DataError(strfmt("line %zu: post without title or content", line_no));
    return p;
}

void sort_posts(UserHistory& u) {
    std::stable_sort(u.posts.begin(), u.posts.end(),
                     [](const Post& a, const Post& b) { return a.epoch_ms < b.epoch_ms; });
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file '" + path + "'");
    Corpus c;
    c.name = path;
    std::string line;
    size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(strfmt("line %zu: malformed JSON: %s", line_no, e.what()));
        }
        if (!j.is_object() || !j.contains("nick") || !j["nick"].is_string())
            throw DataError(strfmt("line %zu: expected object with 'nick'", line_no));
        UserHistory u;
        u.nick = j["nick"].get<std::string>();
        if (!seen.insert(u.nick).second)
            throw DataError(strfmt("line %zu: duplicate nick '%s'", line_no, u.nick.c_str()));
        if (j.contains("label") && !j["label"].is_null())
            u.label = parse_label(j["label"].get<std::string>());
        if (!j.contains("posts") || !j["posts"].is_array() || j["posts"].empty())
            throw DataError(strfmt("line %zu: user '%s' has no posts", line_no, u.nick.c_str()));
        for (const auto& jp : j["posts"]) u.posts.push_back(parse_post(jp, u.nick, line_no));
        sort_posts(u);
        if (u.label) c.gold[u.nick] = *u.label;
        c.users.push_back(std::move(u));
    }
    return c;
}

void save_corpus(const Corpus& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write corpus file '" + path + "'");
    for (const auto& u : c.users) {
        ordered_json j;
        j["nick"] = u.nick;
        if (u.label)
            j["label"] = label_name(*u.label);
        else
            j["label"] = nullptr;
        ordered_json posts = ordered_json::array();
        for (const auto& p : u.posts) {
            ordered_json jp;
            jp["timestamp"] = p.timestamp;
            jp["title"] = p.title;
            jp["content"] = p.content;
            posts.push_back(std::move(jp));
        }
        j["posts"] = std::move(posts);
        out << j.dump() << "\n";
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

CorpusStats corpus_stats(const Corpus& c) {
    if (c.users.empty()) throw ConfigError("corpus_stats on empty corpus");
    CorpusStats s;
    s.n_users = c.users.size();
    std::vector<double> per_user;
    std::vector<double> per_post;
    for (const auto& u : c.users) {
        if (u.label == Label::Positive) ++s.n_pos;
        if (u.label == Label::Negative) ++s.n_neg;
        s.n_posts += u.posts.size();
        per_user.push_back(static_cast<double>(u.posts.size()));
        for (const auto& p : u.posts)
            per_post.push_back(static_cast<double>(count_tokens(post_text(p))));
    }
    auto dist = [](std::vector<double>& v) {
        DistStats d;
        d.median = median(v);
        d.min = *std::min_element(v.begin(), v.end());
        d.max = *std::max_element(v.begin(), v.end());
        return d;
    };
    s.posts_per_user = dist(per_user);
    s.words_per_post = dist(per_post);
    return s;
}

Corpus merge_corpora(const std::vector<Corpus>& cs, const std::string& name, MergePolicy policy) {
    if (cs.empty()) throw ConfigError("merge_corpora on empty corpus list");
    Corpus out;
    out.name = name;
    std::set<std::string> seen;
    std::vector<std::string> collisions;
    for (const auto& c : cs) {
        for (auto u : c.users) {
            if (policy == MergePolicy::PrefixWithCorpusName) {
                u.nick = c.name + ":" + u.nick;
                for (auto& p : u.posts) p.author = u.nick;
            }
            if (!seen.insert(u.nick).second) {
                collisions.push_back(u.nick);
                continue;
            }
            if (u.label) out.gold[u.nick] = *u.label;
            out.users.push_back(std::move(u));
        }
    }
    if (!collisions.empty()) {
        std::string msg = "nick collision during merge:";
        for (const auto& n : collisions) msg += " '" + n + "'";
        throw DataError(msg);
    }
    return out;
}

std::pair<Corpus, Corpus> split_train_valid(const Corpus& c, double ratio, uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
    std::vector<size_t> pos_idx, neg_idx;
    for (size_t i = 0; i < c.users.size(); ++i) {
        if (!c.users[i].label)
            throw ConfigError("split_train_valid requires all users labeled; '" +
                              c.users[i].nick + "' is not");
        (c.users[i].label == Label::Positive ? pos_idx : neg_idx).push_back(i);
    }
    std::mt19937_64 rng(seed);
    Corpus train, valid;
    train.name = c.name + ":train";
    valid.name = c.name + ":valid";
    auto assign = [&](std::vector<size_t>& idx) {
        std::shuffle(idx.begin(), idx.end(), rng);
        size_t n_train = static_cast<size_t>(std::llround(ratio * static_cast<double>(idx.size())));
        for (size_t i = 0; i < idx.size(); ++i) {
            const UserHistory& u = c.users[idx[i]];
            Corpus& dst = i < n_train ? train : valid;
            dst.users.push_back(u);
            if (u.label) dst.gold[u.nick] = *u.label;
        }
    };
    assign(pos_idx);
    assign(neg_idx);
    auto by_nick = [](const UserHistory& a, const UserHistory& b) { return a.nick < b.nick; };
    std::sort(train.users.begin(), train.users.end(), by_nick);
    std::sort(valid.users.begin(), valid.users.end(), by_nick);
    return {std::move(train), std::move(valid)};
}

}  // namespace earlyrisk
