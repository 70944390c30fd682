#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "earlyrisk/corpus.hpp"

namespace test_util {

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        for (int i = 0; i < 64; ++i) {
            auto candidate = base / ("earlyrisk_test_" + std::to_string(rng()));
            if (std::filesystem::create_directory(candidate)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string dir() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline earlyrisk::Post make_post(const std::string& author, const std::string& ts,
                                 const std::string& content, const std::string& title = "") {
    earlyrisk::Post p;
    p.author = author;
    p.timestamp = ts;
    p.epoch_ms = earlyrisk::parse_timestamp_ms(ts);
    p.title = title;
    p.content = content;
    return p;
}

inline earlyrisk::UserHistory make_user(const std::string& nick,
                                        std::optional<earlyrisk::Label> label,
                                        const std::vector<std::string>& contents) {
    earlyrisk::UserHistory u;
    u.nick = nick;
    u.label = label;
    int hour = 0;
    for (const auto& c : contents) {
        u.posts.push_back(make_post(
            nick, earlyrisk::strfmt("2021-01-01T%02d:00:00Z", hour++ % 24), c));
    }
    return u;
}

inline earlyrisk::Corpus make_corpus(const std::string& name,
                                     const std::vector<earlyrisk::UserHistory>& users) {
    earlyrisk::Corpus c;
    c.name = name;
    c.users = users;
    for (const auto& u : users)
        if (u.label) c.gold[u.nick] = *u.label;
    return c;
}

}  // namespace test_util
