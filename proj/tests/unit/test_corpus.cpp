#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "earlyrisk/corpus.hpp"
#include "test_util.hpp"

using namespace earlyrisk;
using test_util::TempDir;
using test_util::write_file;

TEST_CASE("load_corpus reads a minimal two-line file") {
    TempDir tmp;
    std::string path = tmp.file("c.jsonl");
    write_file(path,
               R"({"nick":"u1","label":"positive","posts":[{"timestamp":"2021-03-01T12:00:00Z","title":"","content":"hello"}]})"
               "\n"
               R"({"nick":"u2","label":null,"posts":[{"timestamp":"2021-03-02T12:00:00Z","title":"t","content":""}]})"
               "\n");
    Corpus c = load_corpus(path);
    CHECK(c.users.size() == 2);
    CHECK(c.gold.size() == 1);
    CHECK(c.gold.at("u1") == Label::Positive);
    CHECK_FALSE(c.users[1].label.has_value());
    CHECK(c.users[0].posts[0].author == "u1");
}

TEST_CASE("load_corpus rejects duplicate nicks naming the nick") {
    TempDir tmp;
    std::string path = tmp.file("c.jsonl");
    std::string line =
        R"({"nick":"userA","posts":[{"timestamp":"2021-03-01T12:00:00Z","content":"x"}]})";
    write_file(path, line + "\n" + line + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("userA"), DataError);
}

TEST_CASE("load_corpus reports the line number of malformed JSON") {
    TempDir tmp;
    std::string path = tmp.file("c.jsonl");
    write_file(path,
               R"({"nick":"u1","posts":[{"timestamp":"2021-03-01T12:00:00Z","content":"x"}]})"
               "\n{broken\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 2"), DataError);
}

TEST_CASE("load_corpus sorts out-of-order posts ascending") {
    TempDir tmp;
    std::string path = tmp.file("c.jsonl");
    write_file(path,
               R"({"nick":"u1","posts":[)"
               R"({"timestamp":"2021-03-05T00:00:00Z","content":"later"},)"
               R"({"timestamp":"2021-03-01T00:00:00Z","content":"earlier"}]})"
               "\n");
    Corpus c = load_corpus(path);
    REQUIRE(c.users[0].posts.size() == 2);
    CHECK(c.users[0].posts[0].content == "earlier");
    CHECK(c.users[0].posts[1].content == "later");
}

TEST_CASE("load_corpus rejects unparseable timestamps") {
    TempDir tmp;
    std::string path = tmp.file("c.jsonl");
    write_file(path, R"({"nick":"u1","posts":[{"timestamp":"yesterday","content":"x"}]})" "\n");
    CHECK_THROWS_AS(load_corpus(path), DataError);
}

TEST_CASE("timestamps parse offsets and fractional seconds") {
    CHECK(parse_timestamp_ms("2021-03-01T12:00:00Z") ==
          parse_timestamp_ms("2021-03-01T13:00:00+01:00"));
    CHECK(parse_timestamp_ms("2021-03-01T12:00:00.250Z") ==
          parse_timestamp_ms("2021-03-01T12:00:00Z") + 250);
    CHECK(format_timestamp_ms(parse_timestamp_ms("2021-03-01T12:00:00Z")) ==
          "2021-03-01T12:00:00Z");
}

TEST_CASE("corpus_stats counts users, posts, and distributions") {
    auto c = test_util::make_corpus(
        "t", {test_util::make_user("a", Label::Positive, {"one"}),
              test_util::make_user("b", Label::Negative, {"one", "two"}),
              test_util::make_user("c", Label::Negative, {"one", "two", "three"})});
    CorpusStats s = corpus_stats(c);
    CHECK(s.n_users == 3);
    CHECK(s.n_pos == 1);
    CHECK(s.n_neg == 2);
    CHECK(s.n_posts == 6);
    CHECK(s.posts_per_user.median == doctest::Approx(2.0));
    CHECK(s.posts_per_user.min == 1.0);
    CHECK(s.posts_per_user.max == 3.0);
}

TEST_CASE("corpus_stats median of even word counts is the mean of the central pair") {
    auto c = test_util::make_corpus(
        "t", {test_util::make_user("a", Label::Negative,
                                   {"w w w", "w w w w w", "w w w w w w w w w w", "w w"})});
    CorpusStats s = corpus_stats(c);
    CHECK(s.words_per_post.median == doctest::Approx(4.0));
    CHECK(s.words_per_post.min == 2.0);
    CHECK(s.words_per_post.max == 10.0);
}

TEST_CASE("corpus_stats counts words over title plus content") {
    Corpus c;
    c.name = "t";
    UserHistory u;
    u.nick = "a";
    u.posts.push_back(test_util::make_post("a", "2021-01-01T00:00:00Z", "two words", "a title"));
    c.users.push_back(u);
    CorpusStats s = corpus_stats(c);
    CHECK(s.words_per_post.max == 4.0);
}

TEST_CASE("corpus_stats rejects an empty corpus") {
    Corpus c;
    CHECK_THROWS_AS(corpus_stats(c), ConfigError);
}

TEST_CASE("corpus_stats is permutation-invariant") {
    std::vector<UserHistory> users = {
        test_util::make_user("a", Label::Positive, {"x y", "z"}),
        test_util::make_user("b", Label::Negative, {"p q r", "s t", "u"}),
        test_util::make_user("c", Label::Negative, {"m"})};
    CorpusStats base = corpus_stats(test_util::make_corpus("t", users));
    std::mt19937 rng(11);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(users.begin(), users.end(), rng);
        CorpusStats s = corpus_stats(test_util::make_corpus("t", users));
        CHECK(s.n_posts == base.n_posts);
        CHECK(s.posts_per_user.median == base.posts_per_user.median);
        CHECK(s.words_per_post.median == base.words_per_post.median);
    }
}

TEST_CASE("merge_corpora unions users and gold") {
    auto c1 = test_util::make_corpus("one", {test_util::make_user("a", Label::Positive, {"x"}),
                                             test_util::make_user("b", Label::Negative, {"x"})});
    auto c2 = test_util::make_corpus(
        "two", {test_util::make_user("c", Label::Negative, {"x"}),
                test_util::make_user("d", Label::Negative, {"x"}),
                test_util::make_user("e", std::nullopt, {"x"})});
    Corpus merged = merge_corpora({c1, c2}, "merged");
    CHECK(merged.users.size() == 5);
    CHECK(merged.gold.size() == 4);
}

TEST_CASE("merge_corpora reports colliding nicks") {
    auto c1 = test_util::make_corpus("one", {test_util::make_user("userA", Label::Positive, {"x"})});
    auto c2 = test_util::make_corpus("two", {test_util::make_user("userA", Label::Negative, {"x"})});
    CHECK_THROWS_WITH_AS(merge_corpora({c1, c2}, "m"), doctest::Contains("userA"), DataError);
}

TEST_CASE("merge_corpora with prefix policy renames and keeps both") {
    auto c1 = test_util::make_corpus("one", {test_util::make_user("userA", Label::Positive, {"x"})});
    auto c2 = test_util::make_corpus("two", {test_util::make_user("userA", Label::Negative, {"x"})});
    Corpus merged = merge_corpora({c1, c2}, "m", MergePolicy::PrefixWithCorpusName);
    CHECK(merged.users.size() == 2);
    CHECK(merged.find_user("one:userA") != nullptr);
    CHECK(merged.find_user("two:userA") != nullptr);
}

TEST_CASE("merge_corpora rejects an empty list") {
    CHECK_THROWS_AS(merge_corpora({}, "m"), ConfigError);
}

TEST_CASE("split_train_valid is stratified with per-class rounding") {
    std::vector<UserHistory> users;
    for (int i = 0; i < 20; ++i)
        users.push_back(test_util::make_user(strfmt("pos%02d", i), Label::Positive, {"x"}));
    for (int i = 0; i < 80; ++i)
        users.push_back(test_util::make_user(strfmt("neg%02d", i), Label::Negative, {"x"}));
    auto [train, valid] = split_train_valid(test_util::make_corpus("t", users), 0.85, 42);
    size_t train_pos = 0, train_neg = 0;
    for (const auto& u : train.users) (u.label == Label::Positive ? train_pos : train_neg) += 1;
    CHECK(train_pos == 17);
    CHECK(train_neg == 68);
    CHECK(valid.users.size() == 15);
}

TEST_CASE("split_train_valid is deterministic and a partition") {
    std::vector<UserHistory> users;
    for (int i = 0; i < 30; ++i)
        users.push_back(test_util::make_user(strfmt("u%02d", i),
                                             i % 5 == 0 ? Label::Positive : Label::Negative, {"x"}));
    Corpus c = test_util::make_corpus("t", users);
    auto [t1, v1] = split_train_valid(c, 0.7, 9);
    auto [t2, v2] = split_train_valid(c, 0.7, 9);
    auto nicks = [](const Corpus& x) {
        std::set<std::string> s;
        for (const auto& u : x.users) s.insert(u.nick);
        return s;
    };
    CHECK(nicks(t1) == nicks(t2));
    CHECK(nicks(v1) == nicks(v2));
    // merge(split(c)) recovers the user set
    Corpus merged = merge_corpora({t1, v1}, "m");
    CHECK(nicks(merged) == nicks(c));
    // partition: no overlap
    for (const auto& n : nicks(t1)) CHECK(nicks(v1).count(n) == 0);
}

TEST_CASE("split_train_valid rejects bad ratios and unlabeled users") {
    auto c = test_util::make_corpus("t", {test_util::make_user("a", Label::Positive, {"x"}),
                                          test_util::make_user("b", Label::Negative, {"x"})});
    CHECK_THROWS_AS(split_train_valid(c, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(split_train_valid(c, 0.0, 1), ConfigError);
    auto c2 = test_util::make_corpus("t", {test_util::make_user("a", std::nullopt, {"x"})});
    CHECK_THROWS_AS(split_train_valid(c2, 0.5, 1), ConfigError);
}

TEST_CASE("save and load round-trips a corpus") {
    TempDir tmp;
    auto c = test_util::make_corpus("t", {test_util::make_user("a", Label::Positive, {"x y", "z"}),
                                          test_util::make_user("b", std::nullopt, {"w"})});
    std::string path = tmp.file("c.jsonl");
    save_corpus(c, path);
    Corpus loaded = load_corpus(path);
    REQUIRE(loaded.users.size() == 2);
    CHECK(loaded.users[0].nick == "a");
    CHECK(loaded.users[0].posts[0].content == "x y");
    CHECK(loaded.gold.size() == 1);
}
