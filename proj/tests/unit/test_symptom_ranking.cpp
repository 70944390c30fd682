#include <algorithm>
#include <random>

#include "doctest.h"
#include "earlyrisk/symptom_ranking.hpp"
#include "test_util.hpp"

using namespace earlyrisk;

namespace {

SymptomSpec toy_symptom(int id = 0) {
    SymptomSpec s;
    s.id = id;
    s.name = "sadness";
    s.verbs = {"cry", "mourn", "weep", "sob", "grieve", "ache", "miss", "hurt", "sigh", "long"};
    s.adjectives = {"sad", "unhappy", "blue"};
    s.nouns = {"tear", "sorrow", "grief"};
    return s;
}

ScoreCell cell(PosTag cat, const std::string& tw, const std::string& sw, double sim,
               const std::string& sid = "s1", int symptom = 0) {
    ScoreCell c;
    c.sentence_id = sid;
    c.symptom_id = symptom;
    c.category = cat;
    c.text_word = tw;
    c.symptom_word = sw;
    c.similarity = sim;
    return c;
}

// Brute-force reference summarizers working straight off the cell list.
std::optional<double> oracle_max(const std::vector<ScoreCell>& cells) {
    double sum = 0.0;
    int cats = 0;
    for (PosTag cat : {PosTag::Verb, PosTag::Adj, PosTag::Noun}) {
        double best = -2.0;
        bool found = false;
        for (const auto& c : cells)
            if (c.category == cat && (!found || c.similarity > best)) {
                best = c.similarity;
                found = true;
            }
        if (found) {
            sum += best;
            ++cats;
        }
    }
    if (cats == 0) return std::nullopt;
    return sum / cats;
}

std::optional<double> oracle_avg(const std::vector<ScoreCell>& cells) {
    double sum = 0.0;
    int cats = 0;
    for (PosTag cat : {PosTag::Verb, PosTag::Adj, PosTag::Noun}) {
        std::set<std::string> words;
        for (const auto& c : cells)
            if (c.category == cat) words.insert(c.text_word);
        if (words.empty()) continue;
        double best = -2.0;
        for (const auto& w : words) {
            double total = 0.0;
            int n = 0;
            for (const auto& c : cells)
                if (c.category == cat && c.text_word == w) {
                    total += c.similarity;
                    ++n;
                }
            best = std::max(best, total / n);
        }
        sum += best;
        ++cats;
    }
    if (cats == 0) return std::nullopt;
    return sum / cats;
}

std::vector<ScoreCell> random_table(std::mt19937& rng) {
    std::uniform_int_distribution<int> n_words(0, 4);
    std::uniform_int_distribution<int> n_sym(1, 4);
    std::uniform_real_distribution<double> sim(-1.0, 1.0);
    std::vector<ScoreCell> cells;
    for (PosTag cat : {PosTag::Verb, PosTag::Adj, PosTag::Noun}) {
        int tw = n_words(rng), sw = n_sym(rng);
        for (int i = 0; i < tw; ++i)
            for (int j = 0; j < sw; ++j)
                cells.push_back(cell(cat, strfmt("w%d", i), strfmt("s%d", j), sim(rng)));
    }
    return cells;
}

}  // namespace

TEST_CASE("score_table builds one cell per same-category pair") {
    HashEmbeddingProvider provider(16, 1);
    SymptomSpec symptom = toy_symptom();
    PosWords words;
    words.verbs = {"feel", "want"};

    auto cells = score_table("s1", words, symptom, provider);
    CHECK(cells.size() == 2 * symptom.verbs.size());
    for (const auto& c : cells) {
        CHECK(c.category == PosTag::Verb);
        CHECK(c.similarity >= -1.0);
        CHECK(c.similarity <= 1.0);
    }

    words.nouns = {};  // still no NOUN cells
    auto again = score_table("s1", words, symptom, provider);
    CHECK(std::none_of(again.begin(), again.end(),
                       [](const ScoreCell& c) { return c.category == PosTag::Noun; }));
}

TEST_CASE("score_table is reproducible with the deterministic provider") {
    HashEmbeddingProvider provider(16, 42);
    PosWords words;
    words.verbs = {"feel"};
    words.adjectives = {"sad"};
    auto a = score_table("s1", words, toy_symptom(), provider);
    auto b = score_table("s1", words, toy_symptom(), provider);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].similarity == b[i].similarity);
}

TEST_CASE("summarize_max averages the per-category maxima") {
    std::vector<ScoreCell> cells = {
        cell(PosTag::Verb, "v1", "a", 0.2), cell(PosTag::Verb, "v2", "b", 0.8),
        cell(PosTag::Adj, "a1", "a", 0.5),  cell(PosTag::Noun, "n1", "a", 0.3),
        cell(PosTag::Noun, "n2", "b", 0.4),
    };
    CHECK(*summarize_max(cells) == doctest::Approx((0.8 + 0.5 + 0.4) / 3.0));

    CHECK(*summarize_max({cell(PosTag::Adj, "a1", "a", 0.5)}) == doctest::Approx(0.5));
    CHECK_FALSE(summarize_max({}).has_value());
}

TEST_CASE("summarize_avg takes the best per-word mean per category") {
    std::vector<ScoreCell> cells = {
        // VERB: w1 mean 0.4, w2 mean 0.4
        cell(PosTag::Verb, "w1", "a", 0.3), cell(PosTag::Verb, "w1", "b", 0.5),
        cell(PosTag::Verb, "w2", "a", 0.4), cell(PosTag::Verb, "w2", "b", 0.4),
        // ADJ: single word mean 0.5
        cell(PosTag::Adj, "x", "a", 0.6), cell(PosTag::Adj, "x", "b", 0.4),
        // NOUN: best mean 0.4
        cell(PosTag::Noun, "y", "a", 0.4), cell(PosTag::Noun, "z", "a", 0.1),
    };
    CHECK(*summarize_avg(cells) == doctest::Approx((0.4 + 0.5 + 0.4) / 3.0));
}

TEST_CASE("summarize_avg equals summarize_max when each word has one cell") {
    std::vector<ScoreCell> cells = {
        cell(PosTag::Verb, "v1", "a", 0.2),
        cell(PosTag::Verb, "v2", "a", 0.8),
        cell(PosTag::Adj, "a1", "a", 0.5),
    };
    CHECK(*summarize_avg(cells) == doctest::Approx(*summarize_max(cells)));
}

TEST_CASE("summarizers reject mixed sentence or symptom ids") {
    std::vector<ScoreCell> mixed = {cell(PosTag::Verb, "a", "b", 0.1, "s1"),
                                    cell(PosTag::Verb, "a", "b", 0.1, "s2")};
    CHECK_THROWS_AS(summarize_max(mixed), ConfigError);
    CHECK_THROWS_AS(summarize_avg(mixed), ConfigError);
}

TEST_CASE("summarizers match brute force on random tables and stay in cell range") {
    std::mt19937 rng(77);
    for (int t = 0; t < 500; ++t) {
        auto cells = random_table(rng);
        auto mx = summarize_max(cells);
        auto av = summarize_avg(cells);
        auto omx = oracle_max(cells);
        auto oav = oracle_avg(cells);
        REQUIRE(mx.has_value() == omx.has_value());
        REQUIRE(av.has_value() == oav.has_value());
        if (!mx) continue;
        CHECK(*mx == doctest::Approx(*omx).epsilon(1e-12));
        CHECK(*av == doctest::Approx(*oav).epsilon(1e-12));
        double lo = 2.0, hi = -2.0;
        for (const auto& c : cells) {
            lo = std::min(lo, c.similarity);
            hi = std::max(hi, c.similarity);
        }
        CHECK(*av >= lo - 1e-12);
        CHECK(*av <= *mx + 1e-12);
        CHECK(*mx <= hi + 1e-12);
    }
}

TEST_CASE("build_ranking orders by score with id tie-break and truncation") {
    SentenceRanking r = build_ranking({{"a", 0.1}, {"b", 0.9}, {"c", 0.5}}, 3);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].first == "b");
    CHECK(r.entries[1].first == "c");
    CHECK(r.entries[2].first == "a");

    SentenceRanking tie = build_ranking({{"b", 0.5}, {"a", 0.5}}, 0);
    CHECK(tie.entries[0].first == "a");

    std::map<std::string, double> many;
    for (int i = 0; i < 1500; ++i) many[strfmt("s%04d", i)] = i * 1e-4;
    CHECK(build_ranking(many, 0).entries.size() == 1000);
    CHECK(build_ranking(many, 0, 10).entries.size() == 10);
}

TEST_CASE("parallel scoring kernel matches the serial reference bit for bit") {
    HashEmbeddingProvider provider(24, 3);
    std::vector<SymptomSpec> symptoms;
    for (int i = 0; i < 4; ++i) {
        SymptomSpec s = toy_symptom(i);
        s.name = strfmt("symptom%d", i);
        symptoms.push_back(s);
    }
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> n_words(0, 3);
    std::vector<std::string> pool = {"cry", "sad", "tear", "feel", "down", "lost", "blue"};
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::vector<SentenceInput> sentences;
    for (int i = 0; i < 60; ++i) {
        SentenceInput s;
        s.id = strfmt("s%03d", i);
        for (int v = n_words(rng); v > 0; --v) s.words.verbs.push_back(pool[pick(rng)]);
        for (int a = n_words(rng); a > 0; --a) s.words.adjectives.push_back(pool[pick(rng)]);
        for (int n = n_words(rng); n > 0; --n) s.words.nouns.push_back(pool[pick(rng)]);
        sentences.push_back(std::move(s));
    }
    for (Summarizer summarizer : {Summarizer::Max, Summarizer::Avg}) {
        auto serial = score_sentences_serial(sentences, symptoms, provider, summarizer);
        auto parallel = score_sentences(sentences, symptoms, provider, summarizer);
        REQUIRE(serial.size() == parallel.size());
        for (size_t s = 0; s < serial.size(); ++s) {
            REQUIRE(serial[s].size() == parallel[s].size());
            for (size_t i = 0; i < serial[s].size(); ++i) {
                CHECK(serial[s][i].first == parallel[s][i].first);
                CHECK(serial[s][i].second == parallel[s][i].second);
            }
        }
    }
}

TEST_CASE("qrels load with scheme and expose per-symptom sets") {
    test_util::TempDir tmp;
    std::string path = tmp.file("qrels.txt");
    test_util::write_file(path, "0\ts1\t1\n0\ts2\t0\n1\ts1\t1\n");
    Qrels q = load_qrels(path, QrelScheme::Majority);
    CHECK(q.relevant_for(0) == std::set<std::string>{"s1"});
    CHECK(q.relevant_for(1) == std::set<std::string>{"s1"});
    CHECK(q.relevant_for(2).empty());

    std::string bad = tmp.file("bad.txt");
    test_util::write_file(bad, "0\ts1\t2\n");
    CHECK_THROWS_WITH_AS(load_qrels(bad, QrelScheme::Majority), doctest::Contains(":1"), DataError);
}

TEST_CASE("unanimity qrels nest inside majority qrels") {
    Qrels majority, unanimity;
    majority.relevant = {{0, "a"}, {0, "b"}, {1, "c"}};
    unanimity.scheme = QrelScheme::Unanimity;
    unanimity.relevant = {{0, "a"}, {1, "c"}};
    CHECK(qrels_nested(majority, unanimity));
    unanimity.relevant.insert({2, "z"});
    CHECK_FALSE(qrels_nested(majority, unanimity));
}

TEST_CASE("evaluate_run macro-averages and detects missing symptoms") {
    Qrels q;
    q.relevant = {{0, "hit"}};
    std::vector<SentenceRanking> rankings;
    for (int id = 0; id < 21; ++id) {
        SentenceRanking r;
        r.symptom_id = id;
        r.entries = {{id == 0 ? "hit" : "miss", 1.0}};
        rankings.push_back(r);
    }
    RankingEvalReport report = evaluate_run(rankings, q);
    CHECK(report.per_symptom.size() == 21);
    CHECK(report.per_symptom[0].ap == doctest::Approx(1.0));
    CHECK(report.macro.ap == doctest::Approx(1.0 / 21.0));

    rankings.erase(rankings.begin() + 7);
    CHECK_THROWS_WITH_AS(evaluate_run(rankings, q), doctest::Contains("7"), ConfigError);
}

TEST_CASE("rankings round-trip through the TSV run format") {
    test_util::TempDir tmp;
    SentenceRanking r;
    r.symptom_id = 3;
    r.entries = {{"s1", 0.75}, {"s2", 0.25}};
    std::string path = tmp.file("symptom_03.tsv");
    save_ranking(r, path);
    SentenceRanking loaded = load_ranking(path, 3);
    REQUIRE(loaded.entries.size() == 2);
    CHECK(loaded.entries[0].first == "s1");
    CHECK(loaded.entries[0].second == doctest::Approx(0.75));
}

TEST_CASE("symptom specs load and validate") {
    test_util::TempDir tmp;
    std::string path = tmp.file("symptoms.json");
    test_util::write_file(
        path,
        R"([{"id":0,"name":"sadness","verbs":["cry"],"adjectives":["sad"],"nouns":["tear"]}])");
    auto specs = load_symptoms(path);
    REQUIRE(specs.size() == 1);
    CHECK(specs[0].name == "sadness");
    CHECK(specs[0].word_set() == std::set<std::string>{"cry", "sad", "tear"});

    std::string dup = tmp.file("dup.json");
    test_util::write_file(
        dup,
        R"([{"id":0,"name":"a","verbs":["x","x"],"adjectives":["y"],"nouns":["z"]}])");
    CHECK_THROWS_AS(load_symptoms(dup), DataError);
}
