#include "doctest.h"
#include "earlyrisk/run_log.hpp"
#include "test_util.hpp"

using namespace earlyrisk;

TEST_CASE("run logs export and replay to the same histories") {
    test_util::TempDir tmp;
    std::vector<RunLogRecord> records = {
        {0, 0, "a", 0, 0.2, 10}, {0, 0, "b", 0, 0.3, 10}, {0, 1, "a", 1, 0.9, 12},
        {1, 0, "a", 0, 0.4, 11}, {1, 0, "b", 0, 0.1, 11},
    };
    std::string path = tmp.file("run.jsonl");
    export_run_logs(records, path);
    RunHistories h = replay_run_logs(path);
    REQUIRE(h.size() == 2);
    CHECK(h.at(0).at("a").scores == std::vector<double>{0.2, 0.9});
    CHECK(h.at(0).at("a").decisions == std::vector<int>{0, 1});
    CHECK(h.at(0).at("b").scores == std::vector<double>{0.3});
    CHECK(h.at(1).size() == 2);

    // export of replayed content is stable
    auto reread = read_run_logs(path);
    REQUIRE(reread.size() == records.size());
    CHECK(reread[2].score == 0.9);
    CHECK(reread[2].elapsed_ms == 12);
}

TEST_CASE("replay deduplicates re-logged records keeping the last") {
    std::vector<RunLogRecord> records = {
        {0, 0, "a", 0, 0.2, 10},
        {0, 0, "a", 0, 0.25, 14},  // resumed server re-logged the round
    };
    RunHistories h = replay_run_logs(records);
    CHECK(h.at(0).at("a").scores == std::vector<double>{0.25});
}

TEST_CASE("a truncated final line is reported with its line number") {
    test_util::TempDir tmp;
    std::string path = tmp.file("run.jsonl");
    test_util::write_file(path,
                          run_log_line({0, 0, "a", 0, 0.2, 10}) + "\n" +
                              R"({"run":0,"round":1,"nick":"a","deci)");
    CHECK_THROWS_WITH_AS(read_run_logs(path), doctest::Contains(":2"), DataError);
}

TEST_CASE("an empty log yields empty histories") {
    test_util::TempDir tmp;
    std::string path = tmp.file("empty.jsonl");
    test_util::write_file(path, "");
    CHECK(replay_run_logs(path).empty());
}
