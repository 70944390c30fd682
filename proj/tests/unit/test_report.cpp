#include <sstream>

#include "doctest.h"
#include "earlyrisk/report.hpp"

using namespace earlyrisk;

namespace {

DecisionMetrics sample_metrics() {
    DecisionMetrics m;
    m.precision = 0.752;
    m.recall = 0.767;
    m.f1 = 0.760;
    m.erde = {{5, 0.048}, {50, 0.017}};
    m.latency_tp = 15.0;
    m.speed = 0.945;
    m.f_latency = 0.718;
    return m;
}

}  // namespace

TEST_CASE("a single decision row renders as an 8-column CSV in table order") {
    Table t = decision_metrics_table(sample_metrics(), {5, 50});
    std::string csv = render_table(t, TableFormat::Csv);
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "P,R,F1,ERDE5,ERDE50,latencyTP,speed,Flatency");
    CHECK(row == "0.752,0.767,0.760,0.048,0.017,15.0,0.945,0.718");
}

TEST_CASE("markdown output carries the same values as the CSV") {
    Table t = decision_metrics_table(sample_metrics(), {5, 50});
    std::string csv = render_table(t, TableFormat::Csv);
    std::string md = render_table(t, TableFormat::Markdown);
    for (const auto& cell : t.rows[0]) CHECK(md.find(cell) != std::string::npos);
    CHECK(md.find("| P |") != std::string::npos);
    // the markdown cells round-trip through the csv values
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::istringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) CHECK(md.find(cell) != std::string::npos);
}

TEST_CASE("a run without true positives renders a flagged latency") {
    DecisionMetrics m = sample_metrics();
    m.latency_tp.reset();
    m.speed = 0.0;
    m.f_latency = 0.0;
    Table t = decision_metrics_table(m, {5, 50});
    CHECK(render_table(t, TableFormat::Csv).find("n/a") != std::string::npos);
}

TEST_CASE("an empty checkpoint list renders as a bare header") {
    Table t = checkpoint_table({});
    std::string csv = render_table(t, TableFormat::Csv);
    CHECK(csv == "Model,Ranking,P@10,NDCG@10,NDCG@100\n");
}

TEST_CASE("checkpoint rows carry the post-count label") {
    RankingCheckpoint cp;
    cp.k = 100;
    cp.p_at_10 = 1.0;
    cp.ndcg_at_10 = 1.0;
    cp.ndcg_at_100 = 0.70;
    Table t = checkpoint_table({{"run0", {cp}}});
    std::string csv = render_table(t, TableFormat::Csv);
    CHECK(csv.find("run0,100 posts,1.00,1.00,0.70") != std::string::npos);
}

TEST_CASE("csv cells with separators are quoted") {
    Table t;
    t.header = {"a", "b"};
    t.rows = {{"x,y", "say \"hi\""}};
    std::string csv = render_table(t, TableFormat::Csv);
    CHECK(csv.find("\"x,y\"") != std::string::npos);
    CHECK(csv.find("\"say \"\"hi\"\"\"") != std::string::npos);
}

TEST_CASE("timing table renders formatted durations") {
    Table t = timing_table({{"run0", 94620000}});
    CHECK(render_table(t, TableFormat::Csv).find("1 day + 2h:17m") != std::string::npos);
}
