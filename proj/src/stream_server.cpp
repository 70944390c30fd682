#include "earlyrisk/stream_server.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "httplib.h"
#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

MockServer::MockServer(Corpus corpus, Options opts)
    : corpus_(std::move(corpus)), opts_(std::move(opts)) {
    if (opts_.token.empty()) throw ConfigError("server token must not be empty");
    if (opts_.runs_expected < 1) throw ConfigError("runs_expected must be >= 1");
    std::sort(corpus_.users.begin(), corpus_.users.end(),
              [](const UserHistory& a, const UserHistory& b) { return a.nick < b.nick; });
    if (opts_.resume) {
        if (opts_.log_path.empty()) throw ConfigError("resume requires a log path");
        rebuild_from_log();
    }
    if (!opts_.log_path.empty()) {
        log_out_ = std::make_unique<std::ofstream>(
            opts_.log_path, opts_.resume ? std::ios::app : std::ios::trunc);
        if (!*log_out_) throw DataError("cannot open run log '" + opts_.log_path + "'");
    }
}

std::vector<std::string> MockServer::round_nicks(int round) const {
    std::vector<std::string> nicks;
    for (const auto& u : corpus_.users)
        if (u.posts.size() > static_cast<size_t>(round)) nicks.push_back(u.nick);
    return nicks;
}

void MockServer::check_token(const std::string& token) const {
    if (token != opts_.token) throw ProtocolError("unknown token '" + token + "'");
}

void MockServer::rebuild_from_log() {
    // Tolerates a torn final write: parsing stops at the first bad line and a
    // partially persisted submission counts as never made.
    std::ifstream in(opts_.log_path);
    if (!in) throw DataError("cannot open run log '" + opts_.log_path + "' for resume");
    std::map<std::pair<int, int>, std::set<std::string>> batch_nicks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RunLogRecord r;
        try {
            json j = json::parse(line);
            r.run = j.at("run").get<int>();
            r.round = j.at("round").get<int>();
            r.nick = j.at("nick").get<std::string>();
            r.decision = j.at("decision").get<int>();
            r.score = j.at("score").get<double>();
            r.elapsed_ms = j.at("elapsed_ms").get<int64_t>();
        } catch (const json::exception&) {
            break;
        }
        batch_nicks[{r.run, r.round}].insert(r.nick);
        records_.push_back(std::move(r));
    }
    auto complete = [&](int run, int round) {
        auto it = batch_nicks.find({run, round});
        if (it == batch_nicks.end()) return false;
        std::vector<std::string> expected = round_nicks(round);
        return it->second == std::set<std::string>(expected.begin(), expected.end());
    };
    // Rounds advance only behind the barrier, so each run's complete rounds
    // form a prefix; the team round is the shortest prefix.
    int team_round = -1;
    for (int run = 0; run < opts_.runs_expected; ++run) {
        int k = 0;
        while (!round_nicks(k).empty() && complete(run, k)) ++k;
        team_round = team_round < 0 ? k : std::min(team_round, k);
    }
    round_ = std::max(0, team_round);
    for (int run = 0; run < opts_.runs_expected; ++run)
        if (complete(run, round_)) submitted_runs_.insert(run);
}

Round MockServer::get_writings(const std::string& token) {
    std::lock_guard<std::mutex> lock(mu_);
    check_token(token);
    Round out;
    out.number = round_;
    for (const auto& u : corpus_.users) {
        if (u.posts.size() <= static_cast<size_t>(round_)) continue;
        const Post& p = u.posts[static_cast<size_t>(round_)];
        RoundItem item;
        item.nick = u.nick;
        item.number = round_ + 1;
        item.title = p.title;
        item.content = p.content;
        item.date = p.timestamp;
        out.items.push_back(std::move(item));
    }
    if (out.items.empty()) {
        finished_ = true;
        out.finished = true;
        return out;
    }
    if (!round_open_) {
        round_open_ = true;
        round_opened_at_ = std::chrono::steady_clock::now();
    }
    return out;
}

int MockServer::submit(const std::string& token, int run,
                       const std::vector<SubmissionDecision>& decisions) {
    std::lock_guard<std::mutex> lock(mu_);
    check_token(token);
    if (run < 0 || run >= opts_.runs_expected)
        throw ProtocolError(strfmt("unknown run %d (expected 0..%d)", run, opts_.runs_expected - 1));
    if (finished_) throw ProtocolError("stream finished; no submissions accepted");
    if (submitted_runs_.count(run))
        throw ProtocolError(strfmt("duplicate submission for run %d in round %d", run, round_));

    std::vector<std::string> expected = round_nicks(round_);
    if (expected.empty()) throw ProtocolError("stream finished; no submissions accepted");
    std::set<std::string> expected_set(expected.begin(), expected.end());
    std::set<std::string> got;
    for (const auto& d : decisions) {
        if (d.decision != 0 && d.decision != 1)
            throw ProtocolError(
                strfmt("decision must be 0 or 1 (got %d for '%s')", d.decision, d.nick.c_str()));
        if (!std::isfinite(d.score))
            throw ProtocolError("non-finite score for '" + d.nick + "'");
        if (!expected_set.count(d.nick))
            throw ProtocolError("unexpected nick '" + d.nick + "' in submission");
        if (!got.insert(d.nick).second)
            throw ProtocolError("duplicate nick '" + d.nick + "' in submission");
    }
    if (got.size() != expected_set.size()) {
        std::string missing;
        for (const auto& n : expected)
            if (!got.count(n)) missing += missing.empty() ? "'" + n + "'" : ", '" + n + "'";
        throw ProtocolError("submission missing users: " + missing);
    }

    if (!round_open_) {
        round_open_ = true;
        round_opened_at_ = std::chrono::steady_clock::now();
    }
    const int64_t elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - round_opened_at_)
                                .count();
    for (const auto& d : decisions) {
        RunLogRecord r;
        r.run = run;
        r.round = round_;
        r.nick = d.nick;
        r.decision = d.decision;
        r.score = d.score;
        r.elapsed_ms = elapsed;
        if (log_out_) *log_out_ << run_log_line(r) << "\n";
        records_.push_back(std::move(r));
    }
    if (log_out_) log_out_->flush();

    const int accepted_round = round_;
    submitted_runs_.insert(run);
    if (static_cast<int>(submitted_runs_.size()) == opts_.runs_expected) {
        ++round_;
        submitted_runs_.clear();
        round_open_ = false;
    }
    return accepted_round;
}

int MockServer::current_round() const {
    std::lock_guard<std::mutex> lock(mu_);
    return round_;
}

bool MockServer::finished() const {
    std::lock_guard<std::mutex> lock(mu_);
    return finished_;
}

std::vector<RunLogRecord> MockServer::log_records() const {
    std::lock_guard<std::mutex> lock(mu_);
    return records_;
}

struct HttpStreamServer::Impl {
    explicit Impl(MockServer& core) : core(core) {
        server.set_tcp_nodelay(true);
        // stop() joins workers that may sit in the keep-alive poll; keep the
        // window short so shutdown does not hang on an idle client socket
        server.set_keep_alive_timeout(1);
        server.Get(R"(/getwritings/([^/]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       handle_get(req, res);
                   });
        server.Post(R"(/submit/([^/]+)/(\d+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        handle_submit(req, res);
                    });
    }

    void handle_get(const httplib::Request& req, httplib::Response& res) {
        try {
            Round round = core.get_writings(req.matches[1]);
            ordered_json items = ordered_json::array();
            for (const auto& item : round.items) {
                ordered_json j;
                j["nick"] = item.nick;
                j["number"] = item.number;
                j["title"] = item.title;
                j["content"] = item.content;
                j["date"] = item.date;
                items.push_back(std::move(j));
            }
            res.set_content(items.dump(), "application/json");
        } catch (const ProtocolError& e) {
            fail(res, 404, e.what());
        } catch (const std::exception& e) {
            fail(res, 500, e.what());
        }
    }

    void handle_submit(const httplib::Request& req, httplib::Response& res) {
        try {
            const std::string token = req.matches[1];
            const int run = std::stoi(req.matches[2]);
            json body = json::parse(req.body);
            if (!body.is_array()) throw ProtocolError("submission body must be a JSON array");
            std::vector<SubmissionDecision> decisions;
            for (const auto& j : body) {
                SubmissionDecision d;
                d.nick = j.at("nick").get<std::string>();
                d.decision = j.at("decision").get<int>();
                d.score = j.at("score").get<double>();
                decisions.push_back(std::move(d));
            }
            int round = core.submit(token, run, decisions);
            ordered_json ack;
            ack["status"] = "ok";
            ack["round"] = round;
            res.set_content(ack.dump(), "application/json");
        } catch (const json::exception& e) {
            fail(res, 400, strfmt("malformed submission: %s", e.what()));
        } catch (const ProtocolError& e) {
            std::string msg = e.what();
            fail(res, msg.rfind("unknown token", 0) == 0 ? 404 : 400, msg);
        } catch (const std::exception& e) {
            fail(res, 500, e.what());
        }
    }

    static void fail(httplib::Response& res, int status, const std::string& msg) {
        res.status = status;
        ordered_json j;
        j["error"] = msg;
        res.set_content(j.dump(), "application/json");
    }

    MockServer& core;
    httplib::Server server;
    std::thread thread;
};

HttpStreamServer::HttpStreamServer(MockServer& core) : impl_(std::make_unique<Impl>(core)) {}

HttpStreamServer::~HttpStreamServer() { stop(); }

int HttpStreamServer::start(const std::string& host) {
    int port = impl_->server.bind_to_any_port(host);
    if (port <= 0) throw Error("failed to bind mock server to " + host);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void HttpStreamServer::serve_blocking(const std::string& host, int port) {
    if (!impl_->server.listen(host, port))
        throw Error(strfmt("failed to listen on %s:%d", host.c_str(), port));
}

void HttpStreamServer::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace earlyrisk
