#include "earlyrisk/stream_client.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> RunScorer::score_batch(
    const std::vector<std::pair<std::string, std::string>>& id_text) const {
    std::vector<double> out;
    out.reserve(id_text.size());
    if (builtin) {
        for (const auto& [id, text] : id_text) out.push_back(builtin->score(text));
        return out;
    }
    if (!external) throw ConfigError("run scorer has neither builtin model nor endpoint");
    auto scored = external_score(*external, id_text);
    for (const auto& [id, score] : scored) out.push_back(score);
    return out;
}

struct StreamClient::Http {
    explicit Http(const std::string& base_url) : client(base_url) {
        client.set_connection_timeout(std::chrono::seconds(10));
        client.set_read_timeout(std::chrono::seconds(60));
        client.set_keep_alive(true);
        client.set_tcp_nodelay(true);
    }
    httplib::Client client;
};

StreamClient::StreamClient(ClientOptions opts, std::vector<RunScorer> runs)
    : opts_(std::move(opts)), runs_(std::move(runs)) {
    if (runs_.empty()) throw ConfigError("client needs at least one scorer");
    opts_.rule.validate();
    opts_.window.validate();
    states_.resize(runs_.size());
    http_ = std::make_unique<Http>(opts_.base_url);
    if (!opts_.log_path.empty()) {
        log_out_ = std::make_unique<std::ofstream>(opts_.log_path, std::ios::trunc);
        if (!*log_out_) throw DataError("cannot open client log '" + opts_.log_path + "'");
    }
}

StreamClient::~StreamClient() = default;

void StreamClient::set_server(const std::string& base_url) {
    opts_.base_url = base_url;
    http_ = std::make_unique<Http>(base_url);
}

const std::map<std::string, UserDecisionState>& StreamClient::states(size_t run) const {
    if (run >= states_.size()) throw ConfigError(strfmt("no run %zu", run));
    return states_[run];
}

namespace {

struct HttpReply {
    bool transport_ok = false;
    int status = 0;
    std::string body;
};

std::string error_of(const HttpReply& r) {
    try {
        json j = json::parse(r.body);
        if (j.contains("error")) return j["error"].get<std::string>();
    } catch (const json::exception&) {
    }
    return r.body.empty() ? strfmt("HTTP %d", r.status) : r.body;
}

}  // namespace

std::string StreamClient::get_with_retry(const std::string& path) {
    int backoff = opts_.initial_backoff_ms;
    for (int attempt = 0;; ++attempt) {
        auto res = http_->client.Get(path);
        HttpReply reply{static_cast<bool>(res), res ? res->status : 0, res ? res->body : ""};
        if (reply.transport_ok && reply.status == 200) return reply.body;
        if (reply.transport_ok)
            throw ProtocolError("server rejected GET " + path + ": " + error_of(reply));
        if (attempt >= opts_.max_retries)
            throw ProtocolError("server unreachable at " + opts_.base_url);
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff = std::min(backoff * 2, 5000);
    }
}

std::string StreamClient::post_with_retry(const std::string& path, const std::string& body) {
    int backoff = opts_.initial_backoff_ms;
    bool saw_transport_failure = false;
    for (int attempt = 0;; ++attempt) {
        auto res = http_->client.Post(path, body, "application/json");
        HttpReply reply{static_cast<bool>(res), res ? res->status : 0, res ? res->body : ""};
        if (reply.transport_ok && reply.status == 200) return reply.body;
        if (reply.transport_ok) {
            // A crash can eat the ack after the submission was persisted; the
            // resend then reads as a duplicate and counts as delivered.
            if (saw_transport_failure &&
                error_of(reply).rfind("duplicate submission", 0) == 0)
                return reply.body;
            throw ProtocolError("server rejected POST " + path + ": " + error_of(reply));
        }
        saw_transport_failure = true;
        if (attempt >= opts_.max_retries)
            throw ProtocolError("server unreachable at " + opts_.base_url);
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff = std::min(backoff * 2, 5000);
    }
}

bool StreamClient::step() {
    if (finished_) return false;
    const auto round_started = std::chrono::steady_clock::now();
    std::string body = get_with_retry("/getwritings/" + opts_.token);
    json items;
    try {
        items = json::parse(body);
    } catch (const json::exception& e) {
        throw ProtocolError(strfmt("malformed round payload: %s", e.what()));
    }
    if (!items.is_array()) throw ProtocolError("round payload must be a JSON array");
    if (items.empty()) {
        finished_ = true;
        http_->client.stop();  // release the keep-alive socket
        return false;
    }

    int wire_round = -1;
    std::vector<std::pair<std::string, std::string>> windows;  // (id, window text)
    std::vector<std::string> nicks;
    for (const auto& item : items) {
        Post p;
        p.title = item.value("title", "");
        p.content = item.value("content", "");
        const std::string nick = item.at("nick").get<std::string>();
        const int number = item.at("number").get<int>();
        wire_round = std::max(wire_round, number - 1);
        auto& history = histories_[nick];
        if (static_cast<int>(history.size()) != number - 1)
            throw ProtocolError(strfmt("post number %d for '%s' does not extend history of %zu",
                                       number, nick.c_str(), history.size()));
        history.push_back(normalize(post_text(p), opts_.norm));
        windows.emplace_back(nick + ":" + std::to_string(number),
                             build_window(history, number, opts_.window));
        nicks.push_back(nick);
    }

    for (size_t run = 0; run < runs_.size(); ++run) {
        std::vector<double> scores = runs_[run].score_batch(windows);
        ordered_json submission = ordered_json::array();
        std::vector<RunLogRecord> batch;
        for (size_t i = 0; i < nicks.size(); ++i) {
            auto& state = states_[run][nicks[i]];
            state.nick = nicks[i];
            Decision d = observe(state, scores[i], opts_.rule);
            ordered_json j;
            j["nick"] = nicks[i];
            j["decision"] = d.value;
            j["score"] = d.score;
            submission.push_back(std::move(j));
            RunLogRecord rec;
            rec.run = static_cast<int>(run);
            rec.round = wire_round;
            rec.nick = nicks[i];
            rec.decision = d.value;
            rec.score = d.score;
            batch.push_back(std::move(rec));
        }
        std::string ack = post_with_retry(
            "/submit/" + opts_.token + "/" + std::to_string(run), submission.dump());
        (void)ack;
        const int64_t elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - round_started)
                                    .count();
        for (auto& rec : batch) {
            rec.elapsed_ms = elapsed;
            if (log_out_) *log_out_ << run_log_line(rec) << "\n";
            records_.push_back(std::move(rec));
        }
        if (log_out_) log_out_->flush();
    }
    ++rounds_completed_;
    return true;
}

void StreamClient::run() {
    while (step()) {
    }
}

std::vector<RunLogRecord> run_client(const ClientOptions& opts, std::vector<RunScorer> runs) {
    StreamClient client(opts, std::move(runs));
    client.run();
    return client.log_records();
}

}  // namespace earlyrisk
