#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>

#include "earlyrisk/risk_scoring.hpp"
#include "httplib.h"
#include "json.hpp"

namespace earlyrisk {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::pair<std::string, double>> match_responses(
    const std::vector<std::pair<std::string, std::string>>& batch,
    const std::map<std::string, double>& by_id) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(batch.size());
    for (const auto& [id, text] : batch) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ProtocolError("external scorer returned no response for id '" + id + "'");
        out.emplace_back(id, it->second);
    }
    return out;
}

void parse_response_object(const json& j, std::map<std::string, double>& by_id) {
    if (!j.is_object() || !j.contains("id") || !j.contains("score"))
        throw ProtocolError("external scorer response missing id/score");
    std::string id = j.at("id").get<std::string>();
    double score = j.at("score").get<double>();
    if (!(score >= 0.0 && score <= 1.0))
        throw ProtocolError(strfmt("score %g out of range [0,1] for id '%s'", score, id.c_str()));
    if (!by_id.emplace(id, score).second)
        throw ProtocolError("duplicate response for id '" + id + "'");
}

std::vector<std::pair<std::string, double>> score_stdio(
    const ExternalScorerEndpoint& e, const std::vector<std::pair<std::string, std::string>>& batch) {
    signal(SIGPIPE, SIG_IGN);  // a child that exits early must not kill us
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw Error(strfmt("pipe failed: %s", std::strerror(errno)));
    pid_t pid = fork();
    if (pid < 0) throw Error(strfmt("fork failed: %s", std::strerror(errno)));
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", e.address.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);

    std::string request;
    for (const auto& [id, text] : batch) {
        ordered_json j;
        j["id"] = id;
        j["text"] = text;
        request += j.dump();
        request += "\n";
    }
    size_t off = 0;
    while (off < request.size()) {
        ssize_t n = write(to_child[1], request.data() + off, request.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EPIPE) break;  // child closed stdin; it may still answer
            close(to_child[1]);
            close(from_child[0]);
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            throw Error(strfmt("write to external scorer failed: %s", std::strerror(errno)));
        }
        off += static_cast<size_t>(n);
    }
    close(to_child[1]);

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(static_cast<int64_t>(e.timeout_s * 1000));
    std::string output;
    char buf[4096];
    while (true) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
        if (left <= 0) {
            close(from_child[0]);
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            throw ProtocolError("external scorer timed out");
        }
        struct pollfd pfd = {from_child[0], POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(left));
        if (rc < 0) {
            if (errno == EINTR) continue;
            close(from_child[0]);
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            throw Error(strfmt("poll failed: %s", std::strerror(errno)));
        }
        if (rc == 0) continue;
        ssize_t n = read(from_child[0], buf, sizeof(buf));
        if (n < 0) {
            if (errno == EINTR) continue;
            close(from_child[0]);
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            throw Error(strfmt("read from external scorer failed: %s", std::strerror(errno)));
        }
        if (n == 0) break;
        output.append(buf, static_cast<size_t>(n));
    }
    close(from_child[0]);
    waitpid(pid, nullptr, 0);

    std::map<std::string, double> by_id;
    size_t start = 0;
    size_t line_no = 0;
    while (start < output.size()) {
        size_t end = output.find('\n', start);
        if (end == std::string::npos) end = output.size();
        ++line_no;
        std::string line = output.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& ex) {
            throw ProtocolError(strfmt("malformed scorer response line %zu: %s", line_no, ex.what()));
        }
        parse_response_object(j, by_id);
    }
    return match_responses(batch, by_id);
}

std::vector<std::pair<std::string, double>> score_http(
    const ExternalScorerEndpoint& e, const std::vector<std::pair<std::string, std::string>>& batch) {
    httplib::Client client(e.address);
    client.set_connection_timeout(std::chrono::milliseconds(static_cast<int64_t>(e.timeout_s * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(static_cast<int64_t>(e.timeout_s * 1000)));
    ordered_json req = ordered_json::array();
    for (const auto& [id, text] : batch) {
        ordered_json j;
        j["id"] = id;
        j["text"] = text;
        req.push_back(std::move(j));
    }
    auto res = client.Post("/score", req.dump(), "application/json");
    if (!res) throw ProtocolError("external scorer unreachable at " + e.address);
    if (res->status != 200)
        throw ProtocolError(strfmt("external scorer returned HTTP %d", res->status));
    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::exception& ex) {
        throw ProtocolError(strfmt("malformed scorer response: %s", ex.what()));
    }
    if (!body.is_array()) throw ProtocolError("external scorer response must be a JSON array");
    std::map<std::string, double> by_id;
    for (const auto& j : body) parse_response_object(j, by_id);
    return match_responses(batch, by_id);
}

}  // namespace

std::vector<std::pair<std::string, double>> external_score(
    const ExternalScorerEndpoint& e, const std::vector<std::pair<std::string, std::string>>& batch) {
    if (batch.empty()) return {};
    return e.transport == ScorerTransport::Stdio ? score_stdio(e, batch) : score_http(e, batch);
}

}  // namespace earlyrisk
