#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "earlyrisk/corpus.hpp"
#include "earlyrisk/decision_policy.hpp"
#include "earlyrisk/early_metrics.hpp"
#include "earlyrisk/embedding.hpp"
#include "earlyrisk/report.hpp"
#include "earlyrisk/risk_scoring.hpp"
#include "earlyrisk/stream_client.hpp"
#include "earlyrisk/stream_server.hpp"
#include "earlyrisk/symptom_ranking.hpp"
#include "earlyrisk/synthetic.hpp"
#include "earlyrisk/textprep.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// JSON config files: top-level keys are global options, nested objects hold
// per-subcommand options. Arrays expand to repeated option values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void collect(const json& j, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& items) {
        if (!j.is_object()) throw CLI::ConfigError("config root must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                collect(value, std::move(nested), items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(value));
            items.push_back(std::move(item));
        }
    }
};

struct GlobalOpts {
    uint64_t seed = 0;
    std::string format = "csv";
    bool quiet = false;
};

void info(const GlobalOpts& g, const std::string& msg) {
    if (!g.quiet) std::cerr << msg << "\n";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw earlyrisk::DataError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const earlyrisk::Table& table, const std::string& format) {
    std::cout << earlyrisk::render_table(table, earlyrisk::parse_table_format(format));
}

std::vector<earlyrisk::SentenceInput> collect_sentences(const earlyrisk::Corpus& corpus,
                                                        const earlyrisk::SentimentLexicon* lex,
                                                        const earlyrisk::PosLexicon& pl,
                                                        const std::set<std::string>& symptom_words,
                                                        const earlyrisk::NormalizationConfig& norm) {
    std::vector<earlyrisk::SentenceInput> sentences;
    for (const auto& u : corpus.users) {
        for (size_t i = 0; i < u.posts.size(); ++i) {
            std::string id = u.nick + ":" + std::to_string(i + 1);
            std::string normalized = earlyrisk::normalize(earlyrisk::post_text(u.posts[i]), norm);
            if (lex && !(earlyrisk::negativity_score(normalized, *lex) > 0.0)) continue;
            earlyrisk::SentenceInput s;
            s.id = std::move(id);
            s.words = earlyrisk::pos_extract(normalized, pl, symptom_words);
            if (s.words.empty()) continue;
            sentences.push_back(std::move(s));
        }
    }
    return sentences;
}

ordered_json decision_to_json(const earlyrisk::DecisionMetrics& m) {
    ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    ordered_json erde = ordered_json::object();
    for (const auto& [o, v] : m.erde) erde[std::to_string(o)] = v;
    j["erde"] = std::move(erde);
    if (m.latency_tp)
        j["latency_tp"] = *m.latency_tp;
    else
        j["latency_tp"] = nullptr;
    j["speed"] = m.speed;
    j["f_latency"] = m.f_latency;
    return j;
}

earlyrisk::DecisionMetrics decision_from_json(const json& j) {
    earlyrisk::DecisionMetrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    for (const auto& [key, value] : j.at("erde").items())
        m.erde[std::stoi(key)] = value.get<double>();
    if (!j.at("latency_tp").is_null()) m.latency_tp = j["latency_tp"].get<double>();
    m.speed = j.at("speed").get<double>();
    m.f_latency = j.at("f_latency").get<double>();
    return m;
}

std::vector<int> deadlines_of(const earlyrisk::DecisionMetrics& m) {
    std::vector<int> ds;
    for (const auto& [o, v] : m.erde) ds.push_back(o);
    return ds;
}

int run_app(int argc, char** argv) {
    CLI::App app{"Early risk detection laboratory: streaming evaluation harness, "
                 "decision policies, and ranking/latency metrics"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; flags override its values");
    app.require_subcommand(1);

    GlobalOpts global;
    app.add_option("--seed", global.seed, "Seed for all randomized steps")->capture_default_str();
    app.add_option("--format", global.format, "Table output format: csv|md")
        ->check(CLI::IsMember({"csv", "md"}))
        ->capture_default_str();
    app.add_flag("--quiet", global.quiet, "Suppress progress messages");

    // corpus-stats
    auto* stats_cmd = app.add_subcommand("corpus-stats", "Summarize a JSONL corpus");
    stats_cmd->fallthrough(true);
    std::string stats_input;
    stats_cmd->add_option("--input", stats_input, "Corpus JSONL path")->required();
    stats_cmd->callback([&] {
        earlyrisk::Corpus c = earlyrisk::load_corpus(stats_input);
        emit(earlyrisk::corpus_stats_table(fs::path(stats_input).filename().string(),
                                           earlyrisk::corpus_stats(c)),
             global.format);
    });

    // make-synthetic
    auto* synth_cmd = app.add_subcommand("make-synthetic", "Generate a labeled synthetic corpus");
    synth_cmd->fallthrough(true);
    earlyrisk::SyntheticSpec spec;
    std::string synth_out;
    std::string signal_csv;
    synth_cmd->add_option("--out", synth_out, "Output corpus path")->required();
    synth_cmd->add_option("--users", spec.n_users, "Number of users")->capture_default_str();
    synth_cmd->add_option("--positive-fraction", spec.positive_fraction, "Positive user fraction")
        ->capture_default_str();
    synth_cmd->add_option("--min-posts", spec.min_posts, "Minimum posts per user")
        ->capture_default_str();
    synth_cmd->add_option("--max-posts", spec.max_posts, "Maximum posts per user")
        ->capture_default_str();
    synth_cmd->add_option("--min-words", spec.min_words, "Minimum words per post")
        ->capture_default_str();
    synth_cmd->add_option("--max-words", spec.max_words, "Maximum words per post")
        ->capture_default_str();
    synth_cmd->add_option("--signal", signal_csv, "Comma-separated signal words");
    synth_cmd->add_option("--injection-rate", spec.injection_rate,
                          "Probability a positive post carries signal")
        ->capture_default_str();
    synth_cmd->add_option("--signal-density", spec.signal_density,
                          "Token fraction replaced by signal words")
        ->capture_default_str();
    synth_cmd->add_option("--name", spec.name, "Corpus name")->capture_default_str();
    synth_cmd->callback([&] {
        spec.seed = global.seed;
        if (!signal_csv.empty()) {
            spec.signal_words.clear();
            std::stringstream ss(signal_csv);
            std::string w;
            while (std::getline(ss, w, ','))
                if (!w.empty()) spec.signal_words.push_back(w);
        }
        earlyrisk::Corpus c = earlyrisk::make_synthetic(spec);
        earlyrisk::save_corpus(c, synth_out);
        info(global, earlyrisk::strfmt("wrote %zu users to %s", c.users.size(), synth_out.c_str()));
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the word-confidence scorer");
    train_cmd->fallthrough(true);
    std::string train_corpus, train_out, train_lexicon;
    double train_alpha = 1.0;
    train_cmd->add_option("--corpus", train_corpus, "Labeled training corpus")->required();
    train_cmd->add_option("--out", train_out, "Model JSON output path")->required();
    train_cmd->add_option("--lexicon", train_lexicon,
                          "Sentiment lexicon; restricts training to negativity-bearing posts");
    train_cmd->add_option("--alpha", train_alpha, "Additive smoothing")->capture_default_str();
    train_cmd->callback([&] {
        earlyrisk::Corpus c = earlyrisk::load_corpus(train_corpus);
        std::unique_ptr<earlyrisk::SentimentLexicon> lex;
        if (!train_lexicon.empty())
            lex = std::make_unique<earlyrisk::SentimentLexicon>(
                earlyrisk::load_sentiment_lexicon(train_lexicon));
        earlyrisk::WordConfidenceModel m =
            earlyrisk::train_word_confidence(c, train_alpha, lex.get());
        earlyrisk::save_model(m, train_out);
        info(global, earlyrisk::strfmt("trained on %zu users; vocabulary %zu; model at %s",
                                       c.users.size(), m.vocab_size, train_out.c_str()));
    });

    // select-vocab
    auto* vocab_cmd = app.add_subcommand("select-vocab", "Extract top confidence words");
    vocab_cmd->fallthrough(true);
    std::string vocab_model, vocab_out;
    size_t vocab_k = 40;
    vocab_cmd->add_option("--model", vocab_model, "Model JSON path")->required();
    vocab_cmd->add_option("--k", vocab_k, "Words to keep")->capture_default_str();
    vocab_cmd->add_option("--out", vocab_out, "Vocabulary output path")->required();
    vocab_cmd->callback([&] {
        earlyrisk::WordConfidenceModel m = earlyrisk::load_model(vocab_model);
        std::vector<std::string> words = earlyrisk::top_confidence_words(m, vocab_k);
        earlyrisk::export_extended_vocab(words, vocab_out);
        info(global, earlyrisk::strfmt("wrote %zu words to %s", words.size(), vocab_out.c_str()));
    });

    // rank-symptoms
    auto* rank_cmd = app.add_subcommand("rank-symptoms", "Rank sentences per symptom");
    rank_cmd->fallthrough(true);
    std::string rank_corpus, rank_symptoms, rank_embeddings, rank_lexicon, rank_pos_lexicon;
    std::string rank_stopwords, rank_emoji, rank_out_dir, rank_summarizer = "max";
    size_t rank_limit = 1000, rank_dim = 64;
    bool rank_test_provider = false, rank_serial = false;
    rank_cmd->add_option("--corpus", rank_corpus, "Corpus JSONL path")->required();
    rank_cmd->add_option("--symptoms", rank_symptoms, "Symptom spec JSON")->required();
    rank_cmd->add_option("--embeddings", rank_embeddings, "Precomputed embeddings TSV");
    rank_cmd->add_flag("--test-provider", rank_test_provider,
                       "Use the deterministic hash embedding provider");
    rank_cmd->add_option("--dim", rank_dim, "Hash provider dimension")->capture_default_str();
    rank_cmd->add_option("--summarizer", rank_summarizer, "max|avg")
        ->check(CLI::IsMember({"max", "avg"}))
        ->capture_default_str();
    rank_cmd->add_option("--limit", rank_limit, "Ranking length cap")->capture_default_str();
    rank_cmd->add_option("--lexicon", rank_lexicon, "Sentiment lexicon for the negativity filter");
    rank_cmd->add_option("--pos-lexicon", rank_pos_lexicon, "POS lexicon TSV")->required();
    rank_cmd->add_option("--stopwords", rank_stopwords, "Stopword list");
    rank_cmd->add_option("--emoji-map", rank_emoji, "Emoji replacement TSV");
    rank_cmd->add_option("--out-dir", rank_out_dir, "Output directory for per-symptom TSVs")
        ->required();
    rank_cmd->add_flag("--serial", rank_serial, "Force the serial reference kernel");
    rank_cmd->callback([&] {
        if (rank_embeddings.empty() == !rank_test_provider)
            throw earlyrisk::ConfigError("choose exactly one of --embeddings or --test-provider");
        earlyrisk::Corpus corpus = earlyrisk::load_corpus(rank_corpus);
        std::vector<earlyrisk::SymptomSpec> symptoms = earlyrisk::load_symptoms(rank_symptoms);
        earlyrisk::NormalizationConfig norm;
        if (!rank_emoji.empty()) norm.emoji_map = earlyrisk::load_emoji_map(rank_emoji);
        std::unique_ptr<earlyrisk::SentimentLexicon> lex;
        if (!rank_lexicon.empty())
            lex = std::make_unique<earlyrisk::SentimentLexicon>(
                earlyrisk::load_sentiment_lexicon(rank_lexicon));
        earlyrisk::PosLexicon pl = earlyrisk::load_pos_lexicon(rank_pos_lexicon, rank_stopwords);
        std::set<std::string> symptom_words;
        for (const auto& s : symptoms) {
            auto ws = s.word_set();
            symptom_words.insert(ws.begin(), ws.end());
        }
        std::vector<earlyrisk::SentenceInput> sentences =
            collect_sentences(corpus, lex.get(), pl, symptom_words, norm);
        std::unique_ptr<earlyrisk::EmbeddingProvider> provider;
        if (rank_test_provider)
            provider = std::make_unique<earlyrisk::HashEmbeddingProvider>(rank_dim, global.seed);
        else
            provider = std::make_unique<earlyrisk::PrecomputedEmbeddingProvider>(rank_embeddings);
        earlyrisk::Summarizer summarizer = earlyrisk::parse_summarizer(rank_summarizer);
        earlyrisk::ScoresBySymptom scores =
            rank_serial
                ? earlyrisk::score_sentences_serial(sentences, symptoms, *provider, summarizer)
                : earlyrisk::score_sentences(sentences, symptoms, *provider, summarizer);
        fs::create_directories(rank_out_dir);
        for (size_t s = 0; s < symptoms.size(); ++s) {
            std::map<std::string, double> by_id(scores[s].begin(), scores[s].end());
            earlyrisk::SentenceRanking ranking =
                earlyrisk::build_ranking(by_id, symptoms[s].id, rank_limit);
            earlyrisk::save_ranking(
                ranking, (fs::path(rank_out_dir) /
                          earlyrisk::strfmt("symptom_%02d.tsv", symptoms[s].id))
                             .string());
        }
        info(global, earlyrisk::strfmt("ranked %zu sentences over %zu symptoms into %s",
                                       sentences.size(), symptoms.size(), rank_out_dir.c_str()));
    });

    // eval-rankings
    auto* evalrank_cmd = app.add_subcommand("eval-rankings", "Score a ranking run against qrels");
    evalrank_cmd->fallthrough(true);
    std::string er_run_dir, er_qrels, er_scheme = "majority", er_json_out;
    int er_n_symptoms = 21;
    evalrank_cmd->add_option("--run-dir", er_run_dir, "Directory of symptom_NN.tsv files")
        ->required();
    evalrank_cmd->add_option("--qrels", er_qrels, "Qrels file")->required();
    evalrank_cmd->add_option("--scheme", er_scheme, "majority|unanimity")
        ->check(CLI::IsMember({"majority", "unanimity"}))
        ->capture_default_str();
    evalrank_cmd->add_option("--n-symptoms", er_n_symptoms, "Expected symptom count")
        ->capture_default_str();
    evalrank_cmd->add_option("--json-out", er_json_out, "Full-precision JSON report path");
    evalrank_cmd->callback([&] {
        earlyrisk::Qrels qrels =
            earlyrisk::load_qrels(er_qrels, earlyrisk::parse_qrel_scheme(er_scheme));
        std::vector<earlyrisk::SentenceRanking> rankings;
        std::vector<int> expected;
        for (int id = 0; id < er_n_symptoms; ++id) {
            expected.push_back(id);
            fs::path p = fs::path(er_run_dir) / earlyrisk::strfmt("symptom_%02d.tsv", id);
            if (fs::exists(p)) rankings.push_back(earlyrisk::load_ranking(p.string(), id));
        }
        earlyrisk::RankingEvalReport report =
            earlyrisk::evaluate_run(rankings, qrels, expected);
        emit(earlyrisk::ranking_eval_table(report), global.format);
        if (!er_json_out.empty()) {
            ordered_json j;
            j["scheme"] = er_scheme;
            ordered_json rows = ordered_json::array();
            auto row_json = [](const earlyrisk::SymptomEvalRow& r) {
                ordered_json x;
                x["symptom_id"] = r.symptom_id;
                x["ap"] = r.ap;
                x["r_prec"] = r.r_prec;
                x["p_at_10"] = r.p_at_10;
                x["ndcg_at_1000"] = r.ndcg_at_1000;
                return x;
            };
            for (const auto& r : report.per_symptom) rows.push_back(row_json(r));
            j["per_symptom"] = std::move(rows);
            j["macro"] = row_json(report.macro);
            std::ofstream out(er_json_out);
            out << j.dump(2) << "\n";
        }
    });

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the mock stream server");
    serve_cmd->fallthrough(true);
    std::string serve_corpus, serve_token, serve_log, serve_host = "127.0.0.1";
    int serve_runs = 1, serve_port = 8080;
    bool serve_resume = false;
    serve_cmd->add_option("--corpus", serve_corpus, "Corpus JSONL path")->required();
    serve_cmd->add_option("--token", serve_token, "Team token")->required();
    serve_cmd->add_option("--runs", serve_runs, "Submissions expected per round")
        ->capture_default_str();
    serve_cmd->add_option("--port", serve_port, "Listen port")->capture_default_str();
    serve_cmd->add_option("--host", serve_host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--log", serve_log, "Append-only run log (enables crash recovery)");
    serve_cmd->add_flag("--resume", serve_resume, "Rebuild state from --log before serving");
    serve_cmd->callback([&] {
        earlyrisk::Corpus corpus = earlyrisk::load_corpus(serve_corpus);
        earlyrisk::MockServer core(std::move(corpus),
                                   {serve_token, serve_runs, serve_log, serve_resume});
        earlyrisk::HttpStreamServer http(core);
        info(global, earlyrisk::strfmt("serving on %s:%d (round %d)", serve_host.c_str(),
                                       serve_port, core.current_round()));
        http.serve_blocking(serve_host, serve_port);
    });

    // client
    auto* client_cmd = app.add_subcommand("client", "Run the round-loop client");
    client_cmd->fallthrough(true);
    std::string client_server, client_token, client_policy, client_log;
    std::vector<std::string> client_models, client_externals;
    double client_timeout = 30.0;
    client_cmd->add_option("--server", client_server, "Server base URL")->required();
    client_cmd->add_option("--token", client_token, "Team token")->required();
    client_cmd->add_option("--model", client_models, "Word-confidence model JSON (repeatable)");
    client_cmd->add_option("--external", client_externals,
                           "External scorer: stdio:<command> or http URL (repeatable)");
    client_cmd->add_option("--policy", client_policy, "Policy JSON path");
    client_cmd->add_option("--timeout", client_timeout, "External scorer timeout seconds")
        ->capture_default_str();
    client_cmd->add_option("--log", client_log, "Client-side run log output");
    client_cmd->callback([&] {
        std::vector<earlyrisk::RunScorer> runs;
        for (const auto& path : client_models) {
            earlyrisk::RunScorer r;
            r.builtin =
                std::make_shared<earlyrisk::WordConfidenceModel>(earlyrisk::load_model(path));
            runs.push_back(std::move(r));
        }
        for (const auto& spec_str : client_externals) {
            earlyrisk::RunScorer r;
            r.external = earlyrisk::parse_endpoint(spec_str, client_timeout);
            runs.push_back(std::move(r));
        }
        if (runs.empty())
            throw earlyrisk::ConfigError("provide at least one --model or --external");
        earlyrisk::ClientOptions opts;
        opts.base_url = client_server;
        opts.token = client_token;
        opts.log_path = client_log;
        if (!client_policy.empty()) {
            earlyrisk::PolicyConfig policy = earlyrisk::load_policy(client_policy);
            opts.rule = policy.rule;
            opts.window = policy.window;
        }
        earlyrisk::StreamClient client(opts, std::move(runs));
        client.run();
        info(global, earlyrisk::strfmt("finished after %d rounds; %zu log records",
                                       client.rounds_completed(), client.log_records().size()));
    });

    // eval-early
    auto* early_cmd = app.add_subcommand("eval-early", "Compute decision and checkpoint metrics");
    early_cmd->fallthrough(true);
    std::string ee_logs, ee_gold, ee_json_out;
    std::vector<int> ee_deadlines{5, 50};
    std::vector<int> ee_checkpoints{1, 100, 500, 1000};
    std::string ee_latency_median = "penalties";
    early_cmd->add_option("--logs", ee_logs, "Run log JSONL path")->required();
    early_cmd->add_option("--gold", ee_gold, "Labeled corpus JSONL path")->required();
    early_cmd->add_option("--deadlines", ee_deadlines, "ERDE deadlines")
        ->delimiter(',')
        ->capture_default_str();
    early_cmd->add_option("--checkpoints", ee_checkpoints, "Ranking checkpoints")
        ->delimiter(',')
        ->capture_default_str();
    early_cmd
        ->add_option("--latency-median", ee_latency_median,
                     "Median reading for speed: penalties|k")
        ->check(CLI::IsMember({"penalties", "k"}))
        ->capture_default_str();
    early_cmd->add_option("--json-out", ee_json_out, "Full-precision JSON report path");
    early_cmd->callback([&] {
        earlyrisk::Corpus gold_corpus = earlyrisk::load_corpus(ee_gold);
        earlyrisk::RunHistories histories = earlyrisk::replay_run_logs(ee_logs);
        std::vector<earlyrisk::RunLogRecord> records = earlyrisk::read_run_logs(ee_logs);
        earlyrisk::EarlyMetricsConfig cfg;
        cfg.deadlines = ee_deadlines;
        cfg.latency_median = ee_latency_median == "k"
                                 ? earlyrisk::LatencyMedianMode::PenaltyOfMedianK
                                 : earlyrisk::LatencyMedianMode::MedianOfPenalties;
        std::map<int, int64_t> timings = earlyrisk::timing_report(records);
        std::vector<std::pair<std::string, earlyrisk::DecisionMetrics>> decision_rows;
        std::vector<std::pair<std::string, std::vector<earlyrisk::RankingCheckpoint>>> cp_rows;
        std::vector<std::pair<std::string, int64_t>> timing_rows;
        ordered_json jruns = ordered_json::array();
        for (const auto& [run, users] : histories) {
            std::vector<earlyrisk::UserOutcome> outcomes =
                earlyrisk::outcomes_from_histories(users, gold_corpus.gold);
            earlyrisk::DecisionMetrics m = earlyrisk::decision_report(outcomes, cfg);
            std::string name = earlyrisk::strfmt("run%d", run);
            decision_rows.emplace_back(name, m);
            std::vector<earlyrisk::RankingCheckpoint> cps;
            for (int k : ee_checkpoints)
                cps.push_back(earlyrisk::ranking_at_checkpoint(outcomes, k));
            cp_rows.emplace_back(name, cps);
            timing_rows.emplace_back(name, timings.count(run) ? timings[run] : 0);
            ordered_json jr;
            jr["run"] = run;
            jr["decision"] = decision_to_json(m);
            ordered_json jcps = ordered_json::array();
            for (const auto& cp : cps) {
                ordered_json jc;
                jc["k"] = cp.k;
                jc["p_at_10"] = cp.p_at_10;
                jc["ndcg_at_10"] = cp.ndcg_at_10;
                jc["ndcg_at_100"] = cp.ndcg_at_100;
                jcps.push_back(std::move(jc));
            }
            jr["checkpoints"] = std::move(jcps);
            jr["total_ms"] = timing_rows.back().second;
            jruns.push_back(std::move(jr));
        }
        emit(earlyrisk::decision_metrics_table(decision_rows, ee_deadlines), global.format);
        emit(earlyrisk::checkpoint_table(cp_rows), global.format);
        emit(earlyrisk::timing_table(timing_rows), global.format);
        if (!ee_json_out.empty()) {
            ordered_json j;
            j["runs"] = std::move(jruns);
            std::ofstream out(ee_json_out);
            out << j.dump(2) << "\n";
        }
    });

    // report
    auto* report_cmd = app.add_subcommand("report", "Render a JSON metrics report as CSV/Markdown");
    report_cmd->fallthrough(true);
    std::string report_input, report_out;
    report_cmd->add_option("--input", report_input, "JSON report from eval-early/eval-rankings")
        ->required();
    report_cmd->add_option("--out", report_out, "Output directory (default: stdout)");
    report_cmd->callback([&] {
        json j = json::parse(slurp(report_input));
        std::vector<earlyrisk::Table> tables;
        if (j.contains("runs")) {
            std::vector<std::pair<std::string, earlyrisk::DecisionMetrics>> decision_rows;
            std::vector<std::pair<std::string, std::vector<earlyrisk::RankingCheckpoint>>> cp_rows;
            std::vector<std::pair<std::string, int64_t>> timing_rows;
            std::vector<int> deadlines;
            for (const auto& jr : j["runs"]) {
                std::string name = earlyrisk::strfmt("run%d", jr.at("run").get<int>());
                earlyrisk::DecisionMetrics m = decision_from_json(jr.at("decision"));
                deadlines = deadlines_of(m);
                decision_rows.emplace_back(name, std::move(m));
                std::vector<earlyrisk::RankingCheckpoint> cps;
                for (const auto& jc : jr.at("checkpoints")) {
                    earlyrisk::RankingCheckpoint cp;
                    cp.k = jc.at("k").get<int>();
                    cp.p_at_10 = jc.at("p_at_10").get<double>();
                    cp.ndcg_at_10 = jc.at("ndcg_at_10").get<double>();
                    cp.ndcg_at_100 = jc.at("ndcg_at_100").get<double>();
                    cps.push_back(cp);
                }
                cp_rows.emplace_back(name, std::move(cps));
                timing_rows.emplace_back(name, jr.at("total_ms").get<int64_t>());
            }
            tables.push_back(earlyrisk::decision_metrics_table(decision_rows, deadlines));
            tables.push_back(earlyrisk::checkpoint_table(cp_rows));
            tables.push_back(earlyrisk::timing_table(timing_rows));
        } else if (j.contains("per_symptom")) {
            earlyrisk::RankingEvalReport report;
            auto row_of = [](const json& x) {
                earlyrisk::SymptomEvalRow r;
                r.symptom_id = x.at("symptom_id").get<int>();
                r.ap = x.at("ap").get<double>();
                r.r_prec = x.at("r_prec").get<double>();
                r.p_at_10 = x.at("p_at_10").get<double>();
                r.ndcg_at_1000 = x.at("ndcg_at_1000").get<double>();
                return r;
            };
            for (const auto& x : j["per_symptom"]) report.per_symptom.push_back(row_of(x));
            report.macro = row_of(j.at("macro"));
            tables.push_back(earlyrisk::ranking_eval_table(report));
        } else {
            throw earlyrisk::ConfigError(report_input + ": unrecognized report payload");
        }
        if (report_out.empty()) {
            for (const auto& t : tables) emit(t, global.format);
        } else {
            fs::create_directories(report_out);
            const char* names[] = {"decision", "checkpoints", "timing"};
            const std::string ext = global.format == "md" ? ".md" : ".csv";
            for (size_t i = 0; i < tables.size(); ++i) {
                std::string stem = tables.size() == 1 ? "rankings" : names[std::min<size_t>(i, 2)];
                std::ofstream out((fs::path(report_out) / (stem + ext)).string());
                out << earlyrisk::render_table(tables[i],
                                               earlyrisk::parse_table_format(global.format));
            }
            info(global, "wrote " + std::to_string(tables.size()) + " tables to " + report_out);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are config errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const earlyrisk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
