#include "earlyrisk/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace earlyrisk {

namespace {

bool is_lower_word(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return c >= 'a' && c <= 'z'; });
}

void append_utf8(std::string& out, uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

const std::pair<const char*, uint32_t> kNamedEntities[] = {
    {"amp", '&'},  {"lt", '<'},    {"gt", '>'},    {"quot", '"'},
    {"apos", '\''}, {"nbsp", ' '}, {"hellip", 0x2026}, {"mdash", 0x2014},
    {"ndash", 0x2013}, {"rsquo", 0x2019}, {"lsquo", 0x2018},
    {"rdquo", 0x201D}, {"ldquo", 0x201C},
};

// One pass of &entity; decoding. Returns true if anything changed.
bool decode_entities_once(const std::string& in, std::string& out) {
    bool changed = false;
    out.clear();
    out.reserve(in.size());
    size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        size_t semi = in.find(';', i + 1);
        if (semi == std::string::npos || semi - i > 10) {
            out.push_back(in[i++]);
            continue;
        }
        std::string body = in.substr(i + 1, semi - i - 1);
        uint32_t cp = 0;
        bool ok = false;
        if (body.size() > 1 && body[0] == '#') {
            size_t pos = 1;
            int base = 10;
            if (body[1] == 'x' || body[1] == 'X') {
                base = 16;
                pos = 2;
            }
            if (pos < body.size()) {
                ok = true;
                for (size_t k = pos; k < body.size() && ok; ++k) {
                    int v = hex_val(body[k]);
                    if (v < 0 || v >= base)
                        ok = false;
                    else
                        cp = cp * base + static_cast<uint32_t>(v);
                }
                if (cp > 0x10FFFF) ok = false;
            }
        } else {
            // Case-insensitive so that lowercasing can never expose a new
            // decodable entity on a second pass.
            std::string folded = body;
            std::transform(folded.begin(), folded.end(), folded.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            for (const auto& [name, code] : kNamedEntities) {
                if (folded == name) {
                    cp = code;
                    ok = true;
                    break;
                }
            }
        }
        if (ok) {
            append_utf8(out, cp);
            i = semi + 1;
            changed = true;
        } else {
            out.push_back(in[i++]);
        }
    }
    return changed;
}

// One pass of \uXXXX decoding, combining surrogate pairs. Returns true on change.
bool decode_unicode_escapes_once(const std::string& in, std::string& out) {
    bool changed = false;
    out.clear();
    out.reserve(in.size());
    size_t i = 0;
    auto read_u4 = [&](size_t pos, uint32_t& cp) {
        if (pos + 6 > in.size() || in[pos] != '\\' || (in[pos + 1] != 'u' && in[pos + 1] != 'U'))
            return false;
        cp = 0;
        for (size_t k = 0; k < 4; ++k) {
            int v = hex_val(in[pos + 2 + k]);
            if (v < 0) return false;
            cp = cp * 16 + static_cast<uint32_t>(v);
        }
        return true;
    };
    while (i < in.size()) {
        uint32_t cp = 0;
        if (read_u4(i, cp)) {
            size_t consumed = 6;
            if (cp >= 0xD800 && cp <= 0xDBFF) {
                uint32_t low = 0;
                if (read_u4(i + 6, low) && low >= 0xDC00 && low <= 0xDFFF) {
                    cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
                    consumed = 12;
                } else {
                    out.push_back(in[i++]);
                    continue;
                }
            } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                out.push_back(in[i++]);
                continue;
            }
            append_utf8(out, cp);
            i += consumed;
            changed = true;
        } else {
            out.push_back(in[i++]);
        }
    }
    return changed;
}

bool is_url_token(const std::string& tok) {
    return tok.rfind("http://", 0) == 0 || tok.rfind("https://", 0) == 0 ||
           tok.rfind("www.", 0) == 0;
}

// Decimal integers and plain reals only: [+-]?digits[.digits] or [+-]?.digits
bool is_number_token(const std::string& tok) {
    size_t i = 0;
    if (i < tok.size() && (tok[i] == '+' || tok[i] == '-')) ++i;
    size_t digits = 0;
    bool dot = false;
    for (; i < tok.size(); ++i) {
        char c = tok[i];
        if (c >= '0' && c <= '9') {
            ++digits;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            return false;
        }
    }
    return digits > 0;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    if (from.empty()) return text;
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    while (true) {
        size_t hit = text.find(from, pos);
        if (hit == std::string::npos) {
            out.append(text, pos, std::string::npos);
            return out;
        }
        out.append(text, pos, hit - pos);
        out.append(to);
        pos = hit + from.size();
    }
}

}  // namespace

void NormalizationConfig::validate() const {
    if (!is_lower_word(url_token) || !is_lower_word(number_token))
        throw ConfigError("url_token and number_token must be single lowercase words");
}

std::string normalize(std::string_view text, const NormalizationConfig& cfg) {
    cfg.validate();
    std::string s(text);
    // Decode to fixpoint so a second normalize pass has nothing left to do.
    for (int guard = 0; guard < 16; ++guard) {
        std::string tmp;
        bool a = decode_entities_once(s, tmp);
        std::string tmp2;
        bool b = decode_unicode_escapes_once(tmp, tmp2);
        s = std::move(tmp2);
        if (!a && !b) break;
    }
    auto fold = [](std::string str) {
        std::transform(str.begin(), str.end(), str.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return str;
    };
    if (cfg.lowercase) s = fold(std::move(s));
    // After lowercasing, so replacements cannot re-expose uppercase text.
    for (const auto& [emoji, repl] : cfg.emoji_map)
        s = replace_all(std::move(s), emoji, cfg.lowercase ? fold(repl) : repl);
    std::vector<std::string> tokens = tokenize(s);
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (auto& tok : tokens) {
        if (is_url_token(tok))
            tok = cfg.url_token;
        else if (is_number_token(tok))
            tok = cfg.number_token;
        if (cfg.collapse_repeats && !out.empty() && out.back() == tok) continue;
        out.push_back(std::move(tok));
    }
    return join_tokens(out);
}

double SentimentLexicon::valence(const std::string& token) const {
    auto it = entries.find(token);
    return it == entries.end() ? 0.0 : it->second;
}

double negativity_score(std::string_view normalized_text, const SentimentLexicon& lex) {
    std::vector<std::string> tokens = tokenize(normalized_text);
    double sum = 0.0;
    for (const auto& tok : tokens) {
        double v = lex.valence(tok);
        if (v < 0.0) sum += -v;
    }
    return sum / static_cast<double>(std::max<size_t>(1, tokens.size()));
}

std::vector<std::pair<std::string, std::string>> filter_negative(
    const std::vector<std::pair<std::string, std::string>>& sentences,
    const SentimentLexicon& lex, const NormalizationConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kept;
    for (const auto& s : sentences)
        if (negativity_score(normalize(s.second, cfg), lex) > 0.0) kept.push_back(s);
    return kept;
}

PosTag parse_pos_tag(std::string_view s) {
    if (s == "VERB") return PosTag::Verb;
    if (s == "ADJ") return PosTag::Adj;
    if (s == "NOUN") return PosTag::Noun;
    if (s == "OTHER") return PosTag::Other;
    throw DataError(strfmt("unknown POS tag '%.*s'", static_cast<int>(s.size()), s.data()));
}

PosWords pos_extract(std::string_view normalized_text, const PosLexicon& pl,
                     const std::set<std::string>& symptom_words) {
    PosWords out;
    for (const auto& tok : tokenize(normalized_text)) {
        if (pl.stopwords.count(tok) && !symptom_words.count(tok)) continue;
        auto it = pl.entries.find(tok);
        PosTag tag = it == pl.entries.end() || it->second.empty() ? PosTag::Other : it->second[0];
        switch (tag) {
            case PosTag::Verb: out.verbs.push_back(tok); break;
            case PosTag::Adj: out.adjectives.push_back(tok); break;
            case PosTag::Noun: out.nouns.push_back(tok); break;
            case PosTag::Other: break;
        }
    }
    return out;
}

std::vector<Post> select_negative_posts(const UserHistory& u, const SentimentLexicon& lex,
                                        const NormalizationConfig& cfg) {
    std::vector<Post> kept;
    for (const auto& p : u.posts)
        if (negativity_score(normalize(p.content, cfg), lex) > 0.0) kept.push_back(p);
    return kept;
}

std::string truncate_tokens(std::string_view text, size_t budget) {
    if (budget < 1) throw ConfigError("token budget must be >= 1");
    std::vector<std::string> tokens = tokenize(text);
    if (tokens.size() > budget) tokens.resize(budget);
    return join_tokens(tokens);
}

SentimentLexicon load_sentiment_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sentiment lexicon '" + path + "'");
    SentimentLexicon lex;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(strfmt("%s:%zu: expected token<TAB>valence", path.c_str(), line_no));
        std::string token = line.substr(0, tab);
        size_t end = line.find('\t', tab + 1);
        std::string val = line.substr(tab + 1, end == std::string::npos ? end : end - tab - 1);
        try {
            size_t used = 0;
            double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
            std::transform(token.begin(), token.end(), token.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            lex.entries[token] = v;
        } catch (const std::exception&) {
            throw DataError(strfmt("%s:%zu: bad valence '%s'", path.c_str(), line_no, val.c_str()));
        }
    }
    return lex;
}

PosLexicon load_pos_lexicon(const std::string& path, const std::string& stopwords_path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open POS lexicon '" + path + "'");
    PosLexicon pl;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(strfmt("%s:%zu: expected token<TAB>TAG[,TAG...]", path.c_str(), line_no));
        std::string token = line.substr(0, tab);
        std::vector<PosTag> tags;
        std::stringstream ss(line.substr(tab + 1));
        std::string tag;
        while (std::getline(ss, tag, ',')) tags.push_back(parse_pos_tag(tag));
        if (tags.empty())
            throw DataError(strfmt("%s:%zu: empty tag list", path.c_str(), line_no));
        pl.entries[token] = std::move(tags);
    }
    if (!stopwords_path.empty()) {
        std::ifstream sw(stopwords_path);
        if (!sw) throw DataError("cannot open stopword list '" + stopwords_path + "'");
        while (std::getline(sw, line))
            if (!line.empty()) pl.stopwords.insert(line);
    }
    return pl;
}

std::vector<std::pair<std::string, std::string>> load_emoji_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open emoji map '" + path + "'");
    std::vector<std::pair<std::string, std::string>> map;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(strfmt("%s:%zu: expected emoji<TAB>replacement", path.c_str(), line_no));
        map.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return map;
}

}  // namespace earlyrisk
