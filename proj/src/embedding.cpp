#include "earlyrisk/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace earlyrisk {

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw ConfigError(strfmt("cosine dimension mismatch: %zu vs %zu", u.size(), v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ConfigError("cosine of zero vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::string context_phrase(std::string_view word, std::string_view symptom_name) {
    if (word.empty()) throw ConfigError("context_phrase requires a non-empty word");
    std::string out;
    out.reserve(word.size() + symptom_name.size() + 25);
    out.append(word);
    out.append(" is linked to the symptom ");
    out.append(symptom_name);
    return out;
}

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view s, uint64_t h) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

double unit_uniform(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

HashEmbeddingProvider::HashEmbeddingProvider(size_t dim, uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::vector<double> HashEmbeddingProvider::embed(std::string_view word,
                                                 std::string_view symptom_name) const {
    uint64_t h = fnv1a(word, 0xCBF29CE484222325ULL ^ seed_);
    h = fnv1a("\x1f", h);
    h = fnv1a(symptom_name, h);
    std::vector<double> v(dim_);
    uint64_t state = h;
    for (size_t attempt = 0; attempt < 8; ++attempt) {
        // Box-Muller over splitmix64 draws; portable across standard libraries.
        for (size_t i = 0; i < dim_; i += 2) {
            double u1 = unit_uniform(splitmix64(state));
            double u2 = unit_uniform(splitmix64(state));
            if (u1 <= 0.0) u1 = 0x1.0p-53;
            double r = std::sqrt(-2.0 * std::log(u1));
            v[i] = r * std::cos(2.0 * M_PI * u2);
            if (i + 1 < dim_) v[i + 1] = r * std::sin(2.0 * M_PI * u2);
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm > 1e-12) {
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
            return v;
        }
    }
    throw Error("hash embedding degenerated to zero vector");
}

PrecomputedEmbeddingProvider::PrecomputedEmbeddingProvider(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings file '" + path + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw DataError(
                strfmt("%s:%zu: expected word<TAB>symptom<TAB>values", path.c_str(), line_no));
        std::string word = line.substr(0, t1);
        std::string symptom = line.substr(t1 + 1, t2 - t1 - 1);
        std::vector<double> vec;
        std::stringstream ss(line.substr(t2 + 1));
        double x;
        while (ss >> x) vec.push_back(x);
        if (vec.empty())
            throw DataError(strfmt("%s:%zu: empty vector", path.c_str(), line_no));
        if (dim_ == 0) dim_ = vec.size();
        if (vec.size() != dim_)
            throw DataError(strfmt("%s:%zu: dimension %zu != %zu", path.c_str(), line_no,
                                   vec.size(), dim_));
        table_[{std::move(word), std::move(symptom)}] = std::move(vec);
    }
    if (table_.empty()) throw DataError("embeddings file '" + path + "' is empty");
}

std::vector<double> PrecomputedEmbeddingProvider::embed(std::string_view word,
                                                        std::string_view symptom_name) const {
    auto it = table_.find({std::string(word), std::string(symptom_name)});
    if (it == table_.end())
        throw DataError(strfmt("no embedding for word '%.*s' in symptom '%.*s'",
                               static_cast<int>(word.size()), word.data(),
                               static_cast<int>(symptom_name.size()), symptom_name.data()));
    return it->second;
}

}  // namespace earlyrisk
