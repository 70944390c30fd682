#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "earlyrisk/common.hpp"

namespace earlyrisk {

// Word vectors in symptom context. Implementations must be deterministic and
// safe for concurrent embed() calls.
struct EmbeddingProvider {
    virtual ~EmbeddingProvider() = default;
    virtual size_t dim() const = 0;
    virtual std::vector<double> embed(std::string_view word,
                                      std::string_view symptom_name) const = 0;
};

double cosine(const std::vector<double>& u, const std::vector<double>& v);

// "<word> is linked to the symptom <symptom_name>"
std::string context_phrase(std::string_view word, std::string_view symptom_name);

// Deterministic stand-in for a real language model: a unit vector drawn from a
// hash of (word, symptom_name, seed). Desk-scale tests run without any model.
class HashEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(size_t dim = 64, uint64_t seed = 0);
    size_t dim() const override { return dim_; }
    std::vector<double> embed(std::string_view word, std::string_view symptom_name) const override;

private:
    size_t dim_;
    uint64_t seed_;
};

// Embeddings loaded from TSV: word<TAB>symptom<TAB>v1 v2 ... vd
class PrecomputedEmbeddingProvider : public EmbeddingProvider {
public:
    explicit PrecomputedEmbeddingProvider(const std::string& path);
    size_t dim() const override { return dim_; }
    std::vector<double> embed(std::string_view word, std::string_view symptom_name) const override;

private:
    size_t dim_ = 0;
    std::map<std::pair<std::string, std::string>, std::vector<double>> table_;
};

}  // namespace earlyrisk
