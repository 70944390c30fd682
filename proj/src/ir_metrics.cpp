#include "earlyrisk/ir_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "earlyrisk/common.hpp"

namespace earlyrisk {

double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant) {
    if (relevant.empty()) return 0.0;
    double sum = 0.0;
    size_t hits = 0;
    for (size_t i = 0; i < ranked.size(); ++i) {
        if (relevant.count(ranked[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& relevant, size_t k) {
    if (k < 1) throw ConfigError("precision_at_k requires k >= 1");
    size_t hits = 0;
    for (size_t i = 0; i < std::min(k, ranked.size()); ++i)
        if (relevant.count(ranked[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

double r_precision(const std::vector<std::string>& ranked,
                   const std::set<std::string>& relevant) {
    if (relevant.empty()) return 0.0;
    return precision_at_k(ranked, relevant, relevant.size());
}

double ndcg_at_k(const std::vector<std::string>& ranked,
                 const std::set<std::string>& relevant, size_t k) {
    if (k < 1) throw ConfigError("ndcg_at_k requires k >= 1");
    double dcg = 0.0;
    for (size_t i = 0; i < std::min(k, ranked.size()); ++i)
        if (relevant.count(ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i + 2));
    double idcg = 0.0;
    for (size_t i = 0; i < std::min(k, relevant.size()); ++i)
        idcg += 1.0 / std::log2(static_cast<double>(i + 2));
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

}  // namespace earlyrisk
