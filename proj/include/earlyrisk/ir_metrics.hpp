#pragma once

#include <set>
#include <string>
#include <vector>

namespace earlyrisk {

// Binary-relevance ranking metrics, shared by the symptom ranking evaluation
// and the streaming checkpoint evaluation.
//
// `ranked` is the retrieved ids in rank order; `relevant` the full gold set
// (R = |relevant| even when some relevant ids were never retrieved).

double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant);

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& relevant, size_t k);

// P@R with R = |relevant|.
double r_precision(const std::vector<std::string>& ranked,
                   const std::set<std::string>& relevant);

// DCG = sum of 1/log2(rank+1) over relevant ranks <= k, normalized by the
// ideal ordering's DCG.
double ndcg_at_k(const std::vector<std::string>& ranked,
                 const std::set<std::string>& relevant, size_t k);

}  // namespace earlyrisk
