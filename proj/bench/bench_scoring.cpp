// Compares the serial reference kernel against the OpenMP one on a synthetic
// sentence-scoring workload and checks the results agree.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "earlyrisk/embedding.hpp"
#include "earlyrisk/symptom_ranking.hpp"

using namespace earlyrisk;

namespace {

std::vector<SymptomSpec> make_symptoms(int count, std::mt19937_64& rng) {
    std::vector<SymptomSpec> out;
    std::uniform_int_distribution<int> letter('a', 'z');
    auto word = [&](const char* stem, int i) { return strfmt("%s%d%c", stem, i, letter(rng)); };
    for (int s = 0; s < count; ++s) {
        SymptomSpec spec;
        spec.id = s;
        spec.name = strfmt("symptom%02d", s);
        for (int i = 0; i < 10; ++i) {
            spec.verbs.push_back(word("v", i));
            spec.adjectives.push_back(word("a", i));
            spec.nouns.push_back(word("n", i));
        }
        out.push_back(std::move(spec));
    }
    return out;
}

std::vector<SentenceInput> make_sentences(size_t count, std::mt19937_64& rng) {
    std::vector<SentenceInput> out;
    std::uniform_int_distribution<int> n_words(1, 4);
    std::uniform_int_distribution<int> idx(0, 400);
    for (size_t i = 0; i < count; ++i) {
        SentenceInput s;
        s.id = strfmt("s%06zu", i);
        for (int v = n_words(rng); v > 0; --v) s.words.verbs.push_back(strfmt("tv%d", idx(rng)));
        for (int a = n_words(rng); a > 0; --a)
            s.words.adjectives.push_back(strfmt("ta%d", idx(rng)));
        for (int n = n_words(rng); n > 0; --n) s.words.nouns.push_back(strfmt("tn%d", idx(rng)));
        out.push_back(std::move(s));
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    size_t n_sentences = argc > 1 ? static_cast<size_t>(std::atoll(argv[1])) : 2000;
    int n_symptoms = argc > 2 ? std::atoi(argv[2]) : 21;
    size_t dim = argc > 3 ? static_cast<size_t>(std::atoll(argv[3])) : 64;

    std::mt19937_64 rng(12345);
    auto symptoms = make_symptoms(n_symptoms, rng);
    auto sentences = make_sentences(n_sentences, rng);
    HashEmbeddingProvider provider(dim, 99);

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("sentences=%zu symptoms=%d dim=%zu threads=%d\n", n_sentences, n_symptoms, dim,
                threads);

    for (Summarizer summarizer : {Summarizer::Max, Summarizer::Avg}) {
        const char* name = summarizer == Summarizer::Max ? "max" : "avg";
        auto t0 = std::chrono::steady_clock::now();
        auto serial = score_sentences_serial(sentences, symptoms, provider, summarizer);
        double serial_s = seconds_since(t0);

        auto t1 = std::chrono::steady_clock::now();
        auto parallel = score_sentences(sentences, symptoms, provider, summarizer);
        double parallel_s = seconds_since(t1);

        bool identical = serial.size() == parallel.size();
        for (size_t s = 0; identical && s < serial.size(); ++s) {
            identical = serial[s].size() == parallel[s].size();
            for (size_t i = 0; identical && i < serial[s].size(); ++i)
                identical = serial[s][i] == parallel[s][i];
        }
        std::printf("%s: serial %.3fs, parallel %.3fs, speedup %.2fx, identical %s\n", name,
                    serial_s, parallel_s, parallel_s > 0 ? serial_s / parallel_s : 0.0,
                    identical ? "yes" : "NO");
        if (!identical) return 1;
    }
    return 0;
}
