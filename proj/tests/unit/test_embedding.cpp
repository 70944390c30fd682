#include <cmath>

#include "doctest.h"
#include "earlyrisk/embedding.hpp"
#include "test_util.hpp"

using namespace earlyrisk;

TEST_CASE("cosine matches hand-derived values") {
    CHECK(cosine({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(cosine({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine({1, 1}, {1, -1}) == doctest::Approx(0.0));
    CHECK(cosine({1, 2}, {-1, -2}) == doctest::Approx(-1.0));
}

TEST_CASE("cosine rejects mismatched dimensions and zero vectors") {
    CHECK_THROWS_AS(cosine({1, 2}, {1, 2, 3}), ConfigError);
    CHECK_THROWS_AS(cosine({0, 0}, {1, 2}), ConfigError);
}

TEST_CASE("cosine stays within [-1, 1]") {
    std::vector<double> u{1e-8, 2e-8, 3e-8};
    CHECK(cosine(u, u) <= 1.0);
    CHECK(cosine(u, u) >= doctest::Approx(1.0));
}

TEST_CASE("context_phrase instantiates the template") {
    CHECK(context_phrase("feeling", "sadness") == "feeling is linked to the symptom sadness");
    CHECK(context_phrase("cry", "pessimism") == "cry is linked to the symptom pessimism");
    CHECK_THROWS_AS(context_phrase("", "sadness"), ConfigError);
}

TEST_CASE("hash provider is deterministic, unit-norm, and seed-sensitive") {
    HashEmbeddingProvider p(32, 7);
    auto v1 = p.embed("feel", "sadness");
    auto v2 = p.embed("feel", "sadness");
    CHECK(v1 == v2);
    CHECK(v1.size() == 32);
    double norm = 0.0;
    for (double x : v1) norm += x * x;
    CHECK(norm == doctest::Approx(1.0));

    auto v3 = p.embed("feel", "pessimism");
    CHECK(v1 != v3);

    HashEmbeddingProvider other_seed(32, 8);
    CHECK(other_seed.embed("feel", "sadness") != v1);
}

TEST_CASE("precomputed provider loads the TSV format and reports misses") {
    test_util::TempDir tmp;
    std::string path = tmp.file("emb.tsv");
    test_util::write_file(path,
                          "feel\tsadness\t1 0 0\n"
                          "cry\tsadness\t0 1 0\n");
    PrecomputedEmbeddingProvider p(path);
    CHECK(p.dim() == 3);
    CHECK(p.embed("feel", "sadness") == std::vector<double>{1, 0, 0});
    CHECK_THROWS_WITH_AS(p.embed("laugh", "sadness"), doctest::Contains("laugh"), DataError);

    std::string ragged = tmp.file("ragged.tsv");
    test_util::write_file(ragged, "a\ts\t1 2\nb\ts\t1 2 3\n");
    CHECK_THROWS_AS(PrecomputedEmbeddingProvider{ragged}, DataError);
}
