#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kbclean/oracle.hpp"
#include "kbclean/signature.hpp"
#include "support.hpp"

using namespace kbclean;
using kbclean::testing::make_set;
using kbclean::testing::pair_with_similarity;

TEST_CASE("simhash of a singleton equals the instance hash bit pattern") {
    // word 0 of a simhash draws from this stream id
    constexpr std::uint64_t kSimStream0 = 0x53494d0000000000ULL;
    HashFamily family{42};
    std::uint64_t pattern = family.hash("only-member", kSimStream0);
    for (std::uint64_t w : {1ULL, 5ULL, 100000ULL}) {
        ConceptSet set = make_set("solo", {{"only-member", 1}});
        set.members["only-member"] = w;
        BitSignature sig = simhash(set, family, 64);
        // with one contributor every vote has the sign of its hash bit
        CHECK(sig.words[0] == pattern);
    }
}

TEST_CASE("simhash is deterministic and independent of insertion order") {
    HashFamily family{7};
    ConceptSet forward;
    forward.name = "set";
    ConceptSet backward;
    backward.name = "set";
    for (int i = 0; i < 50; ++i) {
        forward.members["inst" + std::to_string(i)] = 1 + i;
    }
    for (int i = 49; i >= 0; --i) {
        backward.members["inst" + std::to_string(i)] = 1 + i;
    }
    CHECK(simhash(forward, family, 64) == simhash(backward, family, 64));
    CHECK(simhash(forward, family, 128) == simhash(backward, family, 128));
    CHECK(simhash(forward, family, 64) == simhash(forward, family, 64));
}

TEST_CASE("simhash: a heavy instance dominates a weight-1 companion") {
    // observed over these 100 seeds: distance is always 0 (a +-1 vote can
    // never flip a +-1000 majority); width/4 is the documented ceiling
    unsigned worst = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        HashFamily family{seed};
        BitSignature heavy_only = simhash(make_set("s", {{"a", 1000}}), family, 64);
        BitSignature with_noise = simhash(make_set("s", {{"a", 1000}, {"b", 1}}), family, 64);
        worst = std::max(worst, hamming(heavy_only, with_noise));
    }
    CHECK(worst <= 64 / 4);
    CHECK(worst == 0);
}

TEST_CASE("simhash input validation") {
    HashFamily family{1};
    ConceptSet empty;
    empty.name = "void";
    CHECK_THROWS_AS(simhash(empty, family, 64), std::invalid_argument);
    CHECK_THROWS_AS(simhash(make_set("s", {{"a", 1}}), family, 63), std::invalid_argument);
    CHECK_THROWS_AS(simhash(make_set("s", {{"a", 1}}), family, 512), std::invalid_argument);
}

TEST_CASE("weight transform changes the vote, not the contract") {
    HashFamily family{11};
    ConceptSet set = make_set("s", {{"a", 5000}});
    for (int i = 0; i < 8; ++i) {
        set.members["filler" + std::to_string(i)] = 16;
    }
    BitSignature raw = simhash(set, family, 64, WeightTransform::raw);
    BitSignature logd = simhash(set, family, 64, WeightTransform::log);
    CHECK(raw.width == logd.width);
    // raw: the 5000-weight member outvotes 8 x 16 on every bit
    CHECK(raw == simhash(make_set("s", {{"a", 5000}}), family, 64));
    // log damping: 1+log2(5000) ~ 13.3 vs 8 votes of 5 each, so bits where
    // most fillers disagree with the heavy member flip
    CHECK(hamming(raw, logd) > 0);
}

TEST_CASE("hamming distance basics") {
    BitSignature x{"x", 64, 0, {0b1010}};
    BitSignature y{"y", 64, 0, {0b0110}};
    CHECK(hamming(x, x) == 0);
    CHECK(hamming(x, y) == 2);

    BitSignature inverted{"z", 64, 0, {~0b1010ULL}};
    CHECK(hamming(x, inverted) == 64);

    BitSignature wide{"w", 128, 0, {0, 0}};
    CHECK_THROWS_AS(hamming(x, wide), std::invalid_argument);
}

TEST_CASE("hamming is a metric") {
    Rng rng(31);
    auto random_sig = [&rng](unsigned width) {
        BitSignature sig;
        sig.concept_name = "r";
        sig.width = width;
        for (unsigned w = 0; w < width / 64; ++w) sig.words.push_back(rng.next());
        return sig;
    };
    for (int trial = 0; trial < 200; ++trial) {
        unsigned width = trial % 2 == 0 ? 64 : 128;
        BitSignature a = random_sig(width);
        BitSignature b = random_sig(width);
        BitSignature c = random_sig(width);
        CHECK(hamming(a, a) == 0);
        CHECK(hamming(a, b) == hamming(b, a));
        CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c));
        if (a.words != b.words) CHECK(hamming(a, b) > 0);
    }
}

TEST_CASE("minhash ignores weights and tracks membership") {
    HashFamily family{5};
    ConceptSet light = make_set("s", {{"a", 1}, {"b", 1}, {"c", 1}});
    ConceptSet heavy = make_set("s", {{"a", 900}, {"b", 4}, {"c", 77}});
    CHECK(minhash(light, family, 128) == minhash(heavy, family, 128));

    ConceptSet other = make_set("s", {{"a", 1}, {"b", 1}, {"d", 1}});
    CHECK(minhash(light, family, 128) != minhash(other, family, 128));

    ConceptSet empty;
    empty.name = "void";
    CHECK_THROWS_AS(minhash(empty, family, 128), std::invalid_argument);
    CHECK_THROWS_AS(minhash(light, family, 0), std::invalid_argument);
}

TEST_CASE("estimate_jaccard on identical and mismatched signatures") {
    HashFamily family{5};
    ConceptSet set = make_set("s", {{"a", 1}, {"b", 1}});
    MinSignature sig = minhash(set, family, 128);
    CHECK(estimate_jaccard(sig, sig) == 1.0);

    MinSignature short_sig = minhash(set, family, 64);
    CHECK_THROWS_AS(estimate_jaccard(sig, short_sig), std::invalid_argument);

    HashFamily other{6};
    MinSignature other_seed = minhash(set, other, 128);
    CHECK_THROWS_AS(estimate_jaccard(sig, other_seed), std::invalid_argument);
}

TEST_CASE("estimate_jaccard: disjoint large random sets estimate near zero") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        HashFamily family{seed};
        auto [a, b] = pair_with_similarity("d" + std::to_string(seed), 0, 100);
        REQUIRE(exact_jaccard(a, b) == 0.0);
        double est = estimate_jaccard(minhash(a, family, 128), minhash(b, family, 128));
        CHECK(est <= 0.1);
        CHECK(est == estimate_jaccard(minhash(b, family, 128), minhash(a, family, 128)));
    }
}

TEST_CASE("estimate_jaccard at similarity 0.5: 1000 seeded pairs") {
    // exact J confirmed with the oracle; estimates within 0.15 for >= 99%
    // of pairs and unbiased in the mean
    double sum = 0.0;
    int outliers = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto [a, b] = pair_with_similarity("h" + std::to_string(trial), 20, 10);
        REQUIRE(exact_jaccard(a, b) == 0.5);
        HashFamily family{static_cast<std::uint64_t>(9000 + trial)};
        double est = estimate_jaccard(minhash(a, family, 128), minhash(b, family, 128));
        sum += est;
        if (std::abs(est - 0.5) > 0.15) ++outliers;
    }
    CHECK(outliers <= 10);
    CHECK(std::abs(sum / 1000.0 - 0.5) <= 0.02);
}

TEST_CASE("estimate_jaccard expectation matches exact similarity per level") {
    // mean over 1000 seeded trials within 2*sqrt(s(1-s)/num_perms) of s
    const unsigned num_perms = 128;
    for (int level = 1; level <= 9; ++level) {
        double s = level / 10.0;
        auto shared = static_cast<std::size_t>(level * 2);  // union fixed at 20
        auto extra = static_cast<std::size_t>(20 - shared) / 2;
        double sum = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            auto [a, b] =
                pair_with_similarity("e" + std::to_string(level) + "_" + std::to_string(trial),
                                     shared, extra);
            REQUIRE(exact_jaccard(a, b) == doctest::Approx(s));
            HashFamily family{static_cast<std::uint64_t>(77000 + level * 1000 + trial)};
            sum += estimate_jaccard(minhash(a, family, num_perms), minhash(b, family, num_perms));
        }
        double mean = sum / 1000.0;
        double tolerance = 2.0 * std::sqrt(s * (1.0 - s) / num_perms);
        CHECK(std::abs(mean - s) <= tolerance);
    }
}

TEST_CASE("signature caches round-trip and reject stale parameters") {
    HashFamily family{123};
    ConceptIndex index = kbclean::testing::random_corpus(55, 20, 200, 5, 15);
    auto bit_sigs = kbclean::testing::simhash_all(index, family, 128);
    auto min_sigs = kbclean::testing::minhash_all(index, family, 64);

    auto dir = std::filesystem::temp_directory_path() / "kbclean-test-sigcache";
    std::filesystem::create_directories(dir);

    save_bit_signature_cache(dir / "sim.tsv", bit_sigs, WeightTransform::raw);
    auto bit_loaded = load_bit_signature_cache(dir / "sim.tsv", 128, 123, WeightTransform::raw);
    REQUIRE(bit_loaded.size() == bit_sigs.size());
    for (const BitSignature& sig : bit_sigs) {
        CHECK(bit_loaded.at(sig.concept_name) == sig);
    }
    CHECK(load_bit_signature_cache(dir / "sim.tsv", 64, 123, WeightTransform::raw).empty());
    CHECK(load_bit_signature_cache(dir / "sim.tsv", 128, 124, WeightTransform::raw).empty());
    CHECK(load_bit_signature_cache(dir / "sim.tsv", 128, 123, WeightTransform::log).empty());

    save_min_signature_cache(dir / "min.tsv", min_sigs);
    auto min_loaded = load_min_signature_cache(dir / "min.tsv", 64, 123);
    REQUIRE(min_loaded.size() == min_sigs.size());
    for (const MinSignature& sig : min_sigs) {
        CHECK(min_loaded.at(sig.concept_name) == sig);
    }
    CHECK(load_min_signature_cache(dir / "min.tsv", 128, 123).empty());
    CHECK(load_min_signature_cache(dir / "missing.tsv", 64, 123).empty());

    std::filesystem::remove_all(dir);
}
