#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kbclean/hashing.hpp"
#include "kbclean/kb.hpp"

namespace kbclean {

// How instance weights enter the SimHash vote. Raw frequencies let the
// heaviest instances dominate; log damping flattens the heavy tail.
enum class WeightTransform { raw, log };

std::string_view to_string(WeightTransform t);

// Weighted SimHash fingerprint of one concept set.
struct BitSignature {
    std::string concept_name;
    unsigned width = 64;  // bits, one of {64, 128, 256}
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> words;  // width/64 words, bit i = words[i/64] >> (i%64)

    bool bit(unsigned i) const { return (words[i / 64] >> (i % 64)) & 1u; }

    friend bool operator==(const BitSignature&, const BitSignature&) = default;
};

// MinHash signature: per-permutation minima over the instance strings.
// Weights do not enter; every member counts once.
struct MinSignature {
    std::string concept_name;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> values;

    friend bool operator==(const MinSignature&, const MinSignature&) = default;
};

// Weighted Charikar construction: each member votes +w on bit positions where
// its hash bit is 1 and -w where it is 0; the signature bit is 1 iff the sum
// is positive (an exact zero resolves to 0).
BitSignature simhash(const ConceptSet& set, const HashFamily& family, unsigned width,
                     WeightTransform transform = WeightTransform::raw);

// popcount of the XOR; both signatures must have the same width
unsigned hamming(const BitSignature& x, const BitSignature& y);

MinSignature minhash(const ConceptSet& set, const HashFamily& family, unsigned num_perms);

// Fraction of agreeing positions; unbiased estimator of Jaccard similarity.
// Signatures must come from the same family and permutation count.
double estimate_jaccard(const MinSignature& x, const MinSignature& y);

// --- signature cache ------------------------------------------------------
// One record per concept, hex-encoded. The header pins algorithm, seed and
// parameters; a cache written under different settings loads as empty.

void save_bit_signature_cache(const std::filesystem::path& file,
                              const std::vector<BitSignature>& sigs,
                              WeightTransform transform);
std::map<std::string, BitSignature> load_bit_signature_cache(
    const std::filesystem::path& file, unsigned width, std::uint64_t seed,
    WeightTransform transform);

void save_min_signature_cache(const std::filesystem::path& file,
                              const std::vector<MinSignature>& sigs);
std::map<std::string, MinSignature> load_min_signature_cache(
    const std::filesystem::path& file, unsigned num_perms, std::uint64_t seed);

}  // namespace kbclean
