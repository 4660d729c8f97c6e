#pragma once

// shared helpers for the test binaries

#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "kbclean/hashing.hpp"
#include "kbclean/kb.hpp"
#include "kbclean/signature.hpp"

namespace kbclean::testing {

inline ConceptSet make_set(std::string name,
                           std::initializer_list<std::pair<const char*, std::uint64_t>> members) {
    ConceptSet set;
    set.name = std::move(name);
    for (const auto& [instance, weight] : members) set.members[instance] = weight;
    return set;
}

inline KnowledgeBase kb_from(const std::string& tsv) {
    std::istringstream in(tsv);
    return parse_triples(in).kb;
}

// Concept sets drawn from a shared instance pool, so pairs span the whole
// similarity range from disjoint to heavily overlapping.
inline ConceptIndex random_corpus(std::uint64_t seed, std::size_t n_sets, std::size_t pool,
                                  std::size_t min_size, std::size_t max_size,
                                  std::uint64_t max_weight = 1000) {
    Rng rng(mix64(seed ^ 0xC0DE5EEDULL));
    ConceptIndex index;
    for (std::size_t s = 0; s < n_sets; ++s) {
        ConceptSet set;
        set.name = "set" + std::to_string(s);
        std::size_t target = min_size + rng.below(max_size - min_size + 1);
        while (set.members.size() < target) {
            std::string instance = "w" + std::to_string(rng.below(pool));
            set.members.emplace(std::move(instance), 1 + rng.below(max_weight));
        }
        index.emplace(set.name, std::move(set));
    }
    return index;
}

inline std::vector<BitSignature> simhash_all(const ConceptIndex& index, const HashFamily& family,
                                             unsigned width) {
    std::vector<BitSignature> sigs;
    for (const auto& [_, set] : index) sigs.push_back(simhash(set, family, width));
    return sigs;
}

inline std::vector<MinSignature> minhash_all(const ConceptIndex& index, const HashFamily& family,
                                             unsigned num_perms) {
    std::vector<MinSignature> sigs;
    for (const auto& [_, set] : index) sigs.push_back(minhash(set, family, num_perms));
    return sigs;
}

// A pair of sets with exact Jaccard similarity  shared / (shared + 2 * extra),
// on instance strings unique to `tag`.
inline std::pair<ConceptSet, ConceptSet> pair_with_similarity(const std::string& tag,
                                                              std::size_t shared,
                                                              std::size_t extra) {
    ConceptSet a;
    ConceptSet b;
    a.name = tag + "_a";
    b.name = tag + "_b";
    for (std::size_t i = 0; i < shared; ++i) {
        std::string instance = tag + "_s" + std::to_string(i);
        a.members[instance] = 1;
        b.members[instance] = 1;
    }
    for (std::size_t i = 0; i < extra; ++i) {
        a.members[tag + "_x" + std::to_string(i)] = 1;
        b.members[tag + "_y" + std::to_string(i)] = 1;
    }
    return {std::move(a), std::move(b)};
}

}  // namespace kbclean::testing
