#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kbclean/conflict.hpp"
#include "kbclean/kb.hpp"
#include "kbclean/signature.hpp"

namespace kbclean {

// Brute-force reference implementations. Correctness anchors for the fast
// joins and the planted-error evaluation; never a performance path.

inline constexpr std::size_t kNaiveJoinLimit = 5000;

enum class JoinMetric { hamming, jaccard };

// |A ∩ B| / |A ∪ B| over instance keys; weights ignored. Both sets non-empty.
double exact_jaccard(const ConceptSet& a, const ConceptSet& b);

// All-pairs Hamming join on the given signatures; same threshold as the fast
// path. Refuses more than kNaiveJoinLimit signatures.
std::vector<ConflictPair> naive_hamming_join(const std::vector<BitSignature>& sigs,
                                             const JoinParams& p);

// All-pairs Jaccard join with exact similarities: same blocking scope
// (shared instance), threshold and subset guard as the fast path, but no LSH
// candidate sampling and no estimation.
std::vector<ConflictPair> naive_jaccard_join(const ConceptIndex& sets, const JoinParams& p);

// Exhaustive join over the concept sets with the requested metric. For the
// Hamming metric the signatures are recomputed from (family, simhash_bits,
// transform), which reproduces the fast path's signatures bit for bit.
std::vector<ConflictPair> naive_conflict_join(const ConceptIndex& sets, JoinMetric metric,
                                              const JoinParams& p, const HashFamily& family,
                                              unsigned simhash_bits,
                                              WeightTransform transform = WeightTransform::raw);

using TripleKey = std::pair<std::string, std::string>;  // (concept, instance)

struct EvalReport {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
    std::optional<double> precision;  // absent when nothing was detected
    std::optional<double> recall;     // absent when nothing was planted

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate_planted(const std::set<TripleKey>& ground_truth,
                            const std::set<TripleKey>& detected);

// single-line TSV plus a short human-readable block
void write_eval_tsv(std::ostream& out, const EvalReport& report);
void write_eval_summary(std::ostream& out, const EvalReport& report);

std::set<std::pair<std::string, std::string>> pair_keys(const std::vector<ConflictPair>& pairs);

}  // namespace kbclean
