#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kbclean/kb.hpp"
#include "kbclean/signature.hpp"

namespace kbclean {

inline constexpr unsigned kFoundByHamming = 1u;
inline constexpr unsigned kFoundByJaccard = 2u;

// Unordered pair of concepts judged conflicting, with the method(s) that
// found it. A distance field is present exactly when its method is set.
struct ConflictPair {
    std::string concept_a;  // concept_a < concept_b
    std::string concept_b;
    unsigned found_by = 0;  // mask of kFoundBy*
    std::optional<unsigned> hamming_distance;
    std::optional<double> jaccard_estimate;

    friend bool operator==(const ConflictPair&, const ConflictPair&) = default;
};

struct JoinParams {
    unsigned hamming_min = 29;     // conflict iff Hamming distance >= this
    unsigned num_bands = 32;       // must divide num_perms
    unsigned bucket_count = 128;   // band-hash modulus, >= 2
    double jaccard_max = 0.01;     // conflict iff estimated similarity <= this
    double subset_guard = 0.8;     // suppress pair when overlap/min-size >= this
    unsigned min_set_size = 2;     // sets smaller than this do not join
};

using IndexPair = std::pair<std::size_t, std::size_t>;

// Per-band bucket ids for one signature: the band's row slice hashed, then
// reduced modulo bucket_count. The pre-modulus key does not depend on
// bucket_count, so bucket collisions nest across moduli 64 | 128 | 256.
std::vector<std::uint64_t> band_buckets(const MinSignature& sig, const JoinParams& p);

// LSH candidate generation: pairs (as indices into `sigs`, i < j) that share
// at least one band bucket.
std::set<IndexPair> lsh_bucketize(const std::vector<MinSignature>& sigs, const JoinParams& p);

// S_H: exactly the pairs at Hamming distance >= hamming_min. Near pairs are
// found through a block multi-index and verified exactly, so the output
// equals the naive all-pairs join.
std::vector<ConflictPair> hamming_join(const std::vector<BitSignature>& sigs,
                                       const JoinParams& p);

// S_J: pairs that share at least one instance (only those can have the
// non-empty intersection repair needs), survive LSH candidate generation,
// estimate at most jaccard_max similar, and are not near-subsets of each
// other.
std::vector<ConflictPair> jaccard_join(const std::vector<MinSignature>& sigs,
                                       const ConceptIndex& sets, const JoinParams& p);

// S = S_H union S_J, with found_by and distance fields merged per pair.
std::vector<ConflictPair> combine(const std::vector<ConflictPair>& s_h,
                                  const std::vector<ConflictPair>& s_j);

std::string found_by_label(unsigned mask);

// `concept_a<TAB>concept_b<TAB>found_by<TAB>hamming<TAB>jaccard_est`, sorted
void write_conflicts_tsv(std::ostream& out, const std::vector<ConflictPair>& pairs);

}  // namespace kbclean
