#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kbclean {

// One IsA assertion: `instance` belongs to `concept_name`, observed `weight`
// times in the source corpus.
struct Triple {
    std::string concept_name;
    std::string instance;
    std::uint64_t weight = 1;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

// A concept together with the weighted map of every instance linked to it.
struct ConceptSet {
    std::string name;
    std::map<std::string, std::uint64_t> members;  // instance -> weight

    std::size_t size() const { return members.size(); }
    std::uint64_t total_weight() const;
};

// Immutable after ingestion; triples sorted by (concept, instance), one entry
// per pair (duplicate input lines merge by weight summation).
struct KnowledgeBase {
    std::vector<Triple> triples;

    std::size_t size() const { return triples.size(); }
    bool empty() const { return triples.empty(); }
    bool contains(std::string_view concept_name, std::string_view instance) const;

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

struct ParseIssue {
    std::size_t line = 0;  // 1-based input line number
    std::string message;
};

// Rejected lines are reported, not fatal; an empty stream is a valid KB.
struct ParseResult {
    KnowledgeBase kb;
    std::vector<ParseIssue> issues;
};

using ConceptIndex = std::map<std::string, ConceptSet>;

struct SharedInstance {
    std::string instance;
    std::uint64_t weight_a = 0;
    std::uint64_t weight_b = 0;

    friend bool operator==(const SharedInstance&, const SharedInstance&) = default;
};

// Inclusive weight range [lo, hi]; open-ended when hi is absent.
struct WeightBucket {
    std::uint64_t lo = 1;
    std::optional<std::uint64_t> hi;

    bool contains(std::uint64_t w) const { return w >= lo && (!hi || w <= *hi); }
    std::string label() const;
};

// trim + ASCII lower-case; multi-byte UTF-8 passes through untouched
std::string normalize_term(std::string_view raw);

// TSV `concept<TAB>instance<TAB>weight`; '#'-prefixed comment lines and blank
// lines are skipped; malformed or non-positive-weight lines are rejected and
// reported with their line number.
ParseResult parse_triples(std::istream& input);

ConceptIndex build_concept_sets(const KnowledgeBase& kb);

// inverse of build_concept_sets; used by the round-trip checks and the repair
// stage when writing the cleansed KB back out
std::vector<Triple> flatten(const ConceptIndex& index);

// Instances present in both sets, each with both weights, sorted by instance.
// The two sets must belong to different concepts.
std::vector<SharedInstance> intersection(const ConceptSet& a, const ConceptSet& b);

// Share of triples per weight bucket, in percent. Buckets must partition
// [1, inf): first lo == 1, contiguous, last open-ended.
std::vector<std::pair<WeightBucket, double>> frequency_histogram(
    const KnowledgeBase& kb, const std::vector<WeightBucket>& buckets);

void write_kb_tsv(std::ostream& out, const KnowledgeBase& kb);

}  // namespace kbclean
