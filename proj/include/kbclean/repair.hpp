#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kbclean/conflict.hpp"
#include "kbclean/kb.hpp"

namespace kbclean {

// B and L from the repair definitions: weights above `big` are trusted,
// weights below `low` are negligible. min_differential additionally requires
// max-min to reach the gate before an Error verdict (0 = off).
struct RepairThresholds {
    std::uint64_t big = 100;
    std::uint64_t low = 5;
    std::uint64_t min_differential = 0;
};

enum class Verdict {
    error_in_a,     // the a-side triple is wrong
    error_in_b,     // the b-side triple is wrong
    homonym,        // both senses trusted; annotate, keep both
    suspicious,     // both weights negligible; export for review
    indeterminate,  // matches no definition; export for review, never delete
};

std::string_view to_string(Verdict v);

// One instance from the intersection of a conflicting pair, labeled.
struct ClassifiedRelation {
    std::string concept_a;  // concept_a < concept_b, as in the pair
    std::string concept_b;
    std::string instance;
    std::uint64_t weight_a = 0;
    std::uint64_t weight_b = 0;
    Verdict verdict = Verdict::indeterminate;
};

// Exactly one verdict per weight pair:
//   homonym        iff min > B
//   error          iff max > B and min < L (and max-min >= min_differential);
//                  the smaller-weight side is the wrong one
//   suspicious     iff max < L
//   indeterminate  otherwise
Verdict classify(std::uint64_t w_a, std::uint64_t w_b, const RepairThresholds& t);

// Classify every instance in intersection(a, b); sorted by instance.
std::vector<ClassifiedRelation> classify_pair(const ConflictPair& pair,
                                              const ConceptIndex& index,
                                              const RepairThresholds& t);

// errors.tsv / suskb.tsv row: a triple plus the other side as evidence
struct EvidencedTriple {
    std::string concept_name;
    std::string instance;
    std::uint64_t weight = 0;
    std::string other_concept;
    std::uint64_t other_weight = 0;

    friend auto operator<=>(const EvidencedTriple&, const EvidencedTriple&) = default;
};

struct SuskbRow {
    EvidencedTriple triple;
    Verdict flag = Verdict::suspicious;  // suspicious or indeterminate

    friend auto operator<=>(const SuskbRow&, const SuskbRow&) = default;
};

// One surviving sense of a homonym instance, annotated `instance#concept`.
struct HomonymSense {
    std::string instance;
    std::string concept_name;
    std::uint64_t weight = 0;

    friend auto operator<=>(const HomonymSense&, const HomonymSense&) = default;
};

struct RepairOutput {
    KnowledgeBase repaired;                // input minus the error-side triples
    std::vector<EvidencedTriple> errors;   // deleted relations with evidence
    std::vector<HomonymSense> homonyms;    // annotated senses, kept in the KB
    std::vector<SuskbRow> suskb;           // too weak to adjudicate; kept in the KB
};

// Single-threaded reduction over the classification list. Idempotent: on the
// repaired KB the same pairs have empty intersections where triples were
// removed, so nothing further is deleted.
RepairOutput apply_repairs(const KnowledgeBase& kb,
                           const std::vector<ClassifiedRelation>& classifications);

// Half-open weight-difference range [lo, hi); open-ended when hi is absent.
struct WeightBand {
    std::uint64_t lo = 0;
    std::optional<std::uint64_t> hi;

    bool contains(std::uint64_t d) const { return d >= lo && (!hi || d < *hi); }
    std::string label() const;
};

// 100-500, 500-1000, 1000-1500, 1500-2000, >=2000
std::vector<WeightBand> default_differential_bands();

// Counts of intersection instances per (difference band, min weight), with
// min-weight columns 1..10 and >10.
struct DifferentialReport {
    std::vector<WeightBand> bands;
    std::vector<std::array<std::uint64_t, 11>> counts;  // one row per band
};

DifferentialReport differential_report(const std::vector<ClassifiedRelation>& classifications,
                                       const std::vector<WeightBand>& bands);

void write_errors_tsv(std::ostream& out, const std::vector<EvidencedTriple>& errors);
void write_homonyms_tsv(std::ostream& out, const std::vector<HomonymSense>& homonyms);
void write_suskb_tsv(std::ostream& out, const std::vector<SuskbRow>& rows);
void write_differential_tsv(std::ostream& out, const DifferentialReport& report);

}  // namespace kbclean
