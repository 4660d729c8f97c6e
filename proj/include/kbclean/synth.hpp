#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbclean/kb.hpp"

namespace kbclean {

// Synthetic KB with disjoint per-concept vocabularies plus planted wrong
// triples and planted homonyms, emitted with ground truth.
struct SynthSpec {
    unsigned concepts = 200;
    unsigned min_instances = 80;   // per concept, inclusive range
    unsigned max_instances = 120;
    double weight1_share = 0.653;  // share of weight-1 triples
    double tail_exponent = 1.6;    // power-law tail for weights > 1
    std::uint64_t max_weight = 5000;
    double error_rate = 0.01;      // planted wrong triples per base triple
    double homonym_rate = 0.0;     // planted homonyms per base triple
    std::uint64_t big_weight = 100;  // plants target these classifier gates
    std::uint64_t low_weight = 5;
    std::uint64_t seed = 1;
};

// A planted triple: the copy that landed in `concept_name` plus the source
// relation it was copied from.
struct PlantedTriple {
    std::string concept_name;
    std::string instance;
    std::uint64_t weight = 0;
    std::string source_concept;
    std::uint64_t source_weight = 0;
};

struct SynthResult {
    KnowledgeBase kb;
    std::vector<PlantedTriple> planted_errors;    // the ground truth
    std::vector<PlantedTriple> planted_homonyms;  // legitimate double senses
};

SynthResult generate_synthetic(const SynthSpec& spec);

void write_planted_tsv(std::ostream& out, const std::vector<PlantedTriple>& planted);

}  // namespace kbclean
