#include "kbclean/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "kbclean/hashing.hpp"

namespace kbclean {

namespace {

std::string padded(std::string_view prefix, unsigned value) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05u", value);
    return std::string(prefix) + buf;
}

void validate(const SynthSpec& spec) {
    if (spec.concepts < 1) throw std::invalid_argument("generate_synthetic: need >= 1 concept");
    if (spec.min_instances < 1 || spec.max_instances < spec.min_instances) {
        throw std::invalid_argument("generate_synthetic: bad instances-per-concept range");
    }
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(spec.weight1_share) || !rate_ok(spec.error_rate) || !rate_ok(spec.homonym_rate)) {
        throw std::invalid_argument("generate_synthetic: rates must be in [0, 1]");
    }
    if (spec.tail_exponent <= 1.0) {
        throw std::invalid_argument("generate_synthetic: tail_exponent must exceed 1");
    }
    if (spec.low_weight < 1 || spec.big_weight <= spec.low_weight) {
        throw std::invalid_argument("generate_synthetic: thresholds must satisfy big > low >= 1");
    }
    if (spec.max_weight <= spec.big_weight) {
        throw std::invalid_argument("generate_synthetic: max_weight must exceed big_weight");
    }
    if ((spec.error_rate > 0.0 || spec.homonym_rate > 0.0) && spec.concepts < 2) {
        throw std::invalid_argument("generate_synthetic: planting needs >= 2 concepts");
    }
    if (spec.error_rate > 0.0 && spec.low_weight < 2) {
        throw std::invalid_argument(
            "generate_synthetic: planting errors below low_weight needs low_weight >= 2");
    }
}

std::uint64_t draw_weight(Rng& rng, const SynthSpec& spec) {
    if (rng.unit() < spec.weight1_share) return 1;
    // truncated Pareto tail on [2, max_weight]
    double u = rng.unit();
    if (u <= 0.0) u = 0x1.0p-53;
    double w = 2.0 * std::pow(u, -1.0 / (spec.tail_exponent - 1.0));
    auto value = static_cast<std::uint64_t>(w);
    if (value < 2) value = 2;
    if (value > spec.max_weight) value = spec.max_weight;
    return value;
}

}  // namespace

SynthResult generate_synthetic(const SynthSpec& spec) {
    validate(spec);
    Rng rng(mix64(spec.seed ^ 0x53594e5448ULL));

    SynthResult result;
    std::vector<std::string> concepts;
    concepts.reserve(spec.concepts);
    for (unsigned c = 0; c < spec.concepts; ++c) concepts.push_back(padded("c", c + 1));

    // base KB: one disjoint vocabulary per concept
    std::map<std::string, std::map<std::string, std::uint64_t>> base;
    struct Source {
        std::size_t concept_idx;
        std::string instance;
        std::uint64_t weight;
    };
    std::vector<Source> heavy;  // relations trusted by the classifier (> big)
    std::uint64_t base_triples = 0;
    for (std::size_t c = 0; c < concepts.size(); ++c) {
        unsigned span = spec.max_instances - spec.min_instances + 1;
        unsigned count = spec.min_instances + static_cast<unsigned>(rng.below(span));
        auto& members = base[concepts[c]];
        for (unsigned i = 0; i < count; ++i) {
            std::string instance = concepts[c] + "_" + padded("i", i + 1);
            std::uint64_t w = draw_weight(rng, spec);
            members.emplace(std::move(instance), w);
        }
        base_triples += count;
        for (const auto& [instance, w] : members) {
            if (w > spec.big_weight) heavy.push_back({c, instance, w});
        }
    }

    const auto n_errors = static_cast<std::uint64_t>(std::llround(spec.error_rate * static_cast<double>(base_triples)));
    const auto n_homonyms = static_cast<std::uint64_t>(std::llround(spec.homonym_rate * static_cast<double>(base_triples)));

    // make sure plants have trusted sources to copy from
    while (heavy.empty() && (n_errors > 0 || n_homonyms > 0)) {
        std::size_t c = rng.below(concepts.size());
        auto& members = base[concepts[c]];
        std::size_t pick = rng.below(members.size());
        auto it = std::next(members.begin(), static_cast<std::ptrdiff_t>(pick));
        it->second = spec.big_weight + 1 + rng.below(spec.max_weight - spec.big_weight);
        heavy.push_back({c, it->first, it->second});
    }

    std::set<std::pair<std::string, std::string>> planted_keys;
    auto plant = [&](bool as_error) -> bool {
        for (unsigned attempt = 0; attempt < 1000; ++attempt) {
            const Source& src = heavy[rng.below(heavy.size())];
            std::size_t victim = rng.below(concepts.size());
            if (victim == src.concept_idx) continue;
            const std::string& target = concepts[victim];
            if (planted_keys.contains({target, src.instance})) continue;

            std::uint64_t w;
            if (as_error) {
                // low tail, mostly singletons, always below the low gate
                w = rng.unit() < 0.75 ? 1 : 2 + rng.below(spec.low_weight - 2 + 1);
                if (w >= spec.low_weight) w = spec.low_weight - 1;
            } else {
                w = spec.big_weight + 1 + rng.below(spec.max_weight - spec.big_weight);
            }
            planted_keys.emplace(target, src.instance);
            PlantedTriple planted{target, src.instance, w, concepts[src.concept_idx], src.weight};
            if (as_error) {
                result.planted_errors.push_back(std::move(planted));
            } else {
                result.planted_homonyms.push_back(std::move(planted));
            }
            return true;
        }
        return false;
    };

    for (std::uint64_t k = 0; k < n_errors; ++k) {
        if (!plant(true)) break;
    }
    for (std::uint64_t k = 0; k < n_homonyms; ++k) {
        if (!plant(false)) break;
    }

    for (const auto& [concept_name, members] : base) {
        for (const auto& [instance, w] : members) {
            result.kb.triples.push_back({concept_name, instance, w});
        }
    }
    for (const PlantedTriple& planted : result.planted_errors) {
        result.kb.triples.push_back({planted.concept_name, planted.instance, planted.weight});
    }
    for (const PlantedTriple& planted : result.planted_homonyms) {
        result.kb.triples.push_back({planted.concept_name, planted.instance, planted.weight});
    }
    std::sort(result.kb.triples.begin(), result.kb.triples.end());
    return result;
}

void write_planted_tsv(std::ostream& out, const std::vector<PlantedTriple>& planted) {
    out << "# concept\tinstance\tweight\tsource_concept\tsource_weight\n";
    std::vector<const PlantedTriple*> rows;
    rows.reserve(planted.size());
    for (const PlantedTriple& p : planted) rows.push_back(&p);
    std::sort(rows.begin(), rows.end(), [](const PlantedTriple* a, const PlantedTriple* b) {
        if (a->concept_name != b->concept_name) return a->concept_name < b->concept_name;
        return a->instance < b->instance;
    });
    for (const PlantedTriple* p : rows) {
        out << p->concept_name << '\t' << p->instance << '\t' << p->weight << '\t'
            << p->source_concept << '\t' << p->source_weight << '\n';
    }
}

}  // namespace kbclean
