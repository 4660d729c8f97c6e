#include "kbclean/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace kbclean {

namespace {

void require_desk_scale(std::size_t n) {
    if (n > kNaiveJoinLimit) {
        throw std::runtime_error("naive_conflict_join: refusing " + std::to_string(n) +
                                 " sets (limit " + std::to_string(kNaiveJoinLimit) + ")");
    }
}

std::size_t key_overlap(const ConceptSet& a, const ConceptSet& b) {
    std::size_t overlap = 0;
    auto ia = a.members.begin();
    auto ib = b.members.begin();
    while (ia != a.members.end() && ib != b.members.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            ++overlap;
            ++ia;
            ++ib;
        }
    }
    return overlap;
}

}  // namespace

double exact_jaccard(const ConceptSet& a, const ConceptSet& b) {
    if (a.members.empty() || b.members.empty()) {
        throw std::invalid_argument("exact_jaccard: empty concept set");
    }
    std::size_t overlap = key_overlap(a, b);
    std::size_t uni = a.size() + b.size() - overlap;
    return static_cast<double>(overlap) / static_cast<double>(uni);
}

std::vector<ConflictPair> naive_hamming_join(const std::vector<BitSignature>& sigs,
                                             const JoinParams& p) {
    require_desk_scale(sigs.size());
    std::vector<ConflictPair> out;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        for (std::size_t j = i + 1; j < sigs.size(); ++j) {
            unsigned d = hamming(sigs[i], sigs[j]);
            if (d < p.hamming_min) continue;
            ConflictPair cp;
            if (sigs[i].concept_name < sigs[j].concept_name) {
                cp.concept_a = sigs[i].concept_name;
                cp.concept_b = sigs[j].concept_name;
            } else {
                cp.concept_a = sigs[j].concept_name;
                cp.concept_b = sigs[i].concept_name;
            }
            cp.found_by = kFoundByHamming;
            cp.hamming_distance = d;
            out.push_back(std::move(cp));
        }
    }
    std::sort(out.begin(), out.end(), [](const ConflictPair& a, const ConflictPair& b) {
        if (a.concept_a != b.concept_a) return a.concept_a < b.concept_a;
        return a.concept_b < b.concept_b;
    });
    return out;
}

std::vector<ConflictPair> naive_jaccard_join(const ConceptIndex& sets, const JoinParams& p) {
    require_desk_scale(sets.size());
    std::vector<const ConceptSet*> joinable;
    for (const auto& [_, set] : sets) {
        if (set.size() >= p.min_set_size) joinable.push_back(&set);
    }

    std::vector<ConflictPair> out;
    for (std::size_t i = 0; i < joinable.size(); ++i) {
        for (std::size_t j = i + 1; j < joinable.size(); ++j) {
            const ConceptSet& a = *joinable[i];
            const ConceptSet& b = *joinable[j];
            std::size_t overlap = key_overlap(a, b);
            if (overlap == 0) continue;  // empty intersection: nothing to repair
            double similarity = static_cast<double>(overlap) /
                                static_cast<double>(a.size() + b.size() - overlap);
            if (similarity > p.jaccard_max) continue;
            double containment = static_cast<double>(overlap) /
                                 static_cast<double>(std::min(a.size(), b.size()));
            if (containment >= p.subset_guard) continue;
            ConflictPair cp;
            cp.concept_a = a.name;  // ConceptIndex iterates in name order
            cp.concept_b = b.name;
            cp.found_by = kFoundByJaccard;
            cp.jaccard_estimate = similarity;
            out.push_back(std::move(cp));
        }
    }
    return out;
}

std::vector<ConflictPair> naive_conflict_join(const ConceptIndex& sets, JoinMetric metric,
                                              const JoinParams& p, const HashFamily& family,
                                              unsigned simhash_bits, WeightTransform transform) {
    require_desk_scale(sets.size());
    if (metric == JoinMetric::jaccard) return naive_jaccard_join(sets, p);

    std::vector<BitSignature> sigs;
    for (const auto& [_, set] : sets) {
        if (set.size() >= p.min_set_size) {
            sigs.push_back(simhash(set, family, simhash_bits, transform));
        }
    }
    return naive_hamming_join(sigs, p);
}

EvalReport evaluate_planted(const std::set<TripleKey>& ground_truth,
                            const std::set<TripleKey>& detected) {
    EvalReport report;
    for (const TripleKey& key : detected) {
        if (ground_truth.contains(key)) {
            ++report.true_positives;
        } else {
            ++report.false_positives;
        }
    }
    report.false_negatives = ground_truth.size() - report.true_positives;
    if (report.true_positives + report.false_positives > 0) {
        report.precision = static_cast<double>(report.true_positives) /
                           static_cast<double>(report.true_positives + report.false_positives);
    }
    if (report.true_positives + report.false_negatives > 0) {
        report.recall = static_cast<double>(report.true_positives) /
                        static_cast<double>(report.true_positives + report.false_negatives);
    }
    return report;
}

namespace {

std::string ratio_or_dash(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

}  // namespace

void write_eval_tsv(std::ostream& out, const EvalReport& report) {
    out << "# tp\tfp\tfn\tprecision\trecall\n";
    out << report.true_positives << '\t' << report.false_positives << '\t'
        << report.false_negatives << '\t' << ratio_or_dash(report.precision) << '\t'
        << ratio_or_dash(report.recall) << '\n';
}

void write_eval_summary(std::ostream& out, const EvalReport& report) {
    out << "planted-error evaluation\n"
        << "  true positives:  " << report.true_positives << '\n'
        << "  false positives: " << report.false_positives << '\n'
        << "  false negatives: " << report.false_negatives << '\n'
        << "  precision:       " << ratio_or_dash(report.precision) << '\n'
        << "  recall:          " << ratio_or_dash(report.recall) << '\n';
}

std::set<std::pair<std::string, std::string>> pair_keys(const std::vector<ConflictPair>& pairs) {
    std::set<std::pair<std::string, std::string>> keys;
    for (const ConflictPair& cp : pairs) keys.emplace(cp.concept_a, cp.concept_b);
    return keys;
}

}  // namespace kbclean
