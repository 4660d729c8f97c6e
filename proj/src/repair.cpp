#include "kbclean/repair.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

namespace kbclean {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::error_in_a:
        case Verdict::error_in_b: return "error";
        case Verdict::homonym: return "homonym";
        case Verdict::suspicious: return "suspicious";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Verdict classify(std::uint64_t w_a, std::uint64_t w_b, const RepairThresholds& t) {
    if (t.low < 1 || t.big <= t.low) {
        throw std::invalid_argument("classify: thresholds must satisfy big > low >= 1");
    }
    if (w_a < 1 || w_b < 1) {
        throw std::invalid_argument("classify: weights must be positive");
    }
    const std::uint64_t lo = std::min(w_a, w_b);
    const std::uint64_t hi = std::max(w_a, w_b);
    if (lo > t.big) return Verdict::homonym;
    if (hi > t.big && lo < t.low && hi - lo >= t.min_differential) {
        return w_a < w_b ? Verdict::error_in_a : Verdict::error_in_b;
    }
    if (hi < t.low) return Verdict::suspicious;
    return Verdict::indeterminate;
}

std::vector<ClassifiedRelation> classify_pair(const ConflictPair& pair,
                                              const ConceptIndex& index,
                                              const RepairThresholds& t) {
    auto ita = index.find(pair.concept_a);
    auto itb = index.find(pair.concept_b);
    if (ita == index.end() || itb == index.end()) {
        throw std::invalid_argument("classify_pair: unknown concept in pair " + pair.concept_a +
                                    " / " + pair.concept_b);
    }
    std::vector<ClassifiedRelation> out;
    for (const SharedInstance& shared : intersection(ita->second, itb->second)) {
        ClassifiedRelation rel;
        rel.concept_a = pair.concept_a;
        rel.concept_b = pair.concept_b;
        rel.instance = shared.instance;
        rel.weight_a = shared.weight_a;
        rel.weight_b = shared.weight_b;
        rel.verdict = classify(shared.weight_a, shared.weight_b, t);
        out.push_back(std::move(rel));
    }
    return out;
}

RepairOutput apply_repairs(const KnowledgeBase& kb,
                           const std::vector<ClassifiedRelation>& classifications) {
    RepairOutput out;

    auto require_triple = [&kb](const std::string& c, const std::string& i, std::uint64_t w) {
        Triple probe{c, i, w};
        auto it = std::lower_bound(kb.triples.begin(), kb.triples.end(), probe);
        if (it == kb.triples.end() || it->concept_name != c || it->instance != i ||
            it->weight != w) {
            throw std::invalid_argument("apply_repairs: classification references missing triple " +
                                        c + " / " + i);
        }
    };

    std::set<std::pair<std::string, std::string>> removed;
    std::set<EvidencedTriple> errors;
    std::set<HomonymSense> homonyms;
    std::set<SuskbRow> suskb;

    for (const ClassifiedRelation& rel : classifications) {
        require_triple(rel.concept_a, rel.instance, rel.weight_a);
        require_triple(rel.concept_b, rel.instance, rel.weight_b);
        switch (rel.verdict) {
            case Verdict::error_in_a:
                removed.emplace(rel.concept_a, rel.instance);
                errors.insert({rel.concept_a, rel.instance, rel.weight_a, rel.concept_b,
                               rel.weight_b});
                break;
            case Verdict::error_in_b:
                removed.emplace(rel.concept_b, rel.instance);
                errors.insert({rel.concept_b, rel.instance, rel.weight_b, rel.concept_a,
                               rel.weight_a});
                break;
            case Verdict::homonym:
                homonyms.insert({rel.instance, rel.concept_a, rel.weight_a});
                homonyms.insert({rel.instance, rel.concept_b, rel.weight_b});
                break;
            case Verdict::suspicious:
            case Verdict::indeterminate:
                suskb.insert({{rel.concept_a, rel.instance, rel.weight_a, rel.concept_b,
                               rel.weight_b},
                              rel.verdict});
                suskb.insert({{rel.concept_b, rel.instance, rel.weight_b, rel.concept_a,
                               rel.weight_a},
                              rel.verdict});
                break;
        }
    }

    for (const Triple& t : kb.triples) {
        if (!removed.contains({t.concept_name, t.instance})) {
            out.repaired.triples.push_back(t);
        }
    }
    out.errors.assign(errors.begin(), errors.end());
    out.homonyms.assign(homonyms.begin(), homonyms.end());
    // removed triples never appear in the review file
    for (const SuskbRow& row : suskb) {
        if (!removed.contains({row.triple.concept_name, row.triple.instance})) {
            out.suskb.push_back(row);
        }
    }
    return out;
}

std::string WeightBand::label() const {
    if (!hi) return ">=" + std::to_string(lo);
    return std::to_string(lo) + "-" + std::to_string(*hi);
}

std::vector<WeightBand> default_differential_bands() {
    return {{100, 500}, {500, 1000}, {1000, 1500}, {1500, 2000}, {2000, std::nullopt}};
}

DifferentialReport differential_report(const std::vector<ClassifiedRelation>& classifications,
                                       const std::vector<WeightBand>& bands) {
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (bands[i].hi && *bands[i].hi <= bands[i].lo) {
            throw std::invalid_argument("differential_report: band hi must exceed lo");
        }
        if (i + 1 < bands.size()) {
            if (!bands[i].hi || bands[i + 1].lo < *bands[i].hi) {
                throw std::invalid_argument("differential_report: bands must be ordered and disjoint");
            }
        }
    }

    DifferentialReport report;
    report.bands = bands;
    report.counts.assign(bands.size(), {});
    for (const ClassifiedRelation& rel : classifications) {
        const std::uint64_t lo = std::min(rel.weight_a, rel.weight_b);
        const std::uint64_t diff = std::max(rel.weight_a, rel.weight_b) - lo;
        for (std::size_t i = 0; i < bands.size(); ++i) {
            if (bands[i].contains(diff)) {
                std::size_t col = lo <= 10 ? static_cast<std::size_t>(lo - 1) : 10;
                ++report.counts[i][col];
                break;
            }
        }
    }
    return report;
}

void write_errors_tsv(std::ostream& out, const std::vector<EvidencedTriple>& errors) {
    out << "# concept\tinstance\tweight\tother_concept\tother_weight\n";
    for (const EvidencedTriple& e : errors) {
        out << e.concept_name << '\t' << e.instance << '\t' << e.weight << '\t'
            << e.other_concept << '\t' << e.other_weight << '\n';
    }
}

void write_homonyms_tsv(std::ostream& out, const std::vector<HomonymSense>& homonyms) {
    out << "# instance#concept\tweight\n";
    for (const HomonymSense& h : homonyms) {
        out << h.instance << '#' << h.concept_name << '\t' << h.weight << '\n';
    }
}

void write_suskb_tsv(std::ostream& out, const std::vector<SuskbRow>& rows) {
    out << "# concept\tinstance\tweight\tother_concept\tother_weight\tverdict\n";
    for (const SuskbRow& row : rows) {
        out << row.triple.concept_name << '\t' << row.triple.instance << '\t'
            << row.triple.weight << '\t' << row.triple.other_concept << '\t'
            << row.triple.other_weight << '\t' << to_string(row.flag) << '\n';
    }
}

void write_differential_tsv(std::ostream& out, const DifferentialReport& report) {
    out << "# difference_band\tmin_weight\tcount\n";
    for (std::size_t i = 0; i < report.bands.size(); ++i) {
        for (std::size_t col = 0; col < report.counts[i].size(); ++col) {
            out << report.bands[i].label() << '\t';
            if (col < 10) {
                out << (col + 1);
            } else {
                out << ">10";
            }
            out << '\t' << report.counts[i][col] << '\n';
        }
    }
}

}  // namespace kbclean
