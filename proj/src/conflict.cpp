#include "kbclean/conflict.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "kbclean/hashing.hpp"

namespace kbclean {

namespace {

void require_band_params(std::size_t num_perms, const JoinParams& p) {
    if (p.num_bands == 0 || num_perms % p.num_bands != 0) {
        throw std::invalid_argument("lsh_bucketize: num_bands must divide num_perms");
    }
    if (p.bucket_count < 2) {
        throw std::invalid_argument("lsh_bucketize: bucket_count must be >= 2");
    }
}

void require_uniform(const std::vector<MinSignature>& sigs) {
    for (std::size_t i = 1; i < sigs.size(); ++i) {
        if (sigs[i].values.size() != sigs[0].values.size() || sigs[i].seed != sigs[0].seed) {
            throw std::invalid_argument("jaccard join: mixed signature parameters");
        }
    }
}

void require_uniform(const std::vector<BitSignature>& sigs) {
    for (std::size_t i = 1; i < sigs.size(); ++i) {
        if (sigs[i].width != sigs[0].width) {
            throw std::invalid_argument("hamming_join: mixed signature widths");
        }
        if (sigs[i].seed != sigs[0].seed) {
            throw std::invalid_argument("hamming_join: mixed signature seeds");
        }
    }
}

ConflictPair make_pair_record(const std::string& x, const std::string& y) {
    ConflictPair cp;
    if (x < y) {
        cp.concept_a = x;
        cp.concept_b = y;
    } else {
        cp.concept_a = y;
        cp.concept_b = x;
    }
    return cp;
}

void sort_pairs(std::vector<ConflictPair>& pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const ConflictPair& a, const ConflictPair& b) {
        if (a.concept_a != b.concept_a) return a.concept_a < b.concept_a;
        return a.concept_b < b.concept_b;
    });
}

// bits [start, start+len) of the signature as one value, len <= 64
std::uint64_t extract_bits(const std::vector<std::uint64_t>& words, unsigned start, unsigned len) {
    unsigned word = start / 64;
    unsigned off = start % 64;
    std::uint64_t v = words[word] >> off;
    if (off + len > 64 && word + 1 < words.size()) {
        v |= words[word + 1] << (64 - off);
    }
    if (len < 64) v &= (1ULL << len) - 1;
    return v;
}

}  // namespace

std::vector<std::uint64_t> band_buckets(const MinSignature& sig, const JoinParams& p) {
    require_band_params(sig.values.size(), p);
    const unsigned rows = static_cast<unsigned>(sig.values.size()) / p.num_bands;
    std::vector<std::uint64_t> buckets(p.num_bands);
    for (unsigned b = 0; b < p.num_bands; ++b) {
        std::uint64_t h = mix64(kGolden ^ (b + 1));
        for (unsigned r = 0; r < rows; ++r) {
            h = mix64(h ^ sig.values[b * rows + r]);
        }
        buckets[b] = h % p.bucket_count;
    }
    return buckets;
}

std::set<IndexPair> lsh_bucketize(const std::vector<MinSignature>& sigs, const JoinParams& p) {
    require_uniform(sigs);
    if (!sigs.empty()) require_band_params(sigs[0].values.size(), p);

    std::set<IndexPair> candidates;
    if (sigs.size() < 2) return candidates;

    std::vector<std::vector<std::uint64_t>> buckets(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) buckets[i] = band_buckets(sigs[i], p);

    for (unsigned b = 0; b < p.num_bands; ++b) {
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < sigs.size(); ++i) {
            groups[buckets[i][b]].push_back(i);
        }
        for (const auto& [_, members] : groups) {
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) {
                    candidates.emplace(members[x], members[y]);
                }
            }
        }
    }
    return candidates;
}

// Conflicts are the pairs at LARGE distance, so the multi-index is used to
// find and exclude the near pairs: with hamming_min blocks, any pair at
// distance < hamming_min must agree exactly on some block (pigeonhole), so it
// collides in that block's table and gets distance-verified. Everything that
// never verified near is a conflict.
std::vector<ConflictPair> hamming_join(const std::vector<BitSignature>& sigs,
                                       const JoinParams& p) {
    require_uniform(sigs);
    std::vector<ConflictPair> out;
    if (sigs.size() < 2) return out;

    const unsigned width = sigs[0].width;
    if (p.hamming_min > width) return out;  // no pair can reach the threshold

    const std::size_t n = sigs.size();
    std::unordered_set<std::uint64_t> near;
    if (p.hamming_min > 0) {
        const unsigned blocks = p.hamming_min;
        std::unordered_set<std::uint64_t> checked;
        for (unsigned b = 0; b < blocks; ++b) {
            const unsigned lo = static_cast<unsigned>((static_cast<std::uint64_t>(b) * width) / blocks);
            const unsigned hi = static_cast<unsigned>((static_cast<std::uint64_t>(b + 1) * width) / blocks);
            std::unordered_map<std::uint64_t, std::vector<std::size_t>> table;
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t key = mix64(kGolden ^ b);
                for (unsigned pos = lo; pos < hi; pos += 64) {
                    unsigned len = std::min(64u, hi - pos);
                    key = mix64(key ^ extract_bits(sigs[i].words, pos, len) ^ len);
                }
                table[key].push_back(i);
            }
            for (const auto& [_, members] : table) {
                for (std::size_t x = 0; x < members.size(); ++x) {
                    for (std::size_t y = x + 1; y < members.size(); ++y) {
                        std::uint64_t id = members[x] * n + members[y];
                        if (!checked.insert(id).second) continue;
                        if (hamming(sigs[members[x]], sigs[members[y]]) < p.hamming_min) {
                            near.insert(id);
                        }
                    }
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (near.contains(i * n + j)) continue;
            unsigned d = hamming(sigs[i], sigs[j]);
            if (d < p.hamming_min) continue;  // unreachable; kept as the exactness guard
            ConflictPair cp = make_pair_record(sigs[i].concept_name, sigs[j].concept_name);
            cp.found_by = kFoundByHamming;
            cp.hamming_distance = d;
            out.push_back(std::move(cp));
        }
    }
    sort_pairs(out);
    return out;
}

std::vector<ConflictPair> jaccard_join(const std::vector<MinSignature>& sigs,
                                       const ConceptIndex& sets, const JoinParams& p) {
    require_uniform(sigs);
    if (!sigs.empty()) require_band_params(sigs[0].values.size(), p);

    // joinable signatures: present in the index and large enough
    std::vector<std::size_t> joinable;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        auto it = sets.find(sigs[i].concept_name);
        if (it == sets.end()) {
            throw std::invalid_argument("jaccard_join: no concept set for signature '" +
                                        sigs[i].concept_name + "'");
        }
        if (it->second.size() >= p.min_set_size) joinable.push_back(i);
    }

    std::vector<ConflictPair> out;
    if (joinable.size() < 2) return out;

    // blocking scope: only pairs sharing an instance can have the non-empty
    // intersection the repair stage works on
    std::unordered_map<std::string_view, std::vector<std::size_t>> postings;
    for (std::size_t idx : joinable) {
        for (const auto& [instance, _] : sets.at(sigs[idx].concept_name).members) {
            postings[instance].push_back(idx);
        }
    }
    std::set<IndexPair> scope;
    for (const auto& [_, holders] : postings) {
        for (std::size_t x = 0; x < holders.size(); ++x) {
            for (std::size_t y = x + 1; y < holders.size(); ++y) {
                scope.emplace(std::min(holders[x], holders[y]), std::max(holders[x], holders[y]));
            }
        }
    }
    if (scope.empty()) return out;

    std::vector<std::vector<std::uint64_t>> buckets(sigs.size());
    for (std::size_t idx : joinable) buckets[idx] = band_buckets(sigs[idx], p);

    for (const auto& [i, j] : scope) {
        bool collide = false;
        for (unsigned b = 0; b < p.num_bands && !collide; ++b) {
            collide = buckets[i][b] == buckets[j][b];
        }
        if (!collide) continue;

        double est = estimate_jaccard(sigs[i], sigs[j]);
        if (est > p.jaccard_max) continue;

        const ConceptSet& a = sets.at(sigs[i].concept_name);
        const ConceptSet& b = sets.at(sigs[j].concept_name);
        std::size_t overlap = 0;
        for (auto ia = a.members.begin(), ib = b.members.begin();
             ia != a.members.end() && ib != b.members.end();) {
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
        double containment =
            static_cast<double>(overlap) / static_cast<double>(std::min(a.size(), b.size()));
        if (containment >= p.subset_guard) continue;  // nested vocabularies, not a conflict

        ConflictPair cp = make_pair_record(a.name, b.name);
        cp.found_by = kFoundByJaccard;
        cp.jaccard_estimate = est;
        out.push_back(std::move(cp));
    }
    sort_pairs(out);
    return out;
}

std::vector<ConflictPair> combine(const std::vector<ConflictPair>& s_h,
                                  const std::vector<ConflictPair>& s_j) {
    std::map<std::pair<std::string, std::string>, ConflictPair> merged;
    auto absorb = [&merged](const ConflictPair& cp) {
        auto key = std::pair(cp.concept_a, cp.concept_b);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(std::move(key), cp);
            return;
        }
        it->second.found_by |= cp.found_by;
        if (!it->second.hamming_distance) it->second.hamming_distance = cp.hamming_distance;
        if (!it->second.jaccard_estimate) it->second.jaccard_estimate = cp.jaccard_estimate;
    };
    for (const ConflictPair& cp : s_h) absorb(cp);
    for (const ConflictPair& cp : s_j) absorb(cp);

    std::vector<ConflictPair> out;
    out.reserve(merged.size());
    for (auto& [_, cp] : merged) out.push_back(std::move(cp));
    return out;
}

std::string found_by_label(unsigned mask) {
    switch (mask & (kFoundByHamming | kFoundByJaccard)) {
        case kFoundByHamming: return "hamming";
        case kFoundByJaccard: return "jaccard";
        case kFoundByHamming | kFoundByJaccard: return "hamming+jaccard";
        default: return "none";
    }
}

void write_conflicts_tsv(std::ostream& out, const std::vector<ConflictPair>& pairs) {
    out << "# concept_a\tconcept_b\tfound_by\thamming\tjaccard_est\n";
    char buf[32];
    for (const ConflictPair& cp : pairs) {
        out << cp.concept_a << '\t' << cp.concept_b << '\t' << found_by_label(cp.found_by) << '\t';
        if (cp.hamming_distance) {
            out << *cp.hamming_distance;
        } else {
            out << '-';
        }
        out << '\t';
        if (cp.jaccard_estimate) {
            std::snprintf(buf, sizeof buf, "%.6f", *cp.jaccard_estimate);
            out << buf;
        } else {
            out << '-';
        }
        out << '\n';
    }
}

}  // namespace kbclean
