#include "kbclean/kb.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace kbclean {

std::uint64_t ConceptSet::total_weight() const {
    std::uint64_t sum = 0;
    for (const auto& [_, w] : members) sum += w;
    return sum;
}

bool KnowledgeBase::contains(std::string_view concept_name, std::string_view instance) const {
    auto it = std::lower_bound(
        triples.begin(), triples.end(), std::pair(concept_name, instance),
        [](const Triple& t, const std::pair<std::string_view, std::string_view>& key) {
            if (t.concept_name != key.first) return t.concept_name < key.first;
            return t.instance < key.second;
        });
    return it != triples.end() && it->concept_name == concept_name && it->instance == instance;
}

std::string WeightBucket::label() const {
    if (hi && *hi == lo) return std::to_string(lo);
    if (!hi) {
        if (lo == 1) return ">=1";
        return ">" + std::to_string(lo - 1);
    }
    return std::to_string(lo) + "-" + std::to_string(*hi);
}

std::string normalize_term(std::string_view raw) {
    const char* ws = " \t\r\n\f\v";
    auto begin = raw.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    auto end = raw.find_last_not_of(ws);
    std::string out(raw.substr(begin, end - begin + 1));
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

namespace {

bool parse_weight(std::string_view field, std::uint64_t& out, std::string& err) {
    std::string trimmed = normalize_term(field);
    if (trimmed.empty()) {
        err = "missing weight";
        return false;
    }
    if (trimmed[0] == '-') {
        err = "non-positive weight";
        return false;
    }
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
    if (ec == std::errc::result_out_of_range) {
        err = "weight out of range";
        return false;
    }
    if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
        err = "weight is not an integer";
        return false;
    }
    if (value == 0) {
        err = "non-positive weight";
        return false;
    }
    out = value;
    return true;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) return ~0ULL;
    return r;
}

}  // namespace

ParseResult parse_triples(std::istream& input) {
    ParseResult result;
    std::map<std::string, std::map<std::string, std::uint64_t>> grouped;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;

        auto tab1 = line.find('\t');
        auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        auto tab3 = tab2 == std::string::npos ? std::string::npos : line.find('\t', tab2 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab3 != std::string::npos) {
            result.issues.push_back({line_no, "expected 3 tab-separated columns"});
            continue;
        }

        std::string concept_name = normalize_term(std::string_view(line).substr(0, tab1));
        std::string instance = normalize_term(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
        if (concept_name.empty() || instance.empty()) {
            result.issues.push_back({line_no, "empty concept or instance"});
            continue;
        }

        std::uint64_t weight = 0;
        std::string err;
        if (!parse_weight(std::string_view(line).substr(tab2 + 1), weight, err)) {
            result.issues.push_back({line_no, err});
            continue;
        }

        auto& w = grouped[concept_name][instance];
        w = saturating_add(w, weight);
    }

    for (auto& [concept_name, members] : grouped) {
        for (auto& [instance, weight] : members) {
            result.kb.triples.push_back({concept_name, instance, weight});
        }
    }
    return result;
}

ConceptIndex build_concept_sets(const KnowledgeBase& kb) {
    ConceptIndex index;
    for (const Triple& t : kb.triples) {
        auto [it, inserted] = index.try_emplace(t.concept_name);
        if (inserted) it->second.name = t.concept_name;
        it->second.members[t.instance] += t.weight;
    }
    return index;
}

std::vector<Triple> flatten(const ConceptIndex& index) {
    std::vector<Triple> out;
    for (const auto& [name, set] : index) {
        for (const auto& [instance, weight] : set.members) {
            out.push_back({name, instance, weight});
        }
    }
    return out;
}

std::vector<SharedInstance> intersection(const ConceptSet& a, const ConceptSet& b) {
    if (a.name == b.name) {
        throw std::invalid_argument("intersection: both sides are concept '" + a.name + "'");
    }
    std::vector<SharedInstance> out;
    auto ia = a.members.begin();
    auto ib = b.members.begin();
    while (ia != a.members.end() && ib != b.members.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            out.push_back({ia->first, ia->second, ib->second});
            ++ia;
            ++ib;
        }
    }
    return out;
}

std::vector<std::pair<WeightBucket, double>> frequency_histogram(
    const KnowledgeBase& kb, const std::vector<WeightBucket>& buckets) {
    if (buckets.empty()) throw std::invalid_argument("frequency_histogram: no buckets");
    if (buckets.front().lo != 1) {
        throw std::invalid_argument("frequency_histogram: buckets must start at weight 1");
    }
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const auto& b = buckets[i];
        bool last = i + 1 == buckets.size();
        if (!last) {
            if (!b.hi) throw std::invalid_argument("frequency_histogram: open-ended bucket before the end");
            if (*b.hi < b.lo) throw std::invalid_argument("frequency_histogram: bucket hi < lo");
            if (buckets[i + 1].lo != *b.hi + 1) {
                throw std::invalid_argument("frequency_histogram: buckets must be contiguous");
            }
        } else if (b.hi) {
            throw std::invalid_argument("frequency_histogram: last bucket must be open-ended");
        }
    }

    std::vector<std::uint64_t> counts(buckets.size(), 0);
    for (const Triple& t : kb.triples) {
        for (std::size_t i = 0; i < buckets.size(); ++i) {
            if (buckets[i].contains(t.weight)) {
                ++counts[i];
                break;
            }
        }
    }

    std::vector<std::pair<WeightBucket, double>> out;
    double total = static_cast<double>(kb.triples.size());
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        double pct = total > 0 ? 100.0 * static_cast<double>(counts[i]) / total : 0.0;
        out.emplace_back(buckets[i], pct);
    }
    return out;
}

void write_kb_tsv(std::ostream& out, const KnowledgeBase& kb) {
    out << "# concept\tinstance\tweight\n";
    for (const Triple& t : kb.triples) {
        out << t.concept_name << '\t' << t.instance << '\t' << t.weight << '\n';
    }
}

}  // namespace kbclean
