#include "kbclean/signature.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kbclean {

namespace {

// Stream-id spaces for the two signature kinds. Keeping them disjoint means a
// shared family seed never reuses a hash function across kinds.
constexpr std::uint64_t kSimStreamBase = 0x53494d0000000000ULL;
constexpr std::uint64_t kMinStreamBase = 0x4d494e0000000000ULL;

void require_width(unsigned width) {
    if (width != 64 && width != 128 && width != 256) {
        throw std::invalid_argument("simhash: width must be 64, 128 or 256");
    }
}

}  // namespace

std::string_view to_string(WeightTransform t) {
    return t == WeightTransform::raw ? "raw" : "log";
}

BitSignature simhash(const ConceptSet& set, const HashFamily& family, unsigned width,
                     WeightTransform transform) {
    require_width(width);
    if (set.members.empty()) {
        throw std::invalid_argument("simhash: empty concept set '" + set.name + "'");
    }

    const unsigned words = width / 64;
    std::vector<double> vote(width, 0.0);
    for (const auto& [instance, weight] : set.members) {
        double w = transform == WeightTransform::raw
                       ? static_cast<double>(weight)
                       : 1.0 + std::log2(static_cast<double>(weight));
        for (unsigned j = 0; j < words; ++j) {
            std::uint64_t h = family.hash(instance, kSimStreamBase + j);
            for (unsigned b = 0; b < 64; ++b) {
                vote[j * 64 + b] += (h >> b) & 1u ? w : -w;
            }
        }
    }

    BitSignature sig;
    sig.concept_name = set.name;
    sig.width = width;
    sig.seed = family.seed;
    sig.words.assign(words, 0);
    for (unsigned i = 0; i < width; ++i) {
        if (vote[i] > 0.0) sig.words[i / 64] |= 1ULL << (i % 64);
    }
    return sig;
}

unsigned hamming(const BitSignature& x, const BitSignature& y) {
    if (x.width != y.width || x.words.size() != y.words.size()) {
        throw std::invalid_argument("hamming: signature widths differ");
    }
    unsigned d = 0;
    for (std::size_t i = 0; i < x.words.size(); ++i) {
        d += static_cast<unsigned>(std::popcount(x.words[i] ^ y.words[i]));
    }
    return d;
}

MinSignature minhash(const ConceptSet& set, const HashFamily& family, unsigned num_perms) {
    if (num_perms == 0) throw std::invalid_argument("minhash: num_perms must be >= 1");
    if (set.members.empty()) {
        throw std::invalid_argument("minhash: empty concept set '" + set.name + "'");
    }

    MinSignature sig;
    sig.concept_name = set.name;
    sig.seed = family.seed;
    sig.values.assign(num_perms, ~0ULL);
    for (const auto& [instance, _] : set.members) {
        for (unsigned i = 0; i < num_perms; ++i) {
            std::uint64_t h = family.hash(instance, kMinStreamBase + i);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinSignature& x, const MinSignature& y) {
    if (x.values.size() != y.values.size()) {
        throw std::invalid_argument("estimate_jaccard: permutation counts differ");
    }
    if (x.seed != y.seed) {
        throw std::invalid_argument("estimate_jaccard: signatures from different seeds");
    }
    if (x.values.empty()) return 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (x.values[i] == y.values[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(x.values.size());
}

// --- signature cache ------------------------------------------------------

namespace {

constexpr std::string_view kCacheMagic = "kbclean-sigcache v1";

std::string hex_words(const std::vector<std::uint64_t>& words) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(words.size() * 16);
    for (std::uint64_t w : words) {
        for (int shift = 60; shift >= 0; shift -= 4) {
            out.push_back(digits[(w >> shift) & 0xf]);
        }
    }
    return out;
}

bool parse_hex_words(std::string_view hex, std::size_t count, std::vector<std::uint64_t>& out) {
    if (hex.size() != count * 16) return false;
    out.assign(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t w = 0;
        auto chunk = hex.substr(i * 16, 16);
        auto [ptr, ec] = std::from_chars(chunk.data(), chunk.data() + 16, w, 16);
        if (ec != std::errc() || ptr != chunk.data() + 16) return false;
        out[i] = w;
    }
    return true;
}

}  // namespace

void save_bit_signature_cache(const std::filesystem::path& file,
                              const std::vector<BitSignature>& sigs,
                              WeightTransform transform) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write signature cache: " + file.string());
    out << kCacheMagic << " kind=simhash algo=" << HashFamily::algorithm;
    if (!sigs.empty()) {
        out << " seed=" << sigs.front().seed << " width=" << sigs.front().width
            << " transform=" << to_string(transform);
    }
    out << '\n';
    for (const BitSignature& s : sigs) {
        out << s.concept_name << '\t' << hex_words(s.words) << '\n';
    }
}

std::map<std::string, BitSignature> load_bit_signature_cache(
    const std::filesystem::path& file, unsigned width, std::uint64_t seed,
    WeightTransform transform) {
    std::map<std::string, BitSignature> out;
    std::ifstream in(file);
    if (!in) return out;

    std::string header;
    if (!std::getline(in, header)) return out;
    std::ostringstream expected;
    expected << kCacheMagic << " kind=simhash algo=" << HashFamily::algorithm
             << " seed=" << seed << " width=" << width
             << " transform=" << to_string(transform);
    if (header != expected.str()) return out;  // parameters differ: recompute

    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        BitSignature sig;
        sig.concept_name = line.substr(0, tab);
        sig.width = width;
        sig.seed = seed;
        if (!parse_hex_words(std::string_view(line).substr(tab + 1), width / 64, sig.words)) {
            continue;
        }
        out[sig.concept_name] = std::move(sig);
    }
    return out;
}

void save_min_signature_cache(const std::filesystem::path& file,
                              const std::vector<MinSignature>& sigs) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write signature cache: " + file.string());
    out << kCacheMagic << " kind=minhash algo=" << HashFamily::algorithm;
    if (!sigs.empty()) {
        out << " seed=" << sigs.front().seed << " perms=" << sigs.front().values.size();
    }
    out << '\n';
    for (const MinSignature& s : sigs) {
        out << s.concept_name << '\t' << hex_words(s.values) << '\n';
    }
}

std::map<std::string, MinSignature> load_min_signature_cache(
    const std::filesystem::path& file, unsigned num_perms, std::uint64_t seed) {
    std::map<std::string, MinSignature> out;
    std::ifstream in(file);
    if (!in) return out;

    std::string header;
    if (!std::getline(in, header)) return out;
    std::ostringstream expected;
    expected << kCacheMagic << " kind=minhash algo=" << HashFamily::algorithm
             << " seed=" << seed << " perms=" << num_perms;
    if (header != expected.str()) return out;

    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        MinSignature sig;
        sig.concept_name = line.substr(0, tab);
        sig.seed = seed;
        if (!parse_hex_words(std::string_view(line).substr(tab + 1), num_perms, sig.values)) {
            continue;
        }
        out[sig.concept_name] = std::move(sig);
    }
    return out;
}

}  // namespace kbclean
