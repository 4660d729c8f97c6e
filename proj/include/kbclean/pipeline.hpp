#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbclean/conflict.hpp"
#include "kbclean/repair.hpp"
#include "kbclean/signature.hpp"

namespace kbclean {

enum class DetectMethod { hamming, jaccard, combined };

std::string_view to_string(DetectMethod m);

// Everything one `clean` run depends on. (input, config, seed) determines
// every output byte except timings.tsv.
struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir;
    DetectMethod method = DetectMethod::combined;
    unsigned simhash_bits = 64;
    unsigned num_perms = 128;
    unsigned num_bands = 32;
    unsigned bucket_count = 128;
    std::optional<unsigned> hamming_min;  // default: round(0.45 * simhash_bits)
    double jaccard_max = 0.01;
    double subset_guard = 0.8;
    std::uint64_t big_weight = 100;  // B
    std::uint64_t low_weight = 5;    // L
    std::uint64_t min_differential = 0;
    unsigned min_set_size = 2;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    WeightTransform weight_transform = WeightTransform::raw;
    std::filesystem::path signature_cache;  // directory; empty disables caching
};

unsigned resolved_hamming_min(const RunConfig& cfg);
JoinParams join_params(const RunConfig& cfg);

// All violations at once, so a bad invocation reports everything in one go.
std::vector<std::string> validate(const RunConfig& cfg);

class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& message)
        : std::runtime_error(message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct StageTiming {
    std::string stage;
    double millis = 0.0;
};

struct PipelineMetrics {
    std::map<std::string, std::uint64_t> counts;
    std::vector<StageTiming> timings;
};

// ingest -> signatures -> joins -> combine -> repair; writes config.tsv,
// conflicts.tsv, errors.tsv, homonyms.tsv, suskb.tsv, repaired.tsv,
// differential.tsv, metrics.tsv and timings.tsv under output_dir.
PipelineMetrics run_pipeline(const RunConfig& cfg);

struct SweepRow {
    std::string label;
    bool ok = false;
    std::string error;  // set when !ok
    PipelineMetrics metrics;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

// One pipeline run per axis value on the same input and seed; a failing point
// is recorded and the sweep continues. Per-point outputs land in
// output_dir/<label>/, the table in output_dir/sweep.tsv.
SweepResult sweep_bucket_count(const RunConfig& base, const std::vector<unsigned>& values);
SweepResult sweep_jaccard_max(const RunConfig& base, const std::vector<double>& values);
SweepResult sweep_bl_grid(const RunConfig& base, const std::vector<std::uint64_t>& big_values,
                          const std::vector<std::uint64_t>& low_values);

void write_sweep_tsv(std::ostream& out, const SweepResult& result);

}  // namespace kbclean
