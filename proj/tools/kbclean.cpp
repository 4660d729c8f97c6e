// kbclean: detect and repair wrong IsA triples by joining conflicting
// concept sets. Subcommands: clean, gen, sweep, eval.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include "kbclean/oracle.hpp"
#include "kbclean/pipeline.hpp"
#include "kbclean/synth.hpp"

namespace {

using namespace kbclean;

void add_run_options(CLI::App& cmd, RunConfig& cfg, std::string& method,
                     std::string& transform, unsigned& hamming_min_flag) {
    cmd.add_option("--input", cfg.input, "input KB, TSV concept<TAB>instance<TAB>weight")
        ->required()
        ->envname("KBCLEAN_INPUT");
    cmd.add_option("--output-dir", cfg.output_dir, "directory for report files")
        ->required()
        ->envname("KBCLEAN_OUTPUT_DIR");
    cmd.add_option("--method", method, "hamming | jaccard | combined (default combined)")
        ->check(CLI::IsMember({"hamming", "jaccard", "combined"}))
        ->envname("KBCLEAN_METHOD");
    cmd.add_option("--simhash-bits", cfg.simhash_bits, "SimHash width: 64, 128 or 256")
        ->envname("KBCLEAN_SIMHASH_BITS");
    cmd.add_option("--num-perms", cfg.num_perms, "MinHash permutations (default 128)")
        ->envname("KBCLEAN_NUM_PERMS");
    cmd.add_option("--num-bands", cfg.num_bands, "LSH bands; must divide num-perms")
        ->envname("KBCLEAN_NUM_BANDS");
    cmd.add_option("--bucket-count", cfg.bucket_count, "LSH band-hash modulus (default 128)")
        ->envname("KBCLEAN_BUCKET_COUNT");
    cmd.add_option("--hamming-min", hamming_min_flag,
                   "conflict threshold on Hamming distance (default round(0.45*simhash-bits))")
        ->envname("KBCLEAN_HAMMING_MIN");
    cmd.add_option("--jaccard-max", cfg.jaccard_max,
                   "conflict ceiling on estimated Jaccard similarity (default 0.01)")
        ->envname("KBCLEAN_JACCARD_MAX");
    cmd.add_option("--subset-guard", cfg.subset_guard,
                   "suppress pairs with overlap/min-size at or above this (default 0.8)")
        ->envname("KBCLEAN_SUBSET_GUARD");
    cmd.add_option("--B", cfg.big_weight, "trusted-weight threshold B (default 100)")
        ->envname("KBCLEAN_B");
    cmd.add_option("--L", cfg.low_weight, "negligible-weight threshold L (default 5)")
        ->envname("KBCLEAN_L");
    cmd.add_option("--min-differential", cfg.min_differential,
                   "extra max-min gate before an Error verdict (default 0 = off)")
        ->envname("KBCLEAN_MIN_DIFFERENTIAL");
    cmd.add_option("--min-set-size", cfg.min_set_size,
                   "smallest concept set that joins (default 2)")
        ->envname("KBCLEAN_MIN_SET_SIZE");
    cmd.add_option("--seed", cfg.seed, "hash-family seed (default 1)")->envname("KBCLEAN_SEED");
    cmd.add_option("--workers", cfg.workers, "worker threads (default 1)")
        ->envname("KBCLEAN_WORKERS");
    cmd.add_option("--weight-transform", transform, "raw | log (default raw)")
        ->check(CLI::IsMember({"raw", "log"}))
        ->envname("KBCLEAN_WEIGHT_TRANSFORM");
    cmd.add_option("--signature-cache", cfg.signature_cache,
                   "cache directory for signatures; reused when parameters match")
        ->envname("KBCLEAN_SIGNATURE_CACHE");
}

void finish_run_config(RunConfig& cfg, const std::string& method, const std::string& transform,
                       const CLI::App& cmd, unsigned hamming_min_flag) {
    if (method == "hamming") cfg.method = DetectMethod::hamming;
    if (method == "jaccard") cfg.method = DetectMethod::jaccard;
    if (method == "combined") cfg.method = DetectMethod::combined;
    cfg.weight_transform = transform == "log" ? WeightTransform::log : WeightTransform::raw;
    if (cmd.count("--hamming-min")) cfg.hamming_min = hamming_min_flag;
}

std::set<TripleKey> read_triple_keys(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::set<TripleKey> keys;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto tab1 = line.find('\t');
        if (tab1 == std::string::npos) continue;
        auto tab2 = line.find('\t', tab1 + 1);
        auto second_end = tab2 == std::string::npos ? line.size() : tab2;
        keys.emplace(normalize_term(std::string_view(line).substr(0, tab1)),
                     normalize_term(std::string_view(line).substr(tab1 + 1, second_end - tab1 - 1)));
    }
    return keys;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kbclean: IsA knowledge-base cleansing via conflicting concept sets"};
    app.require_subcommand(1);

    // clean
    RunConfig run_cfg;
    std::string run_method = "combined";
    std::string run_transform = "raw";
    unsigned run_hamming_min = 0;
    CLI::App* clean = app.add_subcommand("clean", "run the full detect-and-repair pipeline");
    add_run_options(*clean, run_cfg, run_method, run_transform, run_hamming_min);

    // gen
    SynthSpec synth;
    std::filesystem::path gen_dir;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic KB with planted errors");
    gen->add_option("--output-dir", gen_dir, "directory for kb.tsv and ground_truth.tsv")
        ->required()
        ->envname("KBCLEAN_OUTPUT_DIR");
    gen->add_option("--concepts", synth.concepts, "concept count (default 200)");
    gen->add_option("--min-instances", synth.min_instances, "min instances per concept");
    gen->add_option("--max-instances", synth.max_instances, "max instances per concept");
    gen->add_option("--weight1-share", synth.weight1_share,
                    "share of weight-1 triples (default 0.653)");
    gen->add_option("--tail-exponent", synth.tail_exponent,
                    "power-law exponent for weights > 1 (default 1.6)");
    gen->add_option("--max-weight", synth.max_weight, "weight cap (default 5000)");
    gen->add_option("--error-rate", synth.error_rate,
                    "planted wrong triples per base triple (default 0.01)");
    gen->add_option("--homonym-rate", synth.homonym_rate,
                    "planted homonyms per base triple (default 0)");
    gen->add_option("--B", synth.big_weight, "trusted-weight threshold plants aim above");
    gen->add_option("--L", synth.low_weight, "negligible-weight threshold plants aim below");
    gen->add_option("--seed", synth.seed, "generator seed (default 1)")->envname("KBCLEAN_SEED");

    // sweep
    RunConfig sweep_cfg;
    std::string sweep_method = "combined";
    std::string sweep_transform = "raw";
    unsigned sweep_hamming_min = 0;
    std::string axis;
    std::vector<unsigned> bucket_values{64, 128, 256};
    std::vector<double> jaccard_values{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<std::uint64_t> big_values{50, 100, 200};
    std::vector<std::uint64_t> low_values{2, 5, 10};
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the pipeline across one parameter axis");
    add_run_options(*sweep_cmd, sweep_cfg, sweep_method, sweep_transform, sweep_hamming_min);
    sweep_cmd->add_option("--axis", axis, "bucket-count | jaccard-max | bl-grid")
        ->required()
        ->check(CLI::IsMember({"bucket-count", "jaccard-max", "bl-grid"}));
    sweep_cmd->add_option("--bucket-values", bucket_values, "bucket-count axis values")
        ->delimiter(',');
    sweep_cmd->add_option("--jaccard-values", jaccard_values, "jaccard-max axis values")
        ->delimiter(',');
    sweep_cmd->add_option("--b-values", big_values, "B values for the bl-grid axis")
        ->delimiter(',');
    sweep_cmd->add_option("--l-values", low_values, "L values for the bl-grid axis")
        ->delimiter(',');

    // eval
    std::filesystem::path truth_file;
    std::filesystem::path detected_file;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "score detected errors against planted ground truth");
    eval_cmd->add_option("--ground-truth", truth_file, "planted-error file from gen")->required();
    eval_cmd->add_option("--detected", detected_file, "errors.tsv from clean")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*clean) {
            finish_run_config(run_cfg, run_method, run_transform, *clean, run_hamming_min);
            run_pipeline(run_cfg);
            return 0;
        }
        if (*gen) {
            SynthResult result = generate_synthetic(synth);
            std::filesystem::create_directories(gen_dir);
            auto write = [&](const char* name, auto&& writer) {
                std::ofstream out(gen_dir / name, std::ios::trunc);
                if (!out) throw std::runtime_error("cannot write " + (gen_dir / name).string());
                writer(out);
            };
            write("kb.tsv", [&](std::ostream& o) { write_kb_tsv(o, result.kb); });
            write("ground_truth.tsv",
                  [&](std::ostream& o) { write_planted_tsv(o, result.planted_errors); });
            write("planted_homonyms.tsv",
                  [&](std::ostream& o) { write_planted_tsv(o, result.planted_homonyms); });
            std::fprintf(stderr, "[gen] %zu triples, %zu planted errors, %zu planted homonyms\n",
                         result.kb.size(), result.planted_errors.size(),
                         result.planted_homonyms.size());
            return 0;
        }
        if (*sweep_cmd) {
            finish_run_config(sweep_cfg, sweep_method, sweep_transform, *sweep_cmd,
                              sweep_hamming_min);
            SweepResult result;
            if (axis == "bucket-count") {
                result = sweep_bucket_count(sweep_cfg, bucket_values);
            } else if (axis == "jaccard-max") {
                result = sweep_jaccard_max(sweep_cfg, jaccard_values);
            } else {
                result = sweep_bl_grid(sweep_cfg, big_values, low_values);
            }
            write_sweep_tsv(std::cout, result);
            for (const SweepRow& row : result.rows) {
                if (!row.ok) return 1;
            }
            return 0;
        }
        if (*eval_cmd) {
            EvalReport report =
                evaluate_planted(read_triple_keys(truth_file), read_triple_keys(detected_file));
            write_eval_tsv(std::cout, report);
            write_eval_summary(std::cout, report);
            return 0;
        }
    } catch (const PipelineError& e) {
        std::fprintf(stderr, "error [%s]: %s\n", e.stage().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
