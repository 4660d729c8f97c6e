#include "kbclean/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace kbclean {

namespace fs = std::filesystem;

std::string_view to_string(DetectMethod m) {
    switch (m) {
        case DetectMethod::hamming: return "hamming";
        case DetectMethod::jaccard: return "jaccard";
        case DetectMethod::combined: return "combined";
    }
    return "combined";
}

unsigned resolved_hamming_min(const RunConfig& cfg) {
    if (cfg.hamming_min) return *cfg.hamming_min;
    return static_cast<unsigned>(std::lround(0.45 * cfg.simhash_bits));
}

JoinParams join_params(const RunConfig& cfg) {
    JoinParams p;
    p.hamming_min = resolved_hamming_min(cfg);
    p.num_bands = cfg.num_bands;
    p.bucket_count = cfg.bucket_count;
    p.jaccard_max = cfg.jaccard_max;
    p.subset_guard = cfg.subset_guard;
    p.min_set_size = cfg.min_set_size;
    return p;
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> errors;
    if (cfg.simhash_bits != 64 && cfg.simhash_bits != 128 && cfg.simhash_bits != 256) {
        errors.push_back("simhash-bits must be 64, 128 or 256");
    }
    if (cfg.num_perms == 0) errors.push_back("num-perms must be >= 1");
    if (cfg.num_bands == 0 || cfg.num_perms % cfg.num_bands != 0) {
        errors.push_back("num-bands must divide num-perms");
    }
    if (cfg.bucket_count < 2) errors.push_back("bucket-count must be >= 2");
    if (cfg.jaccard_max < 0.0 || cfg.jaccard_max > 1.0) {
        errors.push_back("jaccard-max must be in [0, 1]");
    }
    if (cfg.subset_guard <= 0.0) errors.push_back("subset-guard must be positive");
    if (cfg.low_weight < 1 || cfg.big_weight <= cfg.low_weight) {
        errors.push_back("thresholds must satisfy B > L >= 1");
    }
    if (cfg.min_set_size < 1) errors.push_back("min-set-size must be >= 1");
    if (cfg.workers < 1) errors.push_back("workers must be >= 1");
    return errors;
}

namespace {

class StageClock {
public:
    explicit StageClock(PipelineMetrics& metrics) : metrics_(metrics) {}

    template <typename F>
    auto run(const std::string& stage, F&& body) {
        auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            finish(stage, start);
        } else {
            auto result = body();
            finish(stage, start);
            return result;
        }
    }

private:
    void finish(const std::string& stage,
                std::chrono::steady_clock::time_point start) {
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        metrics_.timings.push_back({stage, ms});
        std::fprintf(stderr, "[%s] done in %.1f ms\n", stage.c_str(), ms);
    }

    PipelineMetrics& metrics_;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_config_echo(const fs::path& file, const RunConfig& cfg) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw PipelineError("config", "cannot write " + file.string());
    out << "# key\tvalue\n";
    out << "input\t" << cfg.input.string() << '\n';
    out << "output-dir\t" << cfg.output_dir.string() << '\n';
    out << "method\t" << to_string(cfg.method) << '\n';
    out << "simhash-bits\t" << cfg.simhash_bits << '\n';
    out << "num-perms\t" << cfg.num_perms << '\n';
    out << "num-bands\t" << cfg.num_bands << '\n';
    out << "bucket-count\t" << cfg.bucket_count << '\n';
    out << "hamming-min\t" << resolved_hamming_min(cfg) << '\n';
    out << "jaccard-max\t" << format_double(cfg.jaccard_max) << '\n';
    out << "subset-guard\t" << format_double(cfg.subset_guard) << '\n';
    out << "B\t" << cfg.big_weight << '\n';
    out << "L\t" << cfg.low_weight << '\n';
    out << "min-differential\t" << cfg.min_differential << '\n';
    out << "min-set-size\t" << cfg.min_set_size << '\n';
    out << "seed\t" << cfg.seed << '\n';
    out << "workers\t" << cfg.workers << '\n';
    out << "weight-transform\t" << to_string(cfg.weight_transform) << '\n';
    out << "signature-cache\t" << cfg.signature_cache.string() << '\n';
}

// deterministic fan-out: slot i is computed from input i regardless of the
// worker count
template <typename In, typename Out, typename F>
std::vector<Out> parallel_map(const std::vector<In>& inputs, unsigned workers, F&& fn) {
    std::vector<Out> out(inputs.size());
    if (inputs.empty()) return out;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(inputs.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = fn(inputs[i]);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < inputs.size(); i += workers) out[i] = fn(inputs[i]);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

template <typename Sig, typename Compute, typename Load, typename Save>
std::vector<Sig> with_cache(const std::vector<const ConceptSet*>& sets, unsigned workers,
                            const fs::path& cache_file, Load&& load, Save&& save,
                            Compute&& compute) {
    std::map<std::string, Sig> cached;
    if (!cache_file.empty()) cached = load(cache_file);

    std::vector<const ConceptSet*> missing;
    for (const ConceptSet* set : sets) {
        if (!cached.contains(set->name)) missing.push_back(set);
    }
    std::vector<Sig> fresh = parallel_map<const ConceptSet*, Sig>(missing, workers, compute);
    for (Sig& sig : fresh) cached[sig.concept_name] = std::move(sig);

    std::vector<Sig> out;
    out.reserve(sets.size());
    for (const ConceptSet* set : sets) out.push_back(cached.at(set->name));
    if (!cache_file.empty()) save(cache_file, out);
    return out;
}

void write_file(const fs::path& file, const std::string& stage, auto&& writer) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw PipelineError(stage, "cannot write " + file.string());
    writer(out);
    out.flush();
    if (!out) throw PipelineError(stage, "write failed for " + file.string());
}

}  // namespace

PipelineMetrics run_pipeline(const RunConfig& cfg) {
    if (auto errors = validate(cfg); !errors.empty()) {
        std::string joined;
        for (const std::string& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw PipelineError("config", joined);
    }

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw PipelineError("config", "cannot create output dir " + cfg.output_dir.string() +
                                          ": " + ec.message());
    }
    if (!cfg.signature_cache.empty()) {
        fs::create_directories(cfg.signature_cache, ec);
        if (ec) {
            throw PipelineError("config", "cannot create cache dir " +
                                              cfg.signature_cache.string() + ": " + ec.message());
        }
    }
    write_config_echo(cfg.output_dir / "config.tsv", cfg);

    PipelineMetrics metrics;
    StageClock clock(metrics);
    const JoinParams params = join_params(cfg);
    const HashFamily family{cfg.seed};

    // ingest
    ParseResult parsed = clock.run("ingest", [&] {
        std::ifstream in(cfg.input);
        if (!in) throw PipelineError("ingest", "cannot open input " + cfg.input.string());
        ParseResult r = parse_triples(in);
        if (in.bad()) throw PipelineError("ingest", "read failed for " + cfg.input.string());
        return r;
    });
    for (const ParseIssue& issue : parsed.issues) {
        std::fprintf(stderr, "[ingest] line %zu rejected: %s\n", issue.line,
                     issue.message.c_str());
    }
    metrics.counts["triples_in"] = parsed.kb.size();
    metrics.counts["lines_rejected"] = parsed.issues.size();

    ConceptIndex index = build_concept_sets(parsed.kb);
    metrics.counts["concepts"] = index.size();

    std::vector<const ConceptSet*> joinable;
    for (const auto& [_, set] : index) {
        if (set.size() >= cfg.min_set_size) joinable.push_back(&set);
    }
    metrics.counts["sets_joined"] = joinable.size();

    const bool want_hamming =
        cfg.method == DetectMethod::hamming || cfg.method == DetectMethod::combined;
    const bool want_jaccard =
        cfg.method == DetectMethod::jaccard || cfg.method == DetectMethod::combined;

    // signatures
    std::vector<BitSignature> bit_sigs;
    std::vector<MinSignature> min_sigs;
    clock.run("signatures", [&] {
        if (want_hamming) {
            fs::path cache = cfg.signature_cache.empty() ? fs::path()
                                                         : cfg.signature_cache / "simhash.tsv";
            bit_sigs = with_cache<BitSignature>(
                joinable, cfg.workers, cache,
                [&](const fs::path& f) {
                    return load_bit_signature_cache(f, cfg.simhash_bits, cfg.seed,
                                                    cfg.weight_transform);
                },
                [&](const fs::path& f, const std::vector<BitSignature>& sigs) {
                    save_bit_signature_cache(f, sigs, cfg.weight_transform);
                },
                [&](const ConceptSet* set) {
                    return simhash(*set, family, cfg.simhash_bits, cfg.weight_transform);
                });
        }
        if (want_jaccard) {
            fs::path cache = cfg.signature_cache.empty() ? fs::path()
                                                         : cfg.signature_cache / "minhash.tsv";
            min_sigs = with_cache<MinSignature>(
                joinable, cfg.workers, cache,
                [&](const fs::path& f) {
                    return load_min_signature_cache(f, cfg.num_perms, cfg.seed);
                },
                [&](const fs::path& f, const std::vector<MinSignature>& sigs) {
                    save_min_signature_cache(f, sigs);
                },
                [&](const ConceptSet* set) { return minhash(*set, family, cfg.num_perms); });
        }
    });

    // joins
    std::vector<ConflictPair> s_h;
    std::vector<ConflictPair> s_j;
    std::vector<ConflictPair> conflicts = clock.run("join", [&] {
        if (want_hamming) s_h = hamming_join(bit_sigs, params);
        if (want_jaccard) s_j = jaccard_join(min_sigs, index, params);
        switch (cfg.method) {
            case DetectMethod::hamming: return s_h;
            case DetectMethod::jaccard: return s_j;
            case DetectMethod::combined: return combine(s_h, s_j);
        }
        return s_h;
    });
    metrics.counts["pairs_hamming"] = s_h.size();
    metrics.counts["pairs_jaccard"] = s_j.size();
    metrics.counts["pairs_conflict"] = conflicts.size();
    write_file(cfg.output_dir / "conflicts.tsv", "join",
               [&](std::ostream& out) { write_conflicts_tsv(out, conflicts); });

    // repair
    const RepairThresholds thresholds{cfg.big_weight, cfg.low_weight, cfg.min_differential};
    RepairOutput repair = clock.run("repair", [&] {
        std::vector<ClassifiedRelation> classifications;
        for (const ConflictPair& pair : conflicts) {
            auto batch = classify_pair(pair, index, thresholds);
            classifications.insert(classifications.end(), batch.begin(), batch.end());
        }
        std::uint64_t by_verdict[5] = {};
        for (const ClassifiedRelation& rel : classifications) {
            ++by_verdict[static_cast<int>(rel.verdict)];
        }
        metrics.counts["cls_error"] = by_verdict[0] + by_verdict[1];
        metrics.counts["cls_homonym"] = by_verdict[2];
        metrics.counts["cls_suspicious"] = by_verdict[3];
        metrics.counts["cls_indeterminate"] = by_verdict[4];

        RepairOutput out = apply_repairs(parsed.kb, classifications);
        DifferentialReport diff = differential_report(classifications,
                                                      default_differential_bands());
        write_file(cfg.output_dir / "differential.tsv", "repair",
                   [&](std::ostream& o) { write_differential_tsv(o, diff); });
        return out;
    });
    metrics.counts["errors_removed"] = repair.errors.size();
    metrics.counts["homonym_senses"] = repair.homonyms.size();
    metrics.counts["suskb_rows"] = repair.suskb.size();
    metrics.counts["triples_out"] = repair.repaired.size();

    clock.run("emit", [&] {
        write_file(cfg.output_dir / "errors.tsv", "emit",
                   [&](std::ostream& out) { write_errors_tsv(out, repair.errors); });
        write_file(cfg.output_dir / "homonyms.tsv", "emit",
                   [&](std::ostream& out) { write_homonyms_tsv(out, repair.homonyms); });
        write_file(cfg.output_dir / "suskb.tsv", "emit",
                   [&](std::ostream& out) { write_suskb_tsv(out, repair.suskb); });
        write_file(cfg.output_dir / "repaired.tsv", "emit",
                   [&](std::ostream& out) { write_kb_tsv(out, repair.repaired); });
    });

    write_file(cfg.output_dir / "metrics.tsv", "emit", [&](std::ostream& out) {
        out << "# key\tvalue\n";
        for (const auto& [key, value] : metrics.counts) out << key << '\t' << value << '\n';
    });
    // wall-clock per stage; the one non-deterministic output, kept separate
    // from metrics.tsv so result files stay byte-reproducible
    write_file(cfg.output_dir / "timings.tsv", "emit", [&](std::ostream& out) {
        out << "# stage\tmillis\n";
        char buf[64];
        for (const StageTiming& t : metrics.timings) {
            std::snprintf(buf, sizeof buf, "%.3f", t.millis);
            out << t.stage << '\t' << buf << '\n';
        }
    });
    return metrics;
}

namespace {

SweepResult run_sweep(const RunConfig& base, const std::vector<std::pair<std::string, RunConfig>>& points) {
    SweepResult result;
    for (const auto& [label, cfg] : points) {
        SweepRow row;
        row.label = label;
        try {
            row.metrics = run_pipeline(cfg);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
            std::fprintf(stderr, "[sweep] point %s failed: %s\n", label.c_str(), e.what());
        }
        result.rows.push_back(std::move(row));
    }

    std::error_code ec;
    fs::create_directories(base.output_dir, ec);
    std::ofstream out(base.output_dir / "sweep.tsv", std::ios::trunc);
    if (out) write_sweep_tsv(out, result);
    return result;
}

}  // namespace

SweepResult sweep_bucket_count(const RunConfig& base, const std::vector<unsigned>& values) {
    std::vector<std::pair<std::string, RunConfig>> points;
    for (unsigned v : values) {
        RunConfig cfg = base;
        cfg.bucket_count = v;
        std::string label = "bucket-count=" + std::to_string(v);
        cfg.output_dir = base.output_dir / label;
        points.emplace_back(std::move(label), std::move(cfg));
    }
    return run_sweep(base, points);
}

SweepResult sweep_jaccard_max(const RunConfig& base, const std::vector<double>& values) {
    std::vector<std::pair<std::string, RunConfig>> points;
    for (double v : values) {
        RunConfig cfg = base;
        cfg.jaccard_max = v;
        std::string label = "jaccard-max=" + format_double(v);
        cfg.output_dir = base.output_dir / label;
        points.emplace_back(std::move(label), std::move(cfg));
    }
    return run_sweep(base, points);
}

SweepResult sweep_bl_grid(const RunConfig& base, const std::vector<std::uint64_t>& big_values,
                          const std::vector<std::uint64_t>& low_values) {
    std::vector<std::pair<std::string, RunConfig>> points;
    for (std::uint64_t big : big_values) {
        for (std::uint64_t low : low_values) {
            RunConfig cfg = base;
            cfg.big_weight = big;
            cfg.low_weight = low;
            std::string label = "B=" + std::to_string(big) + ",L=" + std::to_string(low);
            cfg.output_dir = base.output_dir / label;
            points.emplace_back(std::move(label), std::move(cfg));
        }
    }
    return run_sweep(base, points);
}

void write_sweep_tsv(std::ostream& out, const SweepResult& result) {
    out << "# point\tstatus\tpairs_hamming\tpairs_jaccard\tpairs_conflict\terrors_removed"
           "\thomonym_senses\tsuskb_rows\tdetail\n";
    for (const SweepRow& row : result.rows) {
        out << row.label << '\t' << (row.ok ? "ok" : "failed");
        const char* keys[] = {"pairs_hamming", "pairs_jaccard", "pairs_conflict",
                              "errors_removed", "homonym_senses", "suskb_rows"};
        for (const char* key : keys) {
            out << '\t';
            auto it = row.metrics.counts.find(key);
            if (row.ok && it != row.metrics.counts.end()) {
                out << it->second;
            } else {
                out << '-';
            }
        }
        out << '\t' << (row.ok ? "" : row.error) << '\n';
    }
}

}  // namespace kbclean
