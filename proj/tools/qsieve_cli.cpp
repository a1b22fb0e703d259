// Command-line front end: factor integers through either sieve pipeline,
// dump step-by-step quantum state traces, benchmark the classical sieve and
// re-validate trace files.
//
// Exit codes: 0 success, 1 pipeline failure (no factorization, prime
// input), 2 invalid input or unusable configuration/paths.

#include "qsieve/classical.hpp"
#include "qsieve/cli/bench.hpp"
#include "qsieve/cli/trace_io.hpp"
#include "qsieve/quantum.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using qsieve::Natural;

constexpr int kExitSuccess = 0;
constexpr int kExitPipelineFailure = 1;
constexpr int kExitBadInput = 2;

Natural parse_natural(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    std::size_t digits_from = 0;
    bool hex = false;
    if (text.size() > 2 && (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0)) {
        digits_from = 2;
        hex = true;
    }
    if (digits_from == text.size()) throw std::invalid_argument("empty number");
    for (std::size_t i = digits_from; i < text.size(); ++i) {
        const char c = text[i];
        const bool ok = hex ? std::isxdigit(static_cast<unsigned char>(c))
                            : std::isdigit(static_cast<unsigned char>(c));
        if (!ok) throw std::invalid_argument("not a positive integer: '" + text + "'");
    }
    return Natural(text);
}

std::string format_ms(double ms) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", ms);
    return buf;
}

struct PipelineRun {
    std::string label;  // "classical" | "quantum-sim"
    qsieve::classical::FactorResult result;
    Natural smoothness_bound;
    Natural interval_half_width;
    std::size_t relations = 0;
    double time_ms = 0.0;
};

std::string run_to_json(const PipelineRun& run, bool with_timing) {
    std::string out = "{";
    out += "\"f1\":\"" + run.result.f1.str() + "\"";
    out += ",\"f2\":\"" + run.result.f2.str() + "\"";
    if (run.result.witness) {
        out += ",\"witness_x\":\"" + run.result.witness->first.str() + "\"";
        out += ",\"witness_y\":\"" + run.result.witness->second.str() + "\"";
    }
    out += ",\"smoothness_bound\":\"" + run.smoothness_bound.str() + "\"";
    out += ",\"interval_half_width\":\"" + run.interval_half_width.str() + "\"";
    out += ",\"attempts\":" + std::to_string(run.result.attempts);
    out += ",\"relations\":" + std::to_string(run.relations);
    if (with_timing) out += ",\"time_ms\":" + format_ms(run.time_ms);
    out += "}";
    return out;
}

void print_run_text(const PipelineRun& run, bool with_timing) {
    std::cout << "[" << run.label << "]\n";
    std::cout << "  factors: " << run.result.f1 << " x " << run.result.f2 << "\n";
    if (run.result.witness) {
        std::cout << "  witness: x=" << run.result.witness->first
                  << " y=" << run.result.witness->second << "\n";
    }
    std::cout << "  params: B=" << run.smoothness_bound << " M=" << run.interval_half_width
              << " attempts=" << run.result.attempts << " relations=" << run.relations << "\n";
    if (with_timing) std::cout << "  time: " << format_ms(run.time_ms) << " ms\n";
}

struct FactorConfig {
    std::string n_text;
    std::string mode = "classical";
    std::optional<std::string> bound_text;
    std::optional<std::string> width_text;
    std::string trace_path;
    std::size_t max_retries = 5;
    bool json = false;
    bool no_timing = false;
    bool recurse = false;
};

std::optional<qsieve::classical::SieveParams> overrides_for(const Natural& n,
                                                            const FactorConfig& cfg) {
    if (!cfg.bound_text && !cfg.width_text) return std::nullopt;
    Natural bound = cfg.bound_text ? parse_natural(*cfg.bound_text)
                                   : qsieve::classical::default_params(n).smoothness_bound;
    Natural width = cfg.width_text ? parse_natural(*cfg.width_text)
                                   : qsieve::classical::default_interval_half_width(n);
    return qsieve::classical::SieveParams::create(n, std::move(bound), std::move(width));
}

std::vector<Natural> recurse_split(const Natural& n) {
    if (qsieve::classical::detail::is_prime_desk_scale(n)) return {n};
    std::vector<Natural> parts;
    try {
        const auto result = qsieve::classical::factor(n);
        for (const Natural& f : {result.f1, result.f2}) {
            for (Natural& sub : recurse_split(f)) parts.push_back(std::move(sub));
        }
    } catch (const qsieve::classical::SieveError&) {
        parts.push_back(n);  // unsplittable at this scale; report as-is
    }
    std::sort(parts.begin(), parts.end());
    return parts;
}

int cmd_factor(const FactorConfig& cfg) {
    const Natural n = parse_natural(cfg.n_text);
    const auto params = overrides_for(n, cfg);
    const qsieve::classical::FactorOptions options{cfg.max_retries, 5};

    std::vector<PipelineRun> runs;
    if (cfg.mode == "classical" || cfg.mode == "both") {
        qsieve::classical::FactorRunStats stats;
        const auto t0 = std::chrono::steady_clock::now();
        auto result = qsieve::classical::factor(n, params, options, &stats);
        const auto t1 = std::chrono::steady_clock::now();
        runs.push_back({"classical", std::move(result), stats.smoothness_bound,
                        stats.interval_half_width, stats.relations,
                        std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }
    if (cfg.mode == "quantum-sim" || cfg.mode == "both") {
        qsieve::quantum::PipelineOptions qopts;
        qopts.max_retries = cfg.max_retries;
        qopts.capture_terms = !cfg.trace_path.empty();
        const auto t0 = std::chrono::steady_clock::now();
        auto result = qsieve::quantum::run_pipeline(n, params, qopts);
        const auto t1 = std::chrono::steady_clock::now();
        if (!cfg.trace_path.empty()) {
            std::ofstream out(cfg.trace_path);
            if (!out) {
                std::cerr << "error: cannot write trace to '" << cfg.trace_path << "'\n";
                return kExitBadInput;
            }
            qsieve::cli::write_trace(out, result.trace);
        }
        runs.push_back({"quantum-sim", std::move(result.factors),
                        result.params_used.smoothness_bound,
                        result.params_used.interval_half_width, result.relations,
                        std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }

    std::string verdict;
    if (runs.size() == 2) {
        const bool equal = runs[0].result.f1 == runs[1].result.f1 &&
                           runs[0].result.f2 == runs[1].result.f2;
        verdict = equal ? "EQUAL" : "DIFFER";
    }

    if (cfg.json) {
        std::string out = "{\"n\":\"" + n.str() + "\",\"mode\":\"" + cfg.mode + "\"";
        for (const PipelineRun& run : runs) {
            out += ",\"" + run.label + "\":" + run_to_json(run, !cfg.no_timing);
        }
        if (!verdict.empty()) out += ",\"verdict\":\"" + verdict + "\"";
        if (cfg.recurse) {
            out += ",\"prime_factors\":[";
            const auto parts = recurse_split(n);
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) out += ",";
                out += "\"" + parts[i].str() + "\"";
            }
            out += "]";
        }
        out += "}";
        std::cout << out << "\n";
    } else {
        std::cout << "n: " << n << "\n";
        for (const PipelineRun& run : runs) print_run_text(run, !cfg.no_timing);
        if (!verdict.empty()) std::cout << "verdict: " << verdict << "\n";
        if (cfg.recurse) {
            std::cout << "prime factors:";
            for (const Natural& f : recurse_split(n)) std::cout << " " << f;
            std::cout << "\n";
        }
    }
    return kExitSuccess;
}

struct TraceConfig {
    std::string n_text;
    std::string mode = "quantum-sim";
    std::optional<std::string> bound_text;
    std::optional<std::string> width_text;
    std::string trace_path;  // empty = stdout
    std::size_t max_retries = 5;
};

int cmd_trace(const TraceConfig& cfg) {
    if (cfg.mode != "quantum-sim") {
        std::cerr << "error: trace requires --mode quantum-sim\n";
        return kExitBadInput;
    }
    const Natural n = parse_natural(cfg.n_text);
    FactorConfig params_probe;
    params_probe.bound_text = cfg.bound_text;
    params_probe.width_text = cfg.width_text;
    const auto params = overrides_for(n, params_probe);

    qsieve::quantum::PipelineOptions qopts;
    qopts.max_retries = cfg.max_retries;
    qopts.capture_terms = true;
    const auto result = qsieve::quantum::run_pipeline(n, params, qopts);

    if (cfg.trace_path.empty()) {
        qsieve::cli::write_trace(std::cout, result.trace);
    } else {
        std::ofstream out(cfg.trace_path);
        if (!out) {
            std::cerr << "error: cannot write trace to '" << cfg.trace_path << "'\n";
            return kExitBadInput;
        }
        qsieve::cli::write_trace(out, result.trace);
    }
    return kExitSuccess;
}

std::vector<unsigned> parse_sizes(const std::string& spec) {
    std::vector<unsigned> sizes;
    const auto push = [&sizes](const std::string& tok) {
        const unsigned long v = std::stoul(tok);
        if (v < 6 || v > 66) throw std::invalid_argument("bit size out of range: " + tok);
        sizes.push_back(static_cast<unsigned>(v));
    };
    if (spec.find("..") != std::string::npos) {
        // "a..b:step"
        const std::size_t dots = spec.find("..");
        const std::size_t colon = spec.find(':', dots);
        const unsigned long a = std::stoul(spec.substr(0, dots));
        const unsigned long b = std::stoul(
            spec.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
        const unsigned long step = colon == std::string::npos ? 8 : std::stoul(spec.substr(colon + 1));
        if (step == 0 || a > b) throw std::invalid_argument("bad size range: " + spec);
        for (unsigned long v = a; v <= b; v += step) push(std::to_string(v));
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) push(tok);
        }
    }
    if (sizes.empty()) throw std::invalid_argument("no bit sizes given");
    return sizes;
}

int cmd_bench(const std::string& sizes_spec, std::size_t reps, std::uint64_t seed, bool json,
              bool no_timing) {
    const std::vector<unsigned> sizes = parse_sizes(sizes_spec);
    const auto rows = qsieve::cli::run_bench(sizes, reps, seed);
    if (json) {
        std::string out = "{\"seed\":" + std::to_string(seed) + ",\"rows\":[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (i) out += ",";
            out += "{\"bits\":" + std::to_string(r.bits);
            out += ",\"reps\":" + std::to_string(r.reps);
            if (!no_timing) {
                out += ",\"median_ms\":" + format_ms(r.median_ms);
                out += ",\"p95_ms\":" + format_ms(r.p95_ms);
            }
            out += ",\"median_relations\":" + std::to_string(r.median_relations);
            out += ",\"smoothness_bound\":\"" + r.median_smoothness_bound.str() + "\"";
            out += ",\"interval_half_width\":\"" + r.median_interval_half_width.str() + "\"";
            out += "}";
        }
        out += "]}";
        std::cout << out << "\n";
    } else {
        std::cout << "bits  reps  median_ms  p95_ms     relations  B       M\n";
        for (const auto& r : rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "%-5u %-5zu %-10s %-10s %-10zu %-7s %s\n", r.bits,
                          r.reps, no_timing ? "-" : format_ms(r.median_ms).c_str(),
                          no_timing ? "-" : format_ms(r.p95_ms).c_str(), r.median_relations,
                          r.median_smoothness_bound.str().c_str(),
                          r.median_interval_half_width.str().c_str());
            std::cout << line;
        }
    }
    return kExitSuccess;
}

int cmd_validate_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read '" << path << "'\n";
        return kExitBadInput;
    }
    const auto result = qsieve::cli::validate_trace(in);
    if (!result.ok) {
        std::cerr << "invalid trace: " << result.error << "\n";
        return kExitPipelineFailure;
    }
    std::cout << "trace ok: " << result.steps_checked << " steps verified, "
              << result.steps_skipped << " skipped\n";
    return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadratic sieve factorization toolkit"};
    app.require_subcommand(1);

    FactorConfig fc;
    std::string fc_bound, fc_width;
    std::uint64_t seed = 1;

    CLI::App* factor_cmd = app.add_subcommand("factor", "factor an integer");
    factor_cmd->add_option("n", fc.n_text, "integer to factor (decimal or 0x-hex)")->required();
    factor_cmd->add_option("--mode", fc.mode, "classical | quantum-sim | both")
        ->check(CLI::IsMember({"classical", "quantum-sim", "both"}));
    factor_cmd->add_option("--smoothness-bound", fc_bound, "override B");
    factor_cmd->add_option("--interval-half-width", fc_width, "override M");
    factor_cmd->add_option("--seed", seed, "seed for sampled-measurement demos");
    factor_cmd->add_option("--trace", fc.trace_path, "write quantum trace to this path");
    factor_cmd->add_option("--max-retries", fc.max_retries, "escalation retry cap");
    factor_cmd->add_flag("--json", fc.json, "JSON output");
    factor_cmd->add_flag("--no-timing", fc.no_timing, "omit timing fields");
    factor_cmd->add_flag("--recurse", fc.recurse, "recursively split composite factors");

    TraceConfig tc;
    std::string tc_bound, tc_width;
    CLI::App* trace_cmd = app.add_subcommand("trace", "dump a step-by-step quantum state trace");
    trace_cmd->add_option("n", tc.n_text, "integer to factor (decimal or 0x-hex)")->required();
    trace_cmd->add_option("--mode", tc.mode, "must be quantum-sim")
        ->check(CLI::IsMember({"classical", "quantum-sim", "both"}));
    trace_cmd->add_option("--smoothness-bound", tc_bound, "override B");
    trace_cmd->add_option("--interval-half-width", tc_width, "override M");
    trace_cmd->add_option("--seed", seed, "seed for sampled-measurement demos");
    trace_cmd->add_option("--trace", tc.trace_path, "output path (default: stdout)");
    trace_cmd->add_option("--max-retries", tc.max_retries, "escalation retry cap");

    std::string bench_sizes = "32..48:8";
    std::size_t bench_reps = 5;
    bool bench_json = false;
    bool bench_no_timing = false;
    CLI::App* bench_cmd = app.add_subcommand("bench", "benchmark the classical sieve");
    bench_cmd->add_option("--sizes", bench_sizes, "bit sizes: 'a..b:step' or comma list");
    bench_cmd->add_option("--reps", bench_reps, "semiprimes per size");
    bench_cmd->add_option("--seed", seed, "generator seed");
    bench_cmd->add_flag("--json", bench_json, "JSON output");
    bench_cmd->add_flag("--no-timing", bench_no_timing, "omit timing fields");

    std::string validate_path;
    CLI::App* validate_cmd = app.add_subcommand("validate-trace", "re-verify a trace file");
    validate_cmd->add_option("path", validate_path, "trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitBadInput;
    }

    try {
        if (factor_cmd->parsed()) {
            if (!fc_bound.empty()) fc.bound_text = fc_bound;
            if (!fc_width.empty()) fc.width_text = fc_width;
            return cmd_factor(fc);
        }
        if (trace_cmd->parsed()) {
            if (!tc_bound.empty()) tc.bound_text = tc_bound;
            if (!tc_width.empty()) tc.width_text = tc_width;
            return cmd_trace(tc);
        }
        if (bench_cmd->parsed()) {
            if (bench_reps == 0) {
                std::cerr << "error: --reps must be positive\n";
                return kExitBadInput;
            }
            return cmd_bench(bench_sizes, bench_reps, seed, bench_json, bench_no_timing);
        }
        if (validate_cmd->parsed()) {
            return cmd_validate_trace(validate_path);
        }
    } catch (const qsieve::classical::SieveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipelineFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipelineFailure;
    }
    return kExitBadInput;
}
