#pragma once

// JSON-lines serialization of pipeline traces.
//
// One header record per step:
//   {"step":"1.1","norm":1.0,"support":10,"truncated":false,
//    "probability":0.3,"note":"..."}            (probability/note optional)
// followed by one record per basis term:
//   {"step":"1.1","registers":["R1","R2"],"values":[2,0],
//    "amp_re":0.316227766017,"amp_im":0}
//
// Term records appear in canonical (lexicographic by value tuple) order.
// Tuple-valued registers serialize as nested arrays.  Floating-point fields
// carry 12 significant digits, which keeps the writer byte-deterministic.

#include "qsieve/quantum.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace qsieve::cli {

namespace detail {

inline std::string fmt_g12(double v) {
    if (v == 0.0) v = 0.0;  // never emit -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace detail

inline void write_trace_step(std::ostream& os, const quantum::TraceStep& step) {
    std::string header = "{\"step\":\"" + detail::json_escape(step.label) + "\"";
    if (step.snapshot) {
        header += ",\"norm\":" + detail::fmt_g12(step.snapshot->norm_squared);
        header += ",\"support\":" + std::to_string(step.snapshot->support);
        header += std::string(",\"truncated\":") + (step.snapshot->truncated ? "true" : "false");
    } else {
        header += ",\"norm\":1,\"support\":0,\"truncated\":false";
    }
    if (!step.records.empty()) {
        header += ",\"probability\":" + detail::fmt_g12(step.records.front().probability);
        header += ",\"measured\":\"" + detail::json_escape(step.records.front().register_id) +
                  "\",\"value\":" + std::to_string(step.records.front().value);
    }
    if (!step.notes.empty()) {
        std::string joined;
        for (const std::string& note : step.notes) {
            if (!joined.empty()) joined += "; ";
            joined += note;
        }
        header += ",\"note\":\"" + detail::json_escape(joined) + "\"";
    }
    os << header << "}\n";

    if (!step.snapshot) return;
    const quantum::StateSnapshot& snap = *step.snapshot;
    std::string reg_list = "[";
    for (std::size_t i = 0; i < snap.registers.size(); ++i) {
        if (i) reg_list += ",";
        reg_list += "\"" + detail::json_escape(snap.registers[i].id) + "\"";
    }
    reg_list += "]";

    for (const sim::Term& t : snap.terms) {
        std::string line = "{\"step\":\"" + detail::json_escape(step.label) + "\"";
        line += ",\"registers\":" + reg_list;
        line += ",\"values\":[";
        std::size_t off = 0;
        for (std::size_t r = 0; r < snap.registers.size(); ++r) {
            const std::size_t arity = snap.registers[r].domain.arity();
            if (r) line += ",";
            if (arity == 1) {
                line += std::to_string(t.key[off]);
            } else {
                line += "[";
                for (std::size_t s = 0; s < arity; ++s) {
                    if (s) line += ",";
                    line += std::to_string(t.key[off + s]);
                }
                line += "]";
            }
            off += arity;
        }
        line += "],\"amp_re\":" + detail::fmt_g12(t.amp.real());
        line += ",\"amp_im\":" + detail::fmt_g12(t.amp.imag());
        os << line << "}\n";
    }
}

inline void write_trace(std::ostream& os, const quantum::PipelineTrace& trace) {
    for (const quantum::TraceStep& step : trace.steps) write_trace_step(os, step);
}

struct TraceValidation {
    bool ok = false;
    std::size_t steps_checked = 0;
    std::size_t steps_skipped = 0;  // truncated or term-free steps
    std::string error;
};

/// Re-reads a trace file and re-verifies per-step normalization: the squared
/// amplitudes of each step's term records must sum to the header's norm
/// (and to 1) within 1e-9.  Steps marked truncated are skipped.
inline TraceValidation validate_trace(std::istream& is) {
    using nlohmann::json;
    TraceValidation result;

    struct StepInfo {
        double norm = 1.0;
        std::size_t support = 0;
        bool truncated = false;
        double sum = 0.0;
        std::size_t term_count = 0;
    };
    std::vector<std::pair<std::string, StepInfo>> steps;  // in file order

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            result.error = "line " + std::to_string(line_no) + ": " + e.what();
            return result;
        }
        if (!j.contains("step")) {
            result.error = "line " + std::to_string(line_no) + ": missing step field";
            return result;
        }
        const std::string label = j["step"].get<std::string>();
        if (j.contains("registers")) {
            // term record
            if (steps.empty() || steps.back().first != label) {
                result.error = "line " + std::to_string(line_no) + ": term before header";
                return result;
            }
            const double re = j["amp_re"].get<double>();
            const double im = j["amp_im"].get<double>();
            steps.back().second.sum += re * re + im * im;
            steps.back().second.term_count += 1;
        } else {
            StepInfo info;
            info.norm = j.value("norm", 1.0);
            info.support = j.value("support", std::size_t(0));
            info.truncated = j.value("truncated", false);
            steps.emplace_back(label, info);
        }
    }

    for (const auto& [label, info] : steps) {
        if (info.truncated || info.term_count == 0) {
            ++result.steps_skipped;
            continue;
        }
        if (std::abs(info.sum - info.norm) > 1e-9 || std::abs(info.sum - 1.0) > 1e-9) {
            result.error = "step " + label + ": term amplitudes sum to " +
                           detail::fmt_g12(info.sum) + ", expected " +
                           detail::fmt_g12(info.norm);
            return result;
        }
        if (info.term_count != info.support) {
            result.error = "step " + label + ": " + std::to_string(info.term_count) +
                           " term records but support " + std::to_string(info.support);
            return result;
        }
        ++result.steps_checked;
    }
    result.ok = true;
    return result;
}

}  // namespace qsieve::cli
