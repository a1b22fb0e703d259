#pragma once

// Sparse state-vector simulator over named integer-valued registers.
//
// A state is a sparse map from basis tuples (one value per register) to a
// complex amplitude.  Registers carry integer values directly rather than
// bit strings; a qubit-width attribute exists only where the QFT needs one.
// Registers may also hold fixed-arity tuples of counters (used for exponent
// vectors), in which case the tuple occupies consecutive slots of the basis
// key.
//
// States are immutable values: every operation takes a state (by value, so
// move chains never copy) and returns the transformed state.  Basis terms
// are kept sorted by key, which makes every result canonical and every dump
// deterministic.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qsieve::sim {

using RegWord = std::uint64_t;
using BasisKey = std::vector<RegWord>;
using Amplitude = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-15;   // amplitudes below are dropped
inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kMinPostSelectProbability = 1e-12;
inline constexpr std::size_t kSupportCap = 4'000'000;

// ---------------------------------------------------------------------------
// Register domains

/// Value domain of a register: qubits(w) = integers 0..2^w-1, a contiguous
/// range, an explicit finite set, or a tuple of bounded counters.
class Domain {
public:
    enum class Kind { qubits, range, values, tuple };

    static Domain qubits(unsigned width) {
        if (width < 1 || width > 62) throw std::invalid_argument("qubit width out of range");
        Domain d;
        d.kind_ = Kind::qubits;
        d.width_ = width;
        d.lo_ = 0;
        d.hi_ = (RegWord(1) << width) - 1;
        return d;
    }
    static Domain range(RegWord lo, RegWord hi) {
        if (lo > hi) throw std::invalid_argument("empty range domain");
        Domain d;
        d.kind_ = Kind::range;
        d.lo_ = lo;
        d.hi_ = hi;
        return d;
    }
    static Domain values(std::vector<RegWord> set) {
        if (set.empty()) throw std::invalid_argument("empty value-set domain");
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        Domain d;
        d.kind_ = Kind::values;
        d.set_ = std::move(set);
        return d;
    }
    static Domain tuple(std::size_t arity, RegWord component_max) {
        if (arity == 0) throw std::invalid_argument("empty tuple domain");
        Domain d;
        d.kind_ = Kind::tuple;
        d.arity_ = arity;
        d.lo_ = 0;
        d.hi_ = component_max;
        return d;
    }

    Kind kind() const { return kind_; }
    std::size_t arity() const { return kind_ == Kind::tuple ? arity_ : 1; }
    unsigned width() const { return width_; }

    bool contains(std::span<const RegWord> v) const {
        if (v.size() != arity()) return false;
        switch (kind_) {
            case Kind::values:
                return std::binary_search(set_.begin(), set_.end(), v[0]);
            case Kind::tuple:
                for (RegWord c : v) {
                    if (c > hi_) return false;
                }
                return true;
            default:
                return v[0] >= lo_ && v[0] <= hi_;
        }
    }

    /// Number of distinct values (scalar kinds only).
    std::size_t cardinality() const {
        switch (kind_) {
            case Kind::values: return set_.size();
            case Kind::tuple: throw std::logic_error("cardinality of tuple domain");
            default: return static_cast<std::size_t>(hi_ - lo_ + 1);
        }
    }

private:
    Kind kind_ = Kind::range;
    unsigned width_ = 0;
    std::size_t arity_ = 1;
    RegWord lo_ = 0, hi_ = 0;
    std::vector<RegWord> set_;
};

struct RegisterSpec {
    std::string id;
    Domain domain;
};

// ---------------------------------------------------------------------------
// State

struct Term {
    BasisKey key;
    Amplitude amp;
};

struct MeasurementRecord {
    enum class Kind { sampled, post_selected };
    std::string register_id;
    RegWord value = 0;
    double probability = 0.0;  // pre-measurement Born probability of value
    Kind kind = Kind::post_selected;
};

namespace detail {
struct StateAccess;
}

class QuantumState {
public:
    QuantumState() = default;

    const std::vector<RegisterSpec>& registers() const { return registers_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t support() const { return terms_.size(); }

    /// Cumulative squared-amplitude mass dropped by pruning so far.
    double pruned_mass() const { return pruned_mass_; }

    std::size_t register_index(const std::string& id) const {
        for (std::size_t i = 0; i < registers_.size(); ++i) {
            if (registers_[i].id == id) return i;
        }
        throw std::invalid_argument("no register named '" + id + "'");
    }
    std::size_t slot_offset(std::size_t reg) const { return offsets_[reg]; }
    std::size_t slot_arity(std::size_t reg) const { return registers_[reg].domain.arity(); }
    std::size_t key_width() const { return offsets_.empty() ? 0 : offsets_.back(); }

    std::span<const RegWord> value_of(const Term& t, std::size_t reg) const {
        return {t.key.data() + offsets_[reg], slot_arity(reg)};
    }

    double norm_squared() const {
        double s = 0.0;
        for (const Term& t : terms_) s += std::norm(t.amp);
        return s;
    }

    Amplitude amplitude(const BasisKey& key) const {
        const auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                         [](const Term& t, const BasisKey& k) { return t.key < k; });
        if (it != terms_.end() && it->key == key) return it->amp;
        return {0.0, 0.0};
    }

    /// Born distribution of a scalar register, ascending by value.
    std::map<RegWord, double> marginal(const std::string& id) const {
        const std::size_t reg = register_index(id);
        if (slot_arity(reg) != 1) {
            throw std::invalid_argument("marginal requires a scalar register");
        }
        const std::size_t off = offsets_[reg];
        std::map<RegWord, double> dist;
        for (const Term& t : terms_) dist[t.key[off]] += std::norm(t.amp);
        return dist;
    }

private:
    friend struct detail::StateAccess;
    std::vector<RegisterSpec> registers_;
    std::vector<std::size_t> offsets_;  // per register slot offset; back() = key width
    std::vector<Term> terms_;           // sorted by key, keys unique
    double pruned_mass_ = 0.0;
};

// ---------------------------------------------------------------------------
// Internal plumbing shared by the operations

namespace detail {

struct StateAccess {
    static std::vector<Term>& terms(QuantumState& s) { return s.terms_; }
    static double& pruned_mass(QuantumState& s) { return s.pruned_mass_; }

    static QuantumState make(std::vector<RegisterSpec> regs, std::vector<Term> terms,
                             double pruned_mass) {
        QuantumState s;
        s.registers_ = std::move(regs);
        s.offsets_.resize(s.registers_.size() + 1);
        s.offsets_[0] = 0;
        for (std::size_t i = 0; i < s.registers_.size(); ++i) {
            s.offsets_[i + 1] = s.offsets_[i] + s.registers_[i].domain.arity();
        }
        s.terms_ = std::move(terms);
        s.pruned_mass_ = pruned_mass;
        return s;
    }
};

inline bool keys_sorted(const std::vector<Term>& terms) {
    for (std::size_t i = 1; i < terms.size(); ++i) {
        if (!(terms[i - 1].key < terms[i].key)) return false;
    }
    return true;
}

/// Restores canonical form: sorted keys, duplicates merged coherently,
/// negligible amplitudes pruned (with renormalization), unit norm verified.
inline void canonicalize(QuantumState& s, bool merge_allowed,
                         const char* collision_error = "duplicate basis term") {
    std::vector<Term>& terms = StateAccess::terms(s);
    if (!keys_sorted(terms)) {
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return a.key < b.key; });
    }
    // merge duplicates
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size();) {
        std::size_t j = i + 1;
        Amplitude sum = terms[i].amp;
        while (j < terms.size() && terms[j].key == terms[i].key) {
            if (!merge_allowed) throw std::invalid_argument(collision_error);
            sum += terms[j].amp;
            ++j;
        }
        if (out != i) terms[out].key = std::move(terms[i].key);
        terms[out].amp = sum;
        ++out;
        i = j;
    }
    terms.resize(out);
    // prune
    double removed = 0.0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (std::abs(terms[i].amp) < kPruneThreshold) {
            removed += std::norm(terms[i].amp);
        } else {
            if (kept != i) terms[kept] = std::move(terms[i]);
            ++kept;
        }
    }
    terms.resize(kept);
    if (removed > 0.0) {
        StateAccess::pruned_mass(s) += removed;
        const double remaining = s.norm_squared();
        if (remaining <= 0.0) throw std::logic_error("state pruned to zero");
        const double scale = 1.0 / std::sqrt(remaining);
        for (Term& t : terms) t.amp *= scale;
    }
}

inline void check_normalized(const QuantumState& s, const char* op) {
    const double norm2 = s.norm_squared();
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
        throw std::logic_error(std::string(op) + ": state norm drifted to " +
                               std::to_string(norm2));
    }
}

inline std::string tuple_to_string(std::span<const RegWord> v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    out += ")";
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations

/// |0...0> over the given registers.  Every domain must contain its zero
/// value.
inline QuantumState init_state(std::vector<RegisterSpec> specs) {
    if (specs.empty()) throw std::invalid_argument("no registers");
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            if (specs[i].id == specs[j].id) {
                throw std::invalid_argument("duplicate register id '" + specs[i].id + "'");
            }
        }
    }
    std::size_t width = 0;
    for (const RegisterSpec& r : specs) width += r.domain.arity();
    BasisKey zero(width, 0);
    {
        std::size_t off = 0;
        for (const RegisterSpec& r : specs) {
            const std::size_t a = r.domain.arity();
            if (!r.domain.contains({zero.data() + off, a})) {
                throw std::invalid_argument("register '" + r.id +
                                            "' domain does not contain the initial zero value");
            }
            off += a;
        }
    }
    std::vector<Term> terms;
    terms.push_back({std::move(zero), Amplitude(1.0, 0.0)});
    return detail::StateAccess::make(std::move(specs), std::move(terms), 0.0);
}

enum class LoadPath { direct, qft_circuit };

// forward declaration; the QFT circuit lives in sim/qft.hpp (included at the
// bottom of this header so the definition always travels with load_uniform)
inline QuantumState qft(QuantumState state, const std::string& register_id);

namespace detail {

inline bool contiguous_power_of_two(const std::vector<RegWord>& sorted_values, unsigned& width_out) {
    const std::size_t k = sorted_values.size();
    if (k < 2 || (k & (k - 1)) != 0) return false;
    if (sorted_values.back() - sorted_values.front() != k - 1) return false;
    unsigned w = 0;
    while ((std::size_t(1) << w) < k) ++w;
    width_out = w;
    return true;
}

}  // namespace detail

/// Splits every basis term uniformly over the given values of one (scalar)
/// register, which must currently be zero everywhere.  When the value set is
/// a contiguous power-of-two range the superposition is produced by running
/// the QFT circuit on a scratch qubit register and relabeling; otherwise it
/// is loaded directly.  The chosen path is reported through `path_out`.
inline QuantumState load_uniform(QuantumState state, const std::string& register_id,
                                 std::vector<RegWord> values,
                                 LoadPath* path_out = nullptr) {
    if (values.empty()) throw std::invalid_argument("empty value set");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    const std::size_t reg = state.register_index(register_id);
    if (state.slot_arity(reg) != 1) {
        throw std::invalid_argument("load_uniform requires a scalar register");
    }
    const std::size_t off = state.slot_offset(reg);
    const Domain& dom = state.registers()[reg].domain;
    for (RegWord v : values) {
        if (!dom.contains({&v, 1})) {
            throw std::invalid_argument("value " + std::to_string(v) +
                                        " outside domain of register '" + register_id + "'");
        }
    }
    for (const Term& t : state.terms()) {
        if (t.key[off] != 0) {
            throw std::invalid_argument("register '" + register_id +
                                        "' must be zero before loading");
        }
    }
    if (state.support() * values.size() > kSupportCap) {
        throw std::runtime_error("support cap exceeded");
    }

    // Amplitude profile over the value set.
    std::vector<Amplitude> profile;
    unsigned width = 0;
    if (detail::contiguous_power_of_two(values, width)) {
        // Run the actual gate cascade on a scratch register: the QFT of |0>
        // is the uniform superposition.
        QuantumState scratch = init_state({RegisterSpec{"scratch", Domain::qubits(width)}});
        scratch = qft(std::move(scratch), "scratch");
        profile.assign(values.size(), Amplitude(0.0, 0.0));
        for (const Term& t : scratch.terms()) profile[t.key[0]] = t.amp;
        if (path_out) *path_out = LoadPath::qft_circuit;
    } else {
        profile.assign(values.size(), Amplitude(1.0 / std::sqrt(double(values.size())), 0.0));
        if (path_out) *path_out = LoadPath::direct;
    }

    std::vector<Term> out;
    out.reserve(state.terms().size() * values.size());
    for (const Term& t : state.terms()) {
        for (std::size_t j = 0; j < values.size(); ++j) {
            Term nt;
            nt.key = t.key;
            nt.key[off] = values[j];
            nt.amp = t.amp * profile[j];
            out.push_back(std::move(nt));
        }
    }
    QuantumState result = detail::StateAccess::make(
        std::vector<RegisterSpec>(state.registers()), std::move(out), state.pruned_mass());
    detail::canonicalize(result, false, "load_uniform produced colliding terms");
    detail::check_normalized(result, "load_uniform");
    return result;
}

enum class Combine {
    overwrite,   // target must be zero beforehand; f writes it
    accumulate,  // f adds onto the current target value componentwise
};

/// Entangling function oracle: for every basis term, `f` receives read-only
/// views of the read registers and a mutable view of the target register's
/// slots (pre-zeroed in overwrite mode, current value in accumulate mode).
/// Amplitudes are untouched.  Outputs must stay inside the target domain.
template <class F>
QuantumState apply_oracle(QuantumState state, const std::vector<std::string>& read_ids,
                          const std::string& target_id, F&& f,
                          Combine mode = Combine::overwrite) {
    struct View {
        std::size_t off;
        std::size_t arity;
    };
    std::vector<View> reads;
    reads.reserve(read_ids.size());
    for (const std::string& id : read_ids) {
        const std::size_t r = state.register_index(id);
        reads.push_back({state.slot_offset(r), state.slot_arity(r)});
    }
    const std::size_t target = state.register_index(target_id);
    const std::size_t t_off = state.slot_offset(target);
    const std::size_t t_arity = state.slot_arity(target);
    const Domain& t_dom = state.registers()[target].domain;

    std::vector<Term>& terms = detail::StateAccess::terms(state);
    if (mode == Combine::overwrite) {
        for (const Term& t : terms) {
            for (std::size_t s = 0; s < t_arity; ++s) {
                if (t.key[t_off + s] != 0) {
                    throw std::invalid_argument("overwrite oracle requires target '" +
                                                target_id + "' to be zero");
                }
            }
        }
    }

    std::vector<std::span<const RegWord>> read_views(reads.size());
    for (Term& t : terms) {
        for (std::size_t i = 0; i < reads.size(); ++i) {
            read_views[i] = {t.key.data() + reads[i].off, reads[i].arity};
        }
        std::span<RegWord> target_view{t.key.data() + t_off, t_arity};
        f(std::span<const std::span<const RegWord>>(read_views), target_view);
        if (!t_dom.contains(target_view)) {
            throw std::invalid_argument("domain overflow: oracle output " +
                                        detail::tuple_to_string(target_view) +
                                        " outside register '" + target_id + "'");
        }
    }
    detail::canonicalize(state, false, "oracle produced colliding terms");
    detail::check_normalized(state, "apply_oracle");
    return state;
}

/// Relabels one register's value in every term via `g` (mutating the slot
/// view in place).  `g` must be injective within each group of terms that
/// agree on all other registers, unless `projective` is set, in which case
/// colliding terms merge coherently and the state is renormalized.
template <class G>
QuantumState map_register(QuantumState state, const std::string& register_id, G&& g,
                          bool projective = false) {
    const std::size_t reg = state.register_index(register_id);
    const std::size_t off = state.slot_offset(reg);
    const std::size_t arity = state.slot_arity(reg);
    const Domain& dom = state.registers()[reg].domain;

    for (Term& t : detail::StateAccess::terms(state)) {
        std::span<RegWord> view{t.key.data() + off, arity};
        g(view);
        if (!dom.contains(view)) {
            throw std::invalid_argument("domain overflow: mapped value " +
                                        detail::tuple_to_string(view) +
                                        " outside register '" + register_id + "'");
        }
    }
    detail::canonicalize(state, projective, "non-reversible map collision");
    if (projective) {
        const double norm2 = state.norm_squared();
        if (norm2 <= 0.0) throw std::logic_error("projective map erased the state");
        const double scale = 1.0 / std::sqrt(norm2);
        for (Term& t : detail::StateAccess::terms(state)) t.amp *= scale;
    }
    detail::check_normalized(state, "map_register");
    return state;
}

struct SampleMode {
    std::uint64_t seed = 0;
};
struct PostSelectMode {
    RegWord value = 0;
};
using MeasureMode = std::variant<SampleMode, PostSelectMode>;

/// Partial measurement of one scalar register.  Sampling draws from the
/// Born distribution deterministically for a given seed; post-selection
/// projects onto the requested value.  Surviving terms are renormalized by
/// 1/sqrt(pr) and the record carries pr.
inline std::pair<QuantumState, MeasurementRecord> partial_measure(QuantumState state,
                                                                  const std::string& register_id,
                                                                  const MeasureMode& mode) {
    const std::size_t reg = state.register_index(register_id);
    if (state.slot_arity(reg) != 1) {
        throw std::invalid_argument("measurement requires a scalar register");
    }
    const std::size_t off = state.slot_offset(reg);
    const std::map<RegWord, double> dist = state.marginal(register_id);

    MeasurementRecord record;
    record.register_id = register_id;

    if (std::holds_alternative<PostSelectMode>(mode)) {
        const RegWord want = std::get<PostSelectMode>(mode).value;
        const auto it = dist.find(want);
        const double pr = (it == dist.end()) ? 0.0 : it->second;
        if (pr <= kMinPostSelectProbability) {
            throw std::invalid_argument("impossible outcome: value " + std::to_string(want) +
                                        " has no probability mass in '" + register_id + "'");
        }
        record.value = want;
        record.probability = pr;
        record.kind = MeasurementRecord::Kind::post_selected;
    } else {
        const std::uint64_t seed = std::get<SampleMode>(mode).seed;
        std::mt19937_64 rng(seed);
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double total = state.norm_squared();
        double acc = 0.0;
        RegWord chosen = dist.rbegin()->first;
        double chosen_pr = dist.rbegin()->second;
        for (const auto& [v, pr] : dist) {
            acc += pr;
            if (u * total < acc) {
                chosen = v;
                chosen_pr = pr;
                break;
            }
        }
        record.value = chosen;
        record.probability = chosen_pr;
        record.kind = MeasurementRecord::Kind::sampled;
    }

    std::vector<Term>& terms = detail::StateAccess::terms(state);
    const double scale = 1.0 / std::sqrt(record.probability);
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].key[off] == record.value) {
            if (out != i) terms[out] = std::move(terms[i]);
            terms[out].amp *= scale;
            ++out;
        }
    }
    terms.resize(out);
    detail::check_normalized(state, "partial_measure");
    return {std::move(state), std::move(record)};
}

/// Tensor product: concatenated registers, amplitudes multiplied.
inline QuantumState tensor(const QuantumState& a, const QuantumState& b) {
    for (const RegisterSpec& ra : a.registers()) {
        for (const RegisterSpec& rb : b.registers()) {
            if (ra.id == rb.id) {
                throw std::invalid_argument("tensor register id collision: '" + ra.id + "'");
            }
        }
    }
    if (a.support() * b.support() > kSupportCap) {
        throw std::runtime_error("support cap exceeded");
    }
    std::vector<RegisterSpec> regs = a.registers();
    regs.insert(regs.end(), b.registers().begin(), b.registers().end());

    std::vector<Term> terms;
    terms.reserve(a.support() * b.support());
    for (const Term& ta : a.terms()) {
        for (const Term& tb : b.terms()) {
            Term t;
            t.key.reserve(ta.key.size() + tb.key.size());
            t.key.insert(t.key.end(), ta.key.begin(), ta.key.end());
            t.key.insert(t.key.end(), tb.key.begin(), tb.key.end());
            t.amp = ta.amp * tb.amp;
            terms.push_back(std::move(t));
        }
    }
    QuantumState result = detail::StateAccess::make(std::move(regs), std::move(terms),
                                                    a.pruned_mass() + b.pruned_mass());
    detail::canonicalize(result, false, "tensor produced colliding terms");
    detail::check_normalized(result, "tensor");
    return result;
}

}  // namespace qsieve::sim

#include "qsieve/sim/qft.hpp"
