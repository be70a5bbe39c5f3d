// ============================================================================
// cogal/harness.hpp — model generation, countermodel search, validity suites
// ============================================================================
//
//   Validity is undecidable for this language, so the harness samples: seeded
//   random models, bounded exhaustive enumeration, and seeded instantiation
//   pools for schematic letters.  Every run is a deterministic function of
//   its parameters, regardless of the number of worker threads.
//
// ============================================================================

#ifndef COGAL_HARNESS_HPP
#define COGAL_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogal/checker.hpp"
#include "cogal/formula.hpp"
#include "cogal/model.hpp"

namespace cogal {

struct GenParams {
    std::size_t max_states = 4;
    std::vector<Agent> agents{"a", "b"};
    std::vector<std::string> props{"p", "q"};
    std::uint64_t seed = 0;
    std::size_t count = 100;

    /// Throws std::invalid_argument unless max_states is in [1, 64] and
    /// agents and props are nonempty, valid and unique.
    void validate() const;
};

/// Deterministic 64-bit generator for (seed, stream, index).
std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index);

/// Deterministic in (seed, index): uniform state count in [1, max_states],
/// random partition per agent, random valuation.  States are named s0, s1, ...
KripkeModel random_model(const GenParams& p, std::size_t index);

/// Calls `visit` on every model with 1..max_states states over the given
/// vocabulary (every combination of per-agent partitions and valuations;
/// isomorphic copies included).  Stops early when visit returns false.
void enumerate_models(const std::vector<Agent>& agents, const std::vector<std::string>& props,
                      std::size_t max_states, const std::function<bool(const KripkeModel&)>& visit);

// ── Random formulas ─────────────────────────────────────────────────────────

struct FormulaGen {
    std::vector<Agent> agents;
    std::vector<std::string> props;
    std::size_t max_depth = 2;         // modal depth
    Fragment fragment = Fragment::CoGAL;
    bool surface = true;               // allow | -> <-> and diamonds
    std::size_t max_size = 0;          // normalized size bound, 0 = none
};

Formula random_formula(std::mt19937_64& rng, const FormulaGen& gen);

/// A random member of the announcement language for `group`: one conjunct
/// K i f_i per member with f_i epistemic; top for the empty group.
Formula random_group_announcement(std::mt19937_64& rng, const FormulaGen& gen, const AgentSet& group);

// ── Countermodel search ─────────────────────────────────────────────────────

struct Countermodel {
    KripkeModel model;
    std::size_t state = 0;
    std::map<std::string, Formula> assignment;  // schematic letter -> instance
    Formula instance;                           // the refuted formula

    nlohmann::json to_json() const;
};

struct SearchOptions {
    /// Atoms of the formula treated as schematic letters.
    std::vector<std::string> schema_vars;
    /// Instances tried for each letter (all combinations).
    std::vector<Formula> pool;
    /// Exhaustive enumeration covers models of up to this many states (capped
    /// by bounds.max_states); random models cover the rest.
    std::size_t exhaustive_states = 3;
    /// Upper bound on models visited during enumeration.
    std::size_t exhaustive_limit = 200000;
};

/// A pointed model (and instantiation) where f is false, or nothing once the
/// bounds are exhausted: every model enumerated up to the exhaustive bound,
/// then bounds.count random models.  The vocabulary is the bounds' vocabulary
/// extended by what f itself mentions.
std::optional<Countermodel> find_countermodel(const Formula& f, const GenParams& bounds,
                                              const SearchOptions& options = {});

// ── Suites ──────────────────────────────────────────────────────────────────

struct ItemResult {
    std::string name;
    std::string schema;           // the item in concrete syntax
    std::size_t instances = 0;    // checked (model, instantiation) pairs
    std::size_t failures = 0;
    bool expect_failure = false;  // canaries must fail
    bool exploratory = false;     // failures logged, never asserted
    std::optional<Countermodel> countermodel;

    bool passed() const;
};

struct SuiteReport {
    GenParams params;
    std::vector<ItemResult> items;  // sorted by name

    bool passed() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

/// Names accepted by axiom_suite.
std::vector<std::string> suite_item_names();

struct SuiteOptions {
    std::vector<std::string> items;  // empty = all
    std::size_t instantiations = 3;  // per model, item and group choice
    std::size_t threads = 1;         // 0 = hardware concurrency
    /// Passed to every evaluator; called concurrently when threads > 1.
    std::function<void(const ChoiceEvent&)> on_choice;
};

/// Evaluates every selected item on params.count random models.  Throws
/// std::invalid_argument for unknown item names or invalid params.
SuiteReport axiom_suite(const GenParams& params, const SuiteOptions& options = {});

/// The shipped 3-agent, 3-proposition model on which
/// <[{a,b}]> phi  holds and  <[{a}]> <[{b}]> phi  fails at the designated
/// state, for phi = K b (p & q & r) & ~K a (p & q & r) & ~K c (p & q & r).
KripkeModel split_coalition_countermodel();
Formula split_coalition_goal();

/// Thread count from COGAL_THREADS (0 or unset = hardware concurrency).
std::size_t threads_from_env();

}  // namespace cogal

#endif  // COGAL_HARNESS_HPP
