// ============================================================================
// cogal/model.hpp — finite S5 epistemic models
// ============================================================================
//
//   States, agents and propositions are identified by name and stored in
//   document order; internally a state is its index.  State sets are 64-bit
//   masks, so a model holds at most 64 states.
//
//   Every agent's indistinguishability relation is stored as a partition of
//   the states (blocks in order of their least state).  Models are immutable
//   once validated.
//
// ============================================================================

#ifndef COGAL_MODEL_HPP
#define COGAL_MODEL_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogal/formula.hpp"

namespace cogal {

inline constexpr std::size_t kMaxStates = 64;

/// A set of state indices.
class StateSet {
public:
    constexpr StateSet() = default;
    constexpr explicit StateSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr StateSet single(std::size_t s) { return StateSet(std::uint64_t{1} << s); }
    static constexpr StateSet first(std::size_t n) {
        return StateSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(std::size_t s) const { return (bits_ >> s) & 1U; }
    constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool subset_of(StateSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(StateSet o) const { return (bits_ & o.bits_) != 0; }
    /// Least member; undefined on the empty set.
    constexpr std::size_t front() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

    constexpr void insert(std::size_t s) { bits_ |= std::uint64_t{1} << s; }

    friend constexpr StateSet operator|(StateSet a, StateSet b) { return StateSet(a.bits_ | b.bits_); }
    friend constexpr StateSet operator&(StateSet a, StateSet b) { return StateSet(a.bits_ & b.bits_); }
    /// Set difference.
    friend constexpr StateSet operator-(StateSet a, StateSet b) { return StateSet(a.bits_ & ~b.bits_); }
    StateSet& operator|=(StateSet o) { bits_ |= o.bits_; return *this; }
    StateSet& operator&=(StateSet o) { bits_ &= o.bits_; return *this; }
    friend constexpr bool operator==(StateSet, StateSet) = default;
    friend constexpr auto operator<=>(StateSet, StateSet) = default;

    /// Indices in increasing order.
    std::vector<std::size_t> members() const;

private:
    std::uint64_t bits_ = 0;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KripkeModel {
public:
    /// Builds and validates a model.  `partitions` holds one entry per agent
    /// (in agent order), each a list of blocks of state indices; `valuation`
    /// one set per proposition.  Throws ModelError on any violated invariant.
    KripkeModel(std::vector<std::string> states, std::vector<Agent> agents, std::vector<std::string> props,
                const std::vector<std::vector<StateSet>>& partitions, std::vector<StateSet> valuation,
                std::optional<std::size_t> designated = std::nullopt);

    std::size_t num_states() const { return states_.size(); }
    StateSet all() const { return StateSet::first(states_.size()); }

    const std::vector<std::string>& states() const { return states_; }
    const std::vector<Agent>& agents() const { return agents_; }
    const std::vector<std::string>& props() const { return props_; }
    const std::optional<std::size_t>& designated() const { return designated_; }

    std::optional<std::size_t> state_index(std::string_view name) const;
    std::optional<std::size_t> agent_index(std::string_view name) const;
    std::optional<std::size_t> prop_index(std::string_view name) const;
    /// Like state_index but throws ModelError for unknown names.
    std::size_t require_state(std::string_view name) const;

    /// Blocks of the agent's partition, ordered by least member.
    const std::vector<StateSet>& blocks(std::size_t agent) const { return blocks_[agent]; }
    /// The block of `agent` containing `s`.
    StateSet block_of(std::size_t agent, std::size_t s) const { return blocks_[agent][block_index_[agent][s]]; }
    std::size_t block_index(std::size_t agent, std::size_t s) const { return block_index_[agent][s]; }

    StateSet valuation(std::size_t prop) const { return valuation_[prop]; }
    bool holds(std::size_t prop, std::size_t s) const { return valuation_[prop].contains(s); }

    std::vector<std::string> names(StateSet set) const;
    StateSet set_of(const std::vector<std::string>& names) const;

    /// Same model with a different designated state.
    KripkeModel with_designated(std::optional<std::size_t> point) const;

    /// Identical states, agents, propositions, relations and valuation.
    friend bool operator==(const KripkeModel& a, const KripkeModel& b);

private:
    std::vector<std::string> states_;
    std::vector<Agent> agents_;
    std::vector<std::string> props_;
    std::vector<std::vector<StateSet>> blocks_;
    std::vector<std::vector<std::size_t>> block_index_;
    std::vector<StateSet> valuation_;
    std::optional<std::size_t> designated_;
};

struct PointedModel {
    KripkeModel model;
    std::size_t point;
};

// ── Documents ───────────────────────────────────────────────────────────────

/// Reads the JSON model document (agents, props, states, partitions,
/// valuation, optional designated).  Throws ModelError.
KripkeModel validate(const nlohmann::json& doc);
KripkeModel load_model(const std::string& path);
nlohmann::json to_json(const KripkeModel& m);

/// Graphviz rendering: one node per state labelled with its true
/// propositions, one undirected edge per related pair of distinct states.
std::string to_dot(const KripkeModel& m);

// ── Operations ──────────────────────────────────────────────────────────────

/// Restriction of `m` to `keep`.  Throws ModelError if keep is empty or
/// mentions states outside the model.
KripkeModel update(const KripkeModel& m, StateSet keep);

/// Coarsest bisimulation on the restriction of `m` to `domain`, as blocks
/// ordered by least member.  Initial partition by valuation, refined by the
/// set of blocks each agent can reach.
std::vector<StateSet> bisimulation_classes(const KripkeModel& m, StateSet domain);

struct ContractionMap {
    KripkeModel original;
    KripkeModel contracted;
    /// original state index -> contracted state index
    std::vector<std::size_t> mapping;

    /// Original states mapped onto `s`.
    StateSet preimage(std::size_t s) const;
    StateSet preimage(StateSet set) const;
    StateSet image(StateSet set) const;
};

/// Quotient by the coarsest bisimulation.  A contracted state keeps the name
/// of its least original state; the designated state is carried over.
ContractionMap bisim_contract(const KripkeModel& m);

/// True iff no two distinct states are bisimilar.
bool is_contracted(const KripkeModel& m);

/// An epistemic formula true exactly at `s`.  Throws ModelError unless `m` is
/// contracted.
Formula char_formula(const KripkeModel& m, std::size_t s);

/// One union of equivalence classes per agent of a group.
struct AnnouncementChoice {
    std::map<Agent, StateSet> sets;

    /// Intersection of all sets within `universe` (universe itself for the
    /// empty choice).
    StateSet intersection(StateSet universe) const;

    friend bool operator==(const AnnouncementChoice&, const AnnouncementChoice&) = default;
};

/// A formula  K_i f_i & ... (one conjunct per member of `group`, f_i
/// epistemic) whose conjunct for agent i has extension exactly the choice's
/// set for i.  For the empty group this is top.  Throws ModelError if `m` is
/// not contracted or a set is not a union of the agent's classes.
Formula realize_choice(const KripkeModel& m, std::size_t w, const AgentSet& group,
                       const AnnouncementChoice& choice);

}  // namespace cogal

#endif  // COGAL_MODEL_HPP
