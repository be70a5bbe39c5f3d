// ============================================================================
// cogal/checker.hpp — truth of formulas on finite S5 models
// ============================================================================
//
//   The evaluator first contracts the input model.  Every model reached by
//   announcements is then a restriction of the contracted root to some
//   domain D, so a submodel is just a StateSet and extensions are memoized per
//   (D, formula node).
//
//   Group and coalition quantifiers range over announcement choices: for
//   each agent of the group, a union of blocks containing the current state.
//   In the restriction to D a block is a component of (~_i ∪ bisimilarity on
//   D), i.e. an equivalence class of the agent in the contracted submodel.
//   These are exactly the extensions of true announcements K_i f_i with f_i
//   epistemic (see realize_choice).  With `recontract` off, blocks are the
//   agent's plain classes in D, which can over-approximate the quantifier
//   range; the mode exists for cross-checking.
//
// ============================================================================

#ifndef COGAL_CHECKER_HPP
#define COGAL_CHECKER_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cogal/formula.hpp"
#include "cogal/model.hpp"

namespace cogal {

/// A formula names an agent or proposition the model does not declare.
class BindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An announcement choice enumerated while evaluating a quantifier, reported
/// in states of the contracted root model.
struct ChoiceEvent {
    const KripkeModel* root;  // the evaluator's contracted model
    StateSet domain;          // submodel the quantifier is evaluated in
    std::size_t state;
    AgentSet group;
    AnnouncementChoice choice;
};

struct EvalOptions {
    bool recontract = true;
    bool memoize = true;
    /// Called for every enumerated choice (including opponent choices).
    std::function<void(const ChoiceEvent&)> on_choice;
};

/// Witness or refutation for a quantified top-level operator, in states of
/// the original model.
struct ChoiceReport {
    AgentSet group;
    AnnouncementChoice choice;
    Formula announcement;  // realize_choice on the contracted model
};

struct Verdict {
    bool truth = false;
    std::size_t state = 0;
    /// First successful choice for a true <G>f or <[G]>f.
    std::optional<ChoiceReport> witness;
    /// For a false <[G]>f: the first G-choice and an opponent choice that
    /// defeats it.  For a false [G]f or [<G>]f only `refutation` is set: the
    /// first G-choice after which f fails (whatever the opponents say).
    std::optional<ChoiceReport> refuted_choice;
    std::optional<ChoiceReport> refutation;
};

nlohmann::json to_json(const Verdict& v, const KripkeModel& m);

class Evaluator {
public:
    explicit Evaluator(const KripkeModel& model, EvalOptions options = {});

    const KripkeModel& model() const { return contraction_.original; }
    const ContractionMap& contraction() const { return contraction_; }
    /// The contracted model all evaluation happens on.
    const KripkeModel& root() const { return contraction_.contracted; }

    /// Throws BindingError if f mentions undeclared agents or propositions.
    void bind(const Formula& f) const;

    /// States of the original model where f holds.
    StateSet extension(const Formula& f);
    bool eval(std::size_t state, const Formula& f);
    Verdict check(std::size_t state, const Formula& f);

    /// Extension within the restriction of the contracted root to `domain`
    /// (in contracted-root states).
    StateSet extension_in(StateSet domain, const Formula& f);

    /// Choices for `group` at `state` of the restriction of the contracted
    /// root to `domain`, in enumeration order.
    std::vector<AnnouncementChoice> choices(StateSet domain, std::size_t state, const AgentSet& group);

    std::size_t memo_size() const { return memo_.size(); }

private:
    struct Key {
        std::uint64_t domain;
        const void* node;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    struct Entry {
        Formula pin;  // keeps the node alive while its address is a key
        StateSet ext;
    };

    StateSet ext(StateSet domain, const Formula& f);
    StateSet compute(StateSet domain, const Formula& f);
    const std::vector<std::vector<StateSet>>& agent_blocks(StateSet domain);
    std::vector<std::size_t> agent_indices(const AgentSet& group) const;
    AgentSet complement(const AgentSet& group) const;
    ChoiceReport report(const AgentSet& group, const AnnouncementChoice& c, std::size_t point) const;

    ContractionMap contraction_;
    EvalOptions options_;
    std::unordered_map<Key, Entry, KeyHash> memo_;
    std::unordered_map<std::uint64_t, std::vector<std::vector<StateSet>>> blocks_;
};

/// Convenience wrappers; each builds a fresh evaluator.
StateSet extension(const KripkeModel& m, const Formula& f);
bool eval(const KripkeModel& m, std::size_t s, const Formula& f);
Verdict check(const PointedModel& pm, const Formula& f);

/// Choices for `group` at `w` on a contracted model: per agent, every union
/// of that agent's classes containing w's class, by increasing number of
/// classes then lexicographically by class order; the product is taken in
/// agent-name order.  The empty group yields the single empty choice.
std::vector<AnnouncementChoice> group_choices(const KripkeModel& m, std::size_t w, const AgentSet& group);

}  // namespace cogal

#endif  // COGAL_CHECKER_HPP
