// ============================================================================
// cogal/formula.hpp — formulas of coalition and group announcement logic
// ============================================================================
//
//   Formulas are immutable trees with shared subterms.  A Formula is a cheap
//   handle (one shared_ptr); copying it never copies the tree.  Structural
//   equality is provided by operator==, node identity by id().
//
//   Surface connectives (| -> <-> top bot and the four diamonds) are kept in
//   the tree so that render() reproduces what was parsed.  normalize() maps a
//   formula onto the primitive basis
//
//       p | top | ~f | f & g | K a f | [f] g | [G] f | [<G>] f
//
//   which is what the complexity measures and the PAL translation work on.
//
// ============================================================================

#ifndef COGAL_FORMULA_HPP
#define COGAL_FORMULA_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogal {

using Agent = std::string;
using AgentSet = std::set<Agent>;

/// Renders a group as "{a,b}".
std::string to_string(const AgentSet& group);

enum class Op : std::uint8_t {
    Atom,
    Top,
    Bot,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Know,      // K a f
    PaBox,     // [f] g
    PaDia,     // <f> g
    GroupBox,  // [G] f
    GroupDia,  // <G> f
    CoalBox,   // [<G>] f
    CoalDia,   // <[G]> f
};

std::string_view op_name(Op op);

class Formula {
public:
    struct Node;

    Formula();  // top

    Op op() const;
    /// Proposition name for Atom, agent name for Know, empty otherwise.
    const std::string& name() const;
    /// Group for the four quantified operators, empty otherwise.
    const AgentSet& group() const;
    std::size_t arity() const;
    /// Children: announcement then body for PaBox/PaDia, lhs then rhs for
    /// binary connectives, the single operand otherwise.
    const Formula& arg(std::size_t i) const;

    /// Stable address of the underlying node; equal ids imply equal formulas.
    const void* id() const { return node_.get(); }

    friend bool operator==(const Formula& lhs, const Formula& rhs);
    friend bool operator!=(const Formula& lhs, const Formula& rhs) { return !(lhs == rhs); }

    static Formula make(Op op, std::string name, AgentSet group, std::vector<Formula> args);

private:
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Formula::Node {
    Op op;
    std::string name;
    AgentSet group;
    std::vector<Formula> args;
};

// ── Builders ────────────────────────────────────────────────────────────────

Formula atom(std::string name);
Formula top();
Formula bot();
Formula neg(Formula f);
Formula conj(Formula lhs, Formula rhs);
Formula disj(Formula lhs, Formula rhs);
Formula implies(Formula lhs, Formula rhs);
Formula iff(Formula lhs, Formula rhs);
Formula know(Agent agent, Formula f);
Formula announce(Formula announcement, Formula body);
Formula announce_dia(Formula announcement, Formula body);
Formula group_box(AgentSet group, Formula f);
Formula group_dia(AgentSet group, Formula f);
Formula coal_box(AgentSet group, Formula f);
Formula coal_dia(AgentSet group, Formula f);

/// Left-nested conjunction; top for an empty list.
Formula conj_all(const std::vector<Formula>& fs);
/// Left-nested disjunction; bot for an empty list.
Formula disj_all(const std::vector<Formula>& fs);

// ── Syntax ──────────────────────────────────────────────────────────────────

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected,
               const std::string& found);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::vector<std::string> expected_;
};

/// Parses the ASCII concrete syntax.  Throws ParseError.
Formula parse(std::string_view text);

/// Inverse of parse with minimal parentheses.
std::string render(const Formula& f);

// ── Classification and measures ─────────────────────────────────────────────

enum class Fragment : std::uint8_t { EL = 0, PAL = 1, GAL = 2, CoGAL = 3 };

std::string_view fragment_name(Fragment fr);

/// Smallest of EL ⊂ PAL ⊂ GAL ⊂ CoGAL containing f.
Fragment fragment(const Formula& f);

/// True iff f is, up to associativity of &, a conjunction with exactly one
/// conjunct K i f_i for each i in group, each f_i epistemic.  For the empty
/// group only top qualifies.
bool is_group_announcement(const Formula& f, const AgentSet& group);

/// Rewrites derived connectives into the primitive basis.  Idempotent.
Formula normalize(const Formula& f);

/// Best-effort inverse of normalize for display: ~(f & ~g) becomes f -> g,
/// ~(~f & ~g) becomes f | g, ~~f becomes f, and the boxed duals become
/// diamonds.
Formula resugar(const Formula& f);

/// Weighted size; announcements weigh their body three times.
std::size_t size(const Formula& f);
/// Nesting depth of group quantifiers (announcements add the depths of both
/// sides; coalition quantifiers are transparent).
std::size_t depth_pa(const Formula& f);
/// Same as depth_pa with the roles of group and coalition quantifiers swapped.
std::size_t depth_ca(const Formula& f);

/// Lexicographic order on (depth_ca, depth_pa, size).
bool order_lt(const Formula& lhs, const Formula& rhs);

/// Nesting depth of K and of all announcement and quantifier operators.
std::size_t modal_depth(const Formula& f);

std::set<std::string> atoms_of(const Formula& f);
/// Agents named by K operators and by groups.
AgentSet agents_of(const Formula& f);

/// Replaces atoms by formulas.  Atoms absent from the map are kept.
Formula substitute(const Formula& f, const std::map<std::string, Formula>& assignment);

// ── Necessity forms ─────────────────────────────────────────────────────────

/// A context with exactly one hole, built from implication tails, knowledge
/// and announcement prefixes.  The hole is implicit at the end of the chain.
class NecessityForm {
public:
    enum class Kind : std::uint8_t { Imp, Know, Announce };

    struct Step {
        Kind kind;
        Formula formula;  // premise or announcement
        Agent agent;      // for Know
    };

    NecessityForm() = default;  // the bare hole

    /// f -> this
    NecessityForm under_implication(Formula premise) const;
    /// K a this
    NecessityForm under_knowledge(Agent agent) const;
    /// [f] this
    NecessityForm under_announcement(Formula announcement) const;

    const std::vector<Step>& steps() const { return steps_; }
    bool is_hole() const { return steps_.empty(); }

    Formula instantiate(const Formula& f) const;
    std::string render() const;

private:
    std::vector<Step> steps_;  // outermost first
};

}  // namespace cogal

#endif  // COGAL_FORMULA_HPP
