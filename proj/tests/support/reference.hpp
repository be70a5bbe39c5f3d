// Naive evaluator used as an oracle.  It follows the semantic clauses
// literally: every announcement materializes the updated model, and every
// quantifier contracts the current model and enumerates group_choices on it.
// No memoization, no masks over a shared root.

#ifndef COGAL_TESTS_REFERENCE_HPP
#define COGAL_TESTS_REFERENCE_HPP

#include <bit>

#include "cogal/checker.hpp"
#include "cogal/model.hpp"

namespace cogal::reference {

bool eval(const KripkeModel& m, std::size_t s, const Formula& f);

inline StateSet extension(const KripkeModel& m, const Formula& f) {
    StateSet out;
    for (std::size_t s = 0; s < m.num_states(); ++s)
        if (reference::eval(m, s, f)) out.insert(s);
    return out;
}

// Index of s in the restriction of a model to keep.
inline std::size_t index_in(StateSet keep, std::size_t s) {
    return static_cast<std::size_t>(std::popcount(keep.bits() & ((std::uint64_t{1} << s) - 1)));
}

inline AgentSet others(const KripkeModel& m, const AgentSet& g) {
    AgentSet out;
    for (const auto& a : m.agents())
        if (!g.contains(a)) out.insert(a);
    return out;
}

inline bool eval(const KripkeModel& m, std::size_t s, const Formula& f) {
    const auto in = [&](const KripkeModel& sub, StateSet keep, const Formula& g) {
        return reference::eval(sub, index_in(keep, s), g);
    };
    switch (f.op()) {
        case Op::Atom: return m.holds(*m.prop_index(f.name()), s);
        case Op::Top: return true;
        case Op::Bot: return false;
        case Op::Not: return !reference::eval(m, s, f.arg(0));
        case Op::And: return reference::eval(m, s, f.arg(0)) && reference::eval(m, s, f.arg(1));
        case Op::Or: return reference::eval(m, s, f.arg(0)) || reference::eval(m, s, f.arg(1));
        case Op::Imp: return !reference::eval(m, s, f.arg(0)) || reference::eval(m, s, f.arg(1));
        case Op::Iff: return reference::eval(m, s, f.arg(0)) == reference::eval(m, s, f.arg(1));
        case Op::Know: {
            const StateSet block = m.block_of(*m.agent_index(f.name()), s);
            for (std::size_t t : block.members())
                if (!reference::eval(m, t, f.arg(0))) return false;
            return true;
        }
        case Op::PaBox:
        case Op::PaDia: {
            if (!reference::eval(m, s, f.arg(0))) return f.op() == Op::PaBox;
            const StateSet keep = reference::extension(m, f.arg(0));
            return in(update(m, keep), keep, f.arg(1));
        }
        default: break;
    }
    // Quantifiers: contract first, then enumerate choices on the quotient.
    const ContractionMap cm = bisim_contract(m);
    const KripkeModel& c = cm.contracted;
    const std::size_t w = cm.mapping[s];
    const auto holds_after = [&](StateSet keep) { return reference::eval(update(c, keep), index_in(keep, w), f.arg(0)); };
    const auto mine = group_choices(c, w, f.group());
    switch (f.op()) {
        case Op::GroupBox:
            for (const auto& x : mine)
                if (!holds_after(x.intersection(c.all()))) return false;
            return true;
        case Op::GroupDia:
            for (const auto& x : mine)
                if (holds_after(x.intersection(c.all()))) return true;
            return false;
        default: break;
    }
    const auto theirs = group_choices(c, w, others(m, f.group()));
    const auto answered = [&](const AnnouncementChoice& x) {
        for (const auto& y : theirs)
            if (holds_after(x.intersection(y.intersection(c.all())))) return true;
        return false;
    };
    const auto forced = [&](const AnnouncementChoice& x) {
        for (const auto& y : theirs)
            if (!holds_after(x.intersection(y.intersection(c.all())))) return false;
        return true;
    };
    if (f.op() == Op::CoalBox) {
        for (const auto& x : mine)
            if (!answered(x)) return false;
        return true;
    }
    for (const auto& x : mine)
        if (forced(x)) return true;
    return false;
}

}  // namespace cogal::reference

#endif  // COGAL_TESTS_REFERENCE_HPP
