#include "cogal/checker.hpp"

#include <algorithm>
#include <numeric>

namespace cogal {

namespace {

// Every union of `blocks` that contains blocks[fixed], ordered by number of
// blocks and then lexicographically by block index.
std::vector<StateSet> unions_containing(const std::vector<StateSet>& blocks, std::size_t fixed) {
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (i != fixed) others.push_back(i);
    std::vector<std::vector<std::size_t>> subsets;
    const std::size_t n = others.size();
    subsets.reserve(std::size_t{1} << n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<std::size_t> pick;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1U) pick.push_back(others[i]);
        subsets.push_back(std::move(pick));
    }
    std::sort(subsets.begin(), subsets.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    std::vector<StateSet> out;
    out.reserve(subsets.size());
    for (const auto& pick : subsets) {
        StateSet u = blocks[fixed];
        for (std::size_t i : pick) u |= blocks[i];
        out.push_back(u);
    }
    return out;
}

std::size_t block_containing(const std::vector<StateSet>& blocks, std::size_t s) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].contains(s)) return i;
    throw std::logic_error("state outside every block");
}

// Cartesian product of per-agent options, first agent varying slowest.
std::vector<AnnouncementChoice> product(const std::vector<Agent>& agents,
                                        const std::vector<std::vector<StateSet>>& options) {
    std::vector<AnnouncementChoice> out{AnnouncementChoice{}};
    for (std::size_t i = 0; i < agents.size(); ++i) {
        std::vector<AnnouncementChoice> next;
        next.reserve(out.size() * options[i].size());
        for (const auto& partial : out) {
            for (StateSet set : options[i]) {
                AnnouncementChoice c = partial;
                c.sets.emplace(agents[i], set);
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace

// ── Evaluator ───────────────────────────────────────────────────────────────

std::size_t Evaluator::KeyHash::operator()(const Key& k) const noexcept {
    const std::size_t h = std::hash<std::uint64_t>{}(k.domain);
    return h ^ (std::hash<const void*>{}(k.node) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

Evaluator::Evaluator(const KripkeModel& model, EvalOptions options)
    : contraction_(bisim_contract(model)), options_(std::move(options)) {}

void Evaluator::bind(const Formula& f) const {
    const KripkeModel& m = model();
    switch (f.op()) {
        case Op::Atom:
            if (!m.prop_index(f.name())) throw BindingError("unbound proposition '" + f.name() + "'");
            break;
        case Op::Know:
            if (!m.agent_index(f.name())) throw BindingError("unbound agent '" + f.name() + "'");
            break;
        case Op::GroupBox:
        case Op::GroupDia:
        case Op::CoalBox:
        case Op::CoalDia:
            for (const auto& a : f.group())
                if (!m.agent_index(a)) throw BindingError("unbound agent '" + a + "' in group " + to_string(f.group()));
            break;
        default: break;
    }
    for (std::size_t i = 0; i < f.arity(); ++i) bind(f.arg(i));
}

StateSet Evaluator::extension(const Formula& f) {
    bind(f);
    return contraction_.preimage(ext(root().all(), f));
}

bool Evaluator::eval(std::size_t state, const Formula& f) {
    if (state >= model().num_states()) throw ModelError("state index out of range");
    bind(f);
    return ext(root().all(), f).contains(contraction_.mapping[state]);
}

StateSet Evaluator::extension_in(StateSet domain, const Formula& f) {
    bind(f);
    if (domain.empty() || !domain.subset_of(root().all())) throw ModelError("invalid evaluation domain");
    return ext(domain, f);
}

StateSet Evaluator::ext(StateSet domain, const Formula& f) {
    if (!options_.memoize) return compute(domain, f);
    const Key key{domain.bits(), f.id()};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.ext;
    const StateSet result = compute(domain, f);
    memo_.emplace(key, Entry{f, result});
    return result;
}

const std::vector<std::vector<StateSet>>& Evaluator::agent_blocks(StateSet domain) {
    if (auto it = blocks_.find(domain.bits()); it != blocks_.end()) return it->second;
    const KripkeModel& m = root();
    std::vector<std::vector<StateSet>> per_agent(m.agents().size());
    const std::vector<StateSet> bisim =
        options_.recontract ? bisimulation_classes(m, domain) : std::vector<StateSet>{};
    for (std::size_t a = 0; a < m.agents().size(); ++a) {
        std::vector<StateSet> blocks;
        for (StateSet b : m.blocks(a))
            if (b.intersects(domain)) blocks.push_back(b & domain);
        // Merge blocks linked by bisimilar states until no class straddles
        // two blocks.
        bool merged = true;
        while (merged) {
            merged = false;
            for (StateSet cls : bisim) {
                std::vector<StateSet> kept;
                StateSet joined;
                std::size_t hits = 0;
                for (StateSet b : blocks) {
                    if (b.intersects(cls)) {
                        joined |= b;
                        ++hits;
                    } else {
                        kept.push_back(b);
                    }
                }
                if (hits > 1) {
                    kept.push_back(joined);
                    blocks = std::move(kept);
                    merged = true;
                }
            }
        }
        std::sort(blocks.begin(), blocks.end(), [](StateSet x, StateSet y) { return x.front() < y.front(); });
        per_agent[a] = std::move(blocks);
    }
    return blocks_.emplace(domain.bits(), std::move(per_agent)).first->second;
}

std::vector<std::size_t> Evaluator::agent_indices(const AgentSet& group) const {
    std::vector<std::size_t> out;
    for (const auto& a : group) {
        auto idx = root().agent_index(a);
        if (!idx) throw BindingError("unbound agent '" + a + "'");
        out.push_back(*idx);
    }
    return out;
}

AgentSet Evaluator::complement(const AgentSet& group) const {
    AgentSet out;
    for (const auto& a : root().agents())
        if (!group.contains(a)) out.insert(a);
    return out;
}

std::vector<AnnouncementChoice> Evaluator::choices(StateSet domain, std::size_t state, const AgentSet& group) {
    const auto& blocks = agent_blocks(domain);
    const auto idx = agent_indices(group);
    std::vector<Agent> names(group.begin(), group.end());
    std::vector<std::vector<StateSet>> options;
    for (std::size_t a : idx) options.push_back(unions_containing(blocks[a], block_containing(blocks[a], state)));
    auto out = product(names, options);
    if (options_.on_choice)
        for (const auto& c : out) options_.on_choice(ChoiceEvent{&root(), domain, state, group, c});
    return out;
}

StateSet Evaluator::compute(StateSet domain, const Formula& f) {
    const KripkeModel& m = root();
    switch (f.op()) {
        case Op::Atom: return m.valuation(*m.prop_index(f.name())) & domain;
        case Op::Top: return domain;
        case Op::Bot: return StateSet{};
        case Op::Not: return domain - ext(domain, f.arg(0));
        case Op::And: return ext(domain, f.arg(0)) & ext(domain, f.arg(1));
        case Op::Or: return ext(domain, f.arg(0)) | ext(domain, f.arg(1));
        case Op::Imp: return (domain - ext(domain, f.arg(0))) | ext(domain, f.arg(1));
        case Op::Iff: {
            const StateSet l = ext(domain, f.arg(0));
            const StateSet r = ext(domain, f.arg(1));
            return (l & r) | (domain - (l | r));
        }
        case Op::Know: {
            const std::size_t a = *m.agent_index(f.name());
            const StateSet body = ext(domain, f.arg(0));
            StateSet out;
            for (std::size_t s : domain.members())
                if ((m.block_of(a, s) & domain).subset_of(body)) out.insert(s);
            return out;
        }
        case Op::PaBox:
        case Op::PaDia: {
            const StateSet keep = ext(domain, f.arg(0));
            const StateSet after = keep.empty() ? StateSet{} : ext(keep, f.arg(1));
            return f.op() == Op::PaBox ? (domain - keep) | after : after;
        }
        case Op::GroupBox:
        case Op::GroupDia: {
            const bool universal = f.op() == Op::GroupBox;
            StateSet out;
            for (std::size_t s : domain.members()) {
                bool result = universal;
                for (const auto& c : choices(domain, s, f.group())) {
                    const bool holds = ext(c.intersection(domain), f.arg(0)).contains(s);
                    if (holds != universal) {
                        result = holds;
                        break;
                    }
                }
                if (result) out.insert(s);
            }
            return out;
        }
        case Op::CoalBox:
        case Op::CoalDia: {
            // [<G>]f: every G-choice has an answer by the others after which f
            // holds.  <[G]>f: some G-choice survives every answer.
            const bool box = f.op() == Op::CoalBox;
            const AgentSet others = complement(f.group());
            StateSet out;
            for (std::size_t s : domain.members()) {
                const auto mine = choices(domain, s, f.group());
                const auto theirs = choices(domain, s, others);
                bool result = box;
                for (const auto& c : mine) {
                    const StateSet sg = c.intersection(domain);
                    bool inner = !box;
                    for (const auto& o : theirs) {
                        const bool holds = ext(o.intersection(sg), f.arg(0)).contains(s);
                        if (holds == box) {
                            inner = holds;
                            break;
                        }
                    }
                    if (inner != box) {
                        result = inner;
                        break;
                    }
                }
                if (result) out.insert(s);
            }
            return out;
        }
    }
    throw std::logic_error("unhandled operator");
}

ChoiceReport Evaluator::report(const AgentSet& group, const AnnouncementChoice& c, std::size_t point) const {
    ChoiceReport r;
    r.group = group;
    r.announcement = realize_choice(root(), point, group, c);
    for (const auto& [agent, set] : c.sets) r.choice.sets.emplace(agent, contraction_.preimage(set));
    return r;
}

Verdict Evaluator::check(std::size_t state, const Formula& f) {
    Verdict v;
    v.state = state;
    v.truth = eval(state, f);
    const StateSet all = root().all();
    const std::size_t s = contraction_.mapping[state];
    if (f.op() == Op::GroupDia && v.truth) {
        for (const auto& c : choices(all, s, f.group())) {
            if (ext(c.intersection(all), f.arg(0)).contains(s)) {
                v.witness = report(f.group(), c, s);
                break;
            }
        }
    }
    if (f.op() == Op::GroupBox && !v.truth) {
        for (const auto& c : choices(all, s, f.group())) {
            if (!ext(c.intersection(all), f.arg(0)).contains(s)) {
                v.refutation = report(f.group(), c, s);
                break;
            }
        }
    }
    if (f.op() == Op::CoalBox && !v.truth) {
        // A choice of G after which no opponent choice makes the body true.
        const auto theirs = choices(all, s, complement(f.group()));
        for (const auto& c : choices(all, s, f.group())) {
            const StateSet sg = c.intersection(all);
            const bool blocked = std::none_of(theirs.begin(), theirs.end(), [&](const AnnouncementChoice& o) {
                return ext(o.intersection(sg), f.arg(0)).contains(s);
            });
            if (blocked) {
                v.refutation = report(f.group(), c, s);
                break;
            }
        }
    }
    if (f.op() == Op::CoalDia) {
        const AgentSet others = complement(f.group());
        const auto mine = choices(all, s, f.group());
        const auto theirs = choices(all, s, others);
        for (const auto& c : mine) {
            const StateSet sg = c.intersection(all);
            const auto defeat = std::find_if(theirs.begin(), theirs.end(), [&](const AnnouncementChoice& o) {
                return !ext(o.intersection(sg), f.arg(0)).contains(s);
            });
            if (v.truth && defeat == theirs.end()) {
                v.witness = report(f.group(), c, s);
                break;
            }
            if (!v.truth) {
                v.refuted_choice = report(f.group(), c, s);
                v.refutation = report(others, *defeat, s);
                break;
            }
        }
    }
    return v;
}

// ── Free functions ──────────────────────────────────────────────────────────

StateSet extension(const KripkeModel& m, const Formula& f) { return Evaluator(m).extension(f); }

bool eval(const KripkeModel& m, std::size_t s, const Formula& f) { return Evaluator(m).eval(s, f); }

Verdict check(const PointedModel& pm, const Formula& f) { return Evaluator(pm.model).check(pm.point, f); }

std::vector<AnnouncementChoice> group_choices(const KripkeModel& m, std::size_t w, const AgentSet& group) {
    if (w >= m.num_states()) throw ModelError("state index out of range");
    std::vector<Agent> names(group.begin(), group.end());
    std::vector<std::vector<StateSet>> options;
    for (const auto& a : names) {
        auto idx = m.agent_index(a);
        if (!idx) throw BindingError("unbound agent '" + a + "'");
        options.push_back(unions_containing(m.blocks(*idx), m.block_index(*idx, w)));
    }
    return product(names, options);
}

nlohmann::json to_json(const Verdict& v, const KripkeModel& m) {
    const auto choice_json = [&](const ChoiceReport& r) {
        nlohmann::json sets = nlohmann::json::object();
        for (const auto& [agent, set] : r.choice.sets) sets[agent] = m.names(set);
        return nlohmann::json{{"group", std::vector<std::string>(r.group.begin(), r.group.end())},
                              {"choice", sets},
                              {"announcement", render(r.announcement)}};
    };
    nlohmann::json out{{"truth", v.truth}, {"state", m.states().at(v.state)}};
    if (v.witness) out["witness"] = choice_json(*v.witness);
    if (v.refuted_choice) out["refuted_choice"] = choice_json(*v.refuted_choice);
    if (v.refutation) out["refutation"] = choice_json(*v.refutation);
    return out;
}

}  // namespace cogal
