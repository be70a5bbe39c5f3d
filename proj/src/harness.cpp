#include "cogal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cogal/checker.hpp"
#include "cogal/translate.hpp"

namespace cogal {

// ── Parameters and randomness ───────────────────────────────────────────────

void GenParams::validate() const {
    if (max_states < 1 || max_states > kMaxStates) throw std::invalid_argument("max_states must be in [1, 64]");
    if (agents.empty()) throw std::invalid_argument("at least one agent is required");
    if (props.empty()) throw std::invalid_argument("at least one proposition is required");
    // Reuse the model validator for identifier syntax and uniqueness.
    try {
        KripkeModel probe({"s0"}, agents, props, std::vector<std::vector<StateSet>>(agents.size(), {StateSet::single(0)}),
                          std::vector<StateSet>(props.size()));
    } catch (const ModelError& e) {
        throw std::invalid_argument(e.what());
    }
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::size_t uniform(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool coin(std::mt19937_64& rng, unsigned percent) { return rng() % 100 < percent; }

std::vector<std::string> state_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("s" + std::to_string(i));
    return out;
}

// Blocks from a labelling of states 0..n-1.
std::vector<StateSet> blocks_of_labels(const std::vector<std::size_t>& labels) {
    std::map<std::size_t, StateSet> by_label;
    for (std::size_t s = 0; s < labels.size(); ++s) by_label[labels[s]].insert(s);
    std::vector<StateSet> out;
    for (const auto& [label, set] : by_label) out.push_back(set);
    return out;
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
    const std::uint64_t mixed = splitmix(splitmix(seed) ^ fnv1a(stream)) ^ splitmix(index + 0x632be59bd9b4e019ULL);
    return std::mt19937_64(mixed);
}

KripkeModel random_model(const GenParams& p, std::size_t index) {
    std::mt19937_64 rng = make_rng(p.seed, "model", index);
    const std::size_t n = 1 + uniform(rng, p.max_states);
    std::vector<std::vector<StateSet>> partitions;
    for (std::size_t a = 0; a < p.agents.size(); ++a) {
        std::vector<std::size_t> labels(n);
        for (auto& l : labels) l = uniform(rng, n);
        partitions.push_back(blocks_of_labels(labels));
    }
    std::vector<StateSet> valuation(p.props.size());
    for (auto& v : valuation)
        for (std::size_t s = 0; s < n; ++s)
            if (coin(rng, 50)) v.insert(s);
    return KripkeModel(state_names(n), p.agents, p.props, partitions, std::move(valuation));
}

namespace {

// Restricted growth strings of length n, i.e. all set partitions of n states.
void all_partitions(std::size_t n, std::vector<std::size_t>& rgs, std::size_t max_label,
                    std::vector<std::vector<StateSet>>& out) {
    if (rgs.size() == n) {
        out.push_back(blocks_of_labels(rgs));
        return;
    }
    const std::size_t limit = rgs.empty() ? 0 : max_label + 1;
    for (std::size_t l = 0; l <= limit; ++l) {
        rgs.push_back(l);
        all_partitions(n, rgs, std::max(max_label, l), out);
        rgs.pop_back();
    }
}

}  // namespace

void enumerate_models(const std::vector<Agent>& agents, const std::vector<std::string>& props, std::size_t max_states,
                      const std::function<bool(const KripkeModel&)>& visit) {
    for (std::size_t n = 1; n <= max_states; ++n) {
        std::vector<std::vector<StateSet>> parts;
        std::vector<std::size_t> rgs;
        all_partitions(n, rgs, 0, parts);
        const std::size_t bits = n * props.size();
        if (bits >= 63) throw std::invalid_argument("enumeration bound too large");
        std::vector<std::size_t> choice(agents.size(), 0);
        for (;;) {
            std::vector<std::vector<StateSet>> partitions;
            for (std::size_t a = 0; a < agents.size(); ++a) partitions.push_back(parts[choice[a]]);
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
                std::vector<StateSet> valuation(props.size());
                for (std::size_t p = 0; p < props.size(); ++p)
                    valuation[p] = StateSet((v >> (p * n)) & ((std::uint64_t{1} << n) - 1));
                if (!visit(KripkeModel(state_names(n), agents, props, partitions, std::move(valuation)))) return;
            }
            // Odometer over the agents' partitions, last agent fastest.
            std::size_t a = agents.size();
            while (a > 0) {
                --a;
                if (++choice[a] < parts.size()) break;
                choice[a] = 0;
                if (a == 0) {
                    a = agents.size() + 1;
                    break;
                }
            }
            if (agents.empty() || a == agents.size() + 1) break;
        }
    }
}

// ── Random formulas ─────────────────────────────────────────────────────────

namespace {

AgentSet random_group(std::mt19937_64& rng, const std::vector<Agent>& agents) {
    AgentSet g;
    for (const auto& a : agents)
        if (coin(rng, 50)) g.insert(a);
    return g;
}

Formula gen_formula(std::mt19937_64& rng, const FormulaGen& gen, std::size_t modal_left, std::size_t height_left) {
    const auto leaf = [&]() {
        const std::size_t r = uniform(rng, 20);
        if (r == 0) return top();
        if (r == 1) return bot();
        return atom(gen.props[uniform(rng, gen.props.size())]);
    };
    if (height_left == 0 || coin(rng, 25)) return leaf();
    std::vector<int> ops{0, 1};  // not, binary
    if (modal_left > 0 && !gen.agents.empty()) {
        ops.insert(ops.end(), {2, 2});  // knowledge
        if (gen.fragment >= Fragment::PAL) ops.push_back(3);
        if (gen.fragment >= Fragment::GAL) ops.push_back(4);
        if (gen.fragment >= Fragment::CoGAL) ops.push_back(5);
    }
    const auto sub = [&](std::size_t modal) { return gen_formula(rng, gen, modal, height_left - 1); };
    switch (ops[uniform(rng, ops.size())]) {
        case 0: return neg(sub(modal_left));
        case 1: {
            Formula l = sub(modal_left);
            Formula r = sub(modal_left);
            const std::size_t kind = gen.surface ? uniform(rng, 4) : 0;
            if (kind == 1) return disj(l, r);
            if (kind == 2) return implies(l, r);
            if (kind == 3 && coin(rng, 50)) return iff(l, r);
            return conj(l, r);
        }
        case 2: return know(gen.agents[uniform(rng, gen.agents.size())], sub(modal_left - 1));
        case 3: {
            Formula ann = sub(modal_left - 1);
            Formula body = sub(modal_left - 1);
            return gen.surface && coin(rng, 30) ? announce_dia(ann, body) : announce(ann, body);
        }
        case 4: {
            AgentSet g = random_group(rng, gen.agents);
            Formula body = sub(modal_left - 1);
            return gen.surface && coin(rng, 50) ? group_dia(g, body) : group_box(g, body);
        }
        default: {
            AgentSet g = random_group(rng, gen.agents);
            Formula body = sub(modal_left - 1);
            return gen.surface && coin(rng, 50) ? coal_dia(g, body) : coal_box(g, body);
        }
    }
}

}  // namespace

Formula random_formula(std::mt19937_64& rng, const FormulaGen& gen) {
    if (gen.props.empty()) throw std::invalid_argument("random_formula needs at least one proposition");
    for (;;) {
        Formula f = gen_formula(rng, gen, gen.max_depth, gen.max_depth + 2);
        if (gen.max_size == 0 || size(f) <= gen.max_size) return f;
    }
}

Formula random_group_announcement(std::mt19937_64& rng, const FormulaGen& gen, const AgentSet& group) {
    FormulaGen el = gen;
    el.fragment = Fragment::EL;
    el.max_depth = std::min<std::size_t>(gen.max_depth, 1);
    std::vector<Formula> parts;
    for (const auto& a : group) parts.push_back(know(a, random_formula(rng, el)));
    return conj_all(parts);
}

// ── Countermodel search ─────────────────────────────────────────────────────

nlohmann::json Countermodel::to_json() const {
    nlohmann::json inst = nlohmann::json::object();
    for (const auto& [letter, f] : assignment) inst[letter] = render(f);
    return nlohmann::json{{"model", cogal::to_json(model)},
                          {"state", model.states().at(state)},
                          {"formula", render(instance)},
                          {"instantiation", inst}};
}

namespace {

std::vector<std::map<std::string, Formula>> assignments(const SearchOptions& o) {
    std::vector<std::map<std::string, Formula>> out{{}};
    for (const auto& letter : o.schema_vars) {
        std::vector<std::map<std::string, Formula>> next;
        for (const auto& partial : out) {
            for (const auto& f : o.pool) {
                auto a = partial;
                a[letter] = f;
                next.push_back(std::move(a));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::optional<Countermodel> refute_on(const KripkeModel& m, const Formula& f,
                                      const std::vector<std::map<std::string, Formula>>& insts) {
    Evaluator ev(m);
    for (const auto& a : insts) {
        const Formula inst = a.empty() ? f : substitute(f, a);
        const StateSet ext = ev.extension(inst);
        if (ext != m.all()) return Countermodel{m.with_designated((m.all() - ext).front()), (m.all() - ext).front(), a, inst};
    }
    return std::nullopt;
}

}  // namespace

std::optional<Countermodel> find_countermodel(const Formula& f, const GenParams& bounds, const SearchOptions& options) {
    if (!options.schema_vars.empty() && options.pool.empty())
        throw std::invalid_argument("schematic letters need an instantiation pool");
    GenParams p = bounds;
    const std::set<std::string> letters(options.schema_vars.begin(), options.schema_vars.end());
    for (const auto& a : agents_of(f))
        if (std::find(p.agents.begin(), p.agents.end(), a) == p.agents.end()) p.agents.push_back(a);
    const auto add_props = [&](const Formula& g) {
        for (const auto& q : atoms_of(g))
            if (!letters.contains(q) && std::find(p.props.begin(), p.props.end(), q) == p.props.end())
                p.props.push_back(q);
    };
    add_props(f);
    for (const auto& g : options.pool) {
        add_props(g);
        for (const auto& a : agents_of(g))
            if (std::find(p.agents.begin(), p.agents.end(), a) == p.agents.end()) p.agents.push_back(a);
    }
    if (p.props.empty()) p.props.push_back("p");
    if (p.agents.empty()) p.agents.push_back("a");
    p.validate();

    const auto insts = assignments(options);
    std::optional<Countermodel> found;
    std::size_t visited = 0;
    const std::size_t exhaustive = std::min(options.exhaustive_states, p.max_states);
    enumerate_models(p.agents, p.props, exhaustive, [&](const KripkeModel& m) {
        if (++visited > options.exhaustive_limit) return false;
        found = refute_on(m, f, insts);
        return !found;
    });
    if (found) return found;
    for (std::size_t i = 0; i < p.count; ++i) {
        if (auto c = refute_on(random_model(p, i), f, insts)) return c;
    }
    return std::nullopt;
}

// ── Suite items ─────────────────────────────────────────────────────────────

namespace {

struct Instance {
    Formula formula;
    std::map<std::string, Formula> assignment;
};

enum class ItemKind { Validity, Rule, Counterexample };

struct Context {
    const KripkeModel& model;
    std::mt19937_64& rng;
    FormulaGen pool;   // arbitrary formulas
    FormulaGen el;     // epistemic formulas
    std::size_t k;     // instantiations per group choice
    AgentSet all_agents;
    std::vector<AgentSet> groups;  // every subset of the agents

    Formula any() { return random_formula(rng, pool); }
    Formula epistemic() { return random_formula(rng, el); }
};

using Generator = std::function<std::vector<Instance>(Context&)>;

struct ItemSpec {
    std::string name;
    std::string schema;
    ItemKind kind = ItemKind::Validity;
    Generator gen;
    bool expect_failure = false;
    bool exploratory = false;
};

AgentSet minus(const AgentSet& all, const AgentSet& g) {
    AgentSet out;
    for (const auto& a : all)
        if (!g.contains(a)) out.insert(a);
    return out;
}

AgentSet unite(const AgentSet& g, const AgentSet& h) {
    AgentSet out = g;
    out.insert(h.begin(), h.end());
    return out;
}

// Instances of f(x, y, z) with x, y, z drawn from `draw`.
Generator letters3(std::function<Formula(Context&)> draw,
                   std::function<Formula(const Formula&, const Formula&, const Formula&)> f) {
    return [draw, f](Context& c) {
        std::vector<Instance> out;
        for (std::size_t i = 0; i < c.k; ++i) {
            Formula x = draw(c), y = draw(c), z = draw(c);
            out.push_back({f(x, y, z), {{"phi", x}, {"psi", y}, {"chi", z}}});
        }
        return out;
    };
}

Generator per_agent(std::function<Formula(const Agent&, const Formula&, const Formula&)> f) {
    return [f](Context& c) {
        std::vector<Instance> out;
        for (const auto& a : c.model.agents())
            for (std::size_t i = 0; i < c.k; ++i) {
                Formula x = c.any(), y = c.any();
                out.push_back({f(a, x, y), {{"phi", x}, {"psi", y}}});
            }
        return out;
    };
}

Generator per_group(std::function<Formula(Context&, const AgentSet&, const Formula&, const Formula&)> f) {
    return [f](Context& c) {
        std::vector<Instance> out;
        for (const auto& g : c.groups)
            for (std::size_t i = 0; i < c.k; ++i) {
                Formula x = c.any(), y = c.any();
                out.push_back({f(c, g, x, y), {{"phi", x}, {"psi", y}}});
            }
        return out;
    };
}

Formula tautology(std::size_t which, const Formula& x, const Formula& y, const Formula& z) {
    switch (which % 4) {
        case 0: return implies(x, implies(y, x));
        case 1: return implies(implies(x, implies(y, z)), implies(implies(x, y), implies(x, z)));
        case 2: return implies(implies(neg(y), neg(x)), implies(x, y));
        default: return disj(x, neg(x));
    }
}

Formula merge_instance(const Formula& psi, const std::map<Agent, Formula>& chis, const Formula& phi) {
    std::vector<Formula> inside{psi};
    std::vector<Formula> after;
    for (const auto& [a, chi] : chis) {
        inside.push_back(know(a, translate(announce(psi, chi))));
        after.push_back(know(a, chi));
    }
    return iff(announce(conj_all(inside), phi), announce(psi, announce(conj_all(after), phi)));
}

std::vector<ItemSpec> build_items() {
    std::vector<ItemSpec> items;
    const auto any = [](Context& c) { return c.any(); };

    items.push_back({"A0", "propositional tautologies over arbitrary formulas", ItemKind::Validity,
                     [](Context& c) {
                         std::vector<Instance> out;
                         for (std::size_t i = 0; i < 4 * c.k; ++i) {
                             Formula x = c.any(), y = c.any(), z = c.any();
                             out.push_back({tautology(i, x, y, z), {{"phi", x}, {"psi", y}, {"chi", z}}});
                         }
                         return out;
                     }});
    items.push_back({"A1", "K a (phi -> psi) -> (K a phi -> K a psi)", ItemKind::Validity,
                     per_agent([](const Agent& a, const Formula& x, const Formula& y) {
                         return implies(know(a, implies(x, y)), implies(know(a, x), know(a, y)));
                     })});
    items.push_back({"A2", "K a phi -> phi", ItemKind::Validity,
                     per_agent([](const Agent& a, const Formula& x, const Formula&) { return implies(know(a, x), x); })});
    items.push_back({"A3", "K a phi -> K a K a phi", ItemKind::Validity,
                     per_agent([](const Agent& a, const Formula& x, const Formula&) {
                         return implies(know(a, x), know(a, know(a, x)));
                     })});
    items.push_back({"A4", "~K a phi -> K a ~K a phi", ItemKind::Validity,
                     per_agent([](const Agent& a, const Formula& x, const Formula&) {
                         return implies(neg(know(a, x)), know(a, neg(know(a, x))));
                     })});
    items.push_back({"A5", "[phi] p <-> (phi -> p)", ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (const auto& p : c.model.props())
                             for (std::size_t i = 0; i < c.k; ++i) {
                                 Formula x = c.any();
                                 out.push_back({iff(announce(x, atom(p)), implies(x, atom(p))), {{"phi", x}}});
                             }
                         return out;
                     }});
    items.push_back({"A6", "[phi] ~psi <-> (phi -> ~[phi] psi)", ItemKind::Validity,
                     letters3(any, [](const Formula& x, const Formula& y, const Formula&) {
                         return iff(announce(x, neg(y)), implies(x, neg(announce(x, y))));
                     })});
    items.push_back({"A7", "[phi] (psi & chi) <-> [phi] psi & [phi] chi", ItemKind::Validity,
                     letters3(any, [](const Formula& x, const Formula& y, const Formula& z) {
                         return iff(announce(x, conj(y, z)), conj(announce(x, y), announce(x, z)));
                     })});
    items.push_back({"A8", "[phi] K a psi <-> (phi -> K a [phi] psi)", ItemKind::Validity,
                     per_agent([](const Agent& a, const Formula& x, const Formula& y) {
                         return iff(announce(x, know(a, y)), implies(x, know(a, announce(x, y))));
                     })});
    items.push_back({"A9", "[phi] [psi] chi <-> [phi & [phi] psi] chi", ItemKind::Validity,
                     letters3(any, [](const Formula& x, const Formula& y, const Formula& z) {
                         return iff(announce(x, announce(y, z)), announce(conj(x, announce(x, y)), z));
                     })});
    items.push_back({"A10", "[G] phi -> [psi] phi, psi a group announcement of G", ItemKind::Validity,
                     [](Context& c) {
                         std::vector<Instance> out;
                         for (const auto& g : c.groups)
                             for (std::size_t i = 0; i < c.k; ++i) {
                                 Formula x = c.any();
                                 Formula psi = random_group_announcement(c.rng, c.el, g);
                                 out.push_back({implies(group_box(g, x), announce(psi, x)), {{"phi", x}, {"psi", psi}}});
                             }
                         return out;
                     }});
    items.push_back({"A11", "<[G]> phi -> <G> [A\\G] phi", ItemKind::Validity,
                     per_group([](Context& c, const AgentSet& g, const Formula& x, const Formula&) {
                         return implies(coal_dia(g, x), group_dia(g, group_box(minus(c.all_agents, g), x)));
                     })});

    items.push_back({"C0", "propositional tautologies over coalition formulas", ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (std::size_t i = 0; i < 4 * c.k; ++i) {
                             const auto pick = [&] { return coal_dia(c.groups[uniform(c.rng, c.groups.size())], c.any()); };
                             Formula x = pick(), y = pick(), z = pick();
                             out.push_back({tautology(i, x, y, z), {{"phi", x}, {"psi", y}, {"chi", z}}});
                         }
                         return out;
                     }});
    items.push_back({"C1", "~<[G]> bot", ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (const auto& g : c.groups) out.push_back({neg(coal_dia(g, bot())), {}});
                         return out;
                     }});
    items.push_back({"C2", "<[G]> top", ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (const auto& g : c.groups) out.push_back({coal_dia(g, top()), {}});
                         return out;
                     }});
    items.push_back({"C3", "~<[{}]> ~phi -> <[A]> phi", ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (std::size_t i = 0; i < 2 * c.k; ++i) {
                             Formula x = c.any();
                             out.push_back({implies(neg(coal_dia({}, neg(x))), coal_dia(c.all_agents, x)), {{"phi", x}}});
                         }
                         return out;
                     }});
    items.push_back({"C4", "<[G]> (phi & psi) -> <[G]> phi", ItemKind::Validity,
                     per_group([](Context&, const AgentSet& g, const Formula& x, const Formula& y) {
                         return implies(coal_dia(g, conj(x, y)), coal_dia(g, x));
                     })});
    items.push_back({"C5", "<[G]> phi & <[H]> psi -> <[G u H]> (phi & psi), G and H disjoint", ItemKind::Validity,
                     [](Context& c) {
                         std::vector<Instance> out;
                         for (const auto& g : c.groups)
                             for (const auto& h : c.groups) {
                                 if (!minus(g, minus(g, h)).empty()) continue;
                                 Formula x = c.any(), y = c.any();
                                 out.push_back({implies(conj(coal_dia(g, x), coal_dia(h, y)), coal_dia(unite(g, h), conj(x, y))),
                                                {{"phi", x}, {"psi", y}}});
                             }
                         return out;
                     }});

    // Rules: the instance is the premise; the item checks the conclusion
    // wherever the premise holds on every submodel.
    const auto premises = [](Context& c) {
        std::vector<Instance> out;
        for (std::size_t i = 0; i < 4 * c.k; ++i) {
            Formula x = c.any(), y = c.any();
            const Agent& a = c.model.agents()[uniform(c.rng, c.model.agents().size())];
            const AgentSet& g = c.groups[uniform(c.rng, c.groups.size())];
            Formula premise;
            switch (i % 4) {
                case 0: premise = x; break;
                case 1: premise = implies(know(a, x), x); break;
                case 2: premise = implies(neg(know(a, x)), know(a, neg(know(a, x)))); break;
                default: premise = implies(coal_dia(g, x), group_dia(g, group_box(minus(c.all_agents, g), x))); break;
            }
            out.push_back({premise, {{"phi", premise}, {"psi", y}}});
        }
        return out;
    };
    items.push_back({"R1", "phi valid => K a phi valid", ItemKind::Rule, [premises](Context& c) {
                         auto out = premises(c);
                         for (auto& inst : out) {
                             const Agent& a = c.model.agents()[uniform(c.rng, c.model.agents().size())];
                             inst.formula = implies(inst.formula, know(a, inst.formula));
                         }
                         return out;
                     }});
    items.push_back({"R2", "phi valid => [psi] phi valid", ItemKind::Rule, [premises](Context& c) {
                         auto out = premises(c);
                         for (auto& inst : out) inst.formula = implies(inst.formula, announce(inst.assignment["psi"], inst.formula));
                         return out;
                     }});
    items.push_back({"R3", "phi valid => [G] phi valid", ItemKind::Rule, [premises](Context& c) {
                         auto out = premises(c);
                         for (auto& inst : out)
                             inst.formula = implies(inst.formula, group_box(c.groups[uniform(c.rng, c.groups.size())], inst.formula));
                         return out;
                     }});
    items.push_back({"R4", "phi valid => [<G>] phi valid", ItemKind::Rule, [premises](Context& c) {
                         auto out = premises(c);
                         for (auto& inst : out)
                             inst.formula = implies(inst.formula, coal_box(c.groups[uniform(c.rng, c.groups.size())], inst.formula));
                         return out;
                     }});

    items.push_back({"merge_announcements",
                     "[psi & K a t([psi] chi_a) & ...] phi <-> [psi] [K a chi_a & ...] phi, psi and chi epistemic",
                     ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (std::size_t i = 0; i < 4 * c.k; ++i) {
                             AgentSet speakers = random_group(c.rng, c.model.agents());
                             if (speakers.empty()) speakers.insert(c.model.agents()[uniform(c.rng, c.model.agents().size())]);
                             Formula psi = c.epistemic(), phi = c.any();
                             std::map<Agent, Formula> chis;
                             std::map<std::string, Formula> assignment{{"psi", psi}, {"phi", phi}};
                             for (const auto& a : speakers) {
                                 chis[a] = c.epistemic();
                                 assignment["chi_" + a] = chis[a];
                             }
                             out.push_back({merge_instance(psi, chis, phi), std::move(assignment)});
                         }
                         return out;
                     }});
    items.push_back({"coalition_composition", "<[G]> <[H]> phi -> <[G u H]> phi", ItemKind::Validity, [](Context& c) {
                         std::vector<Instance> out;
                         for (const auto& g : c.groups)
                             for (const auto& h : c.groups) {
                                 Formula x = c.any();
                                 out.push_back({implies(coal_dia(g, coal_dia(h, x)), coal_dia(unite(g, h), x)), {{"phi", x}}});
                             }
                         return out;
                     }});
    items.push_back({"coalition_composition_same", "<[G]> <[G]> phi -> <[G]> phi", ItemKind::Validity,
                     per_group([](Context&, const AgentSet& g, const Formula& x, const Formula&) {
                         return implies(coal_dia(g, coal_dia(g, x)), coal_dia(g, x));
                     })});
    items.push_back({"coalition_split", "<[G u H]> phi -> <[G]> <[H]> phi is not valid", ItemKind::Counterexample,
                     nullptr, true});

    ItemSpec converse{"a11_converse", "<G> [A\\G] phi -> <[G]> phi (open; failures logged)", ItemKind::Validity,
                      per_group([](Context& c, const AgentSet& g, const Formula& x, const Formula&) {
                          return implies(group_dia(g, group_box(minus(c.all_agents, g), x)), coal_dia(g, x));
                      })};
    converse.exploratory = true;
    items.push_back(std::move(converse));

    items.push_back({"canary", "<[{a}]> bot (must fail)", ItemKind::Validity, [](Context& c) {
                         return std::vector<Instance>{{coal_dia({c.model.agents().front()}, bot()), {}}};
                     },
                     true});

    std::sort(items.begin(), items.end(), [](const ItemSpec& x, const ItemSpec& y) { return x.name < y.name; });
    return items;
}

struct Tally {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::optional<Countermodel> first;
};

std::vector<AgentSet> all_groups(const std::vector<Agent>& agents) {
    std::vector<AgentSet> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << agents.size()); ++mask) {
        AgentSet g;
        for (std::size_t i = 0; i < agents.size(); ++i)
            if ((mask >> i) & 1U) g.insert(agents[i]);
        out.push_back(std::move(g));
    }
    return out;
}

// All nonempty restrictions of a model, each with its own evaluator.
class Submodels {
public:
    Submodels(const KripkeModel& m, const EvalOptions& opts) {
        for (std::uint64_t mask = 1; mask <= m.all().bits(); ++mask) models_.push_back(update(m, StateSet(mask)));
        evaluators_.reserve(models_.size());
        for (const auto& sub : models_) evaluators_.emplace_back(sub, opts);
    }

    // A submodel and state where f fails, if any.
    std::optional<std::pair<std::size_t, std::size_t>> refute(const Formula& f) {
        for (std::size_t i = 0; i < models_.size(); ++i) {
            const StateSet ext = evaluators_[i].extension(f);
            if (ext != models_[i].all()) return std::pair{i, (models_[i].all() - ext).front()};
        }
        return std::nullopt;
    }

    const KripkeModel& model(std::size_t i) const { return models_[i]; }

private:
    std::vector<KripkeModel> models_;
    std::vector<Evaluator> evaluators_;
};

Tally run_on_model(const ItemSpec& item, const KripkeModel& m, const GenParams& params, std::size_t index,
                   const SuiteOptions& options) {
    const std::size_t k = options.instantiations;
    EvalOptions eval_options;
    eval_options.on_choice = options.on_choice;
    std::mt19937_64 rng = make_rng(params.seed, item.name, index);
    Context ctx{m, rng, {}, {}, k, AgentSet(m.agents().begin(), m.agents().end()), all_groups(m.agents())};
    ctx.pool = FormulaGen{m.agents(), m.props(), 2, Fragment::CoGAL, true, 9};
    ctx.el = FormulaGen{m.agents(), m.props(), 2, Fragment::EL, true, 9};
    const auto instances = item.gen(ctx);

    Tally t;
    if (item.kind == ItemKind::Rule) {
        Submodels subs(m, eval_options);
        for (const auto& inst : instances) {
            // inst.formula is premise -> conclusion
            if (subs.refute(inst.formula.arg(0))) continue;
            ++t.instances;
            if (auto bad = subs.refute(inst.formula.arg(1))) {
                ++t.failures;
                if (!t.first) {
                    const KripkeModel& sub = subs.model(bad->first);
                    t.first = Countermodel{sub.with_designated(bad->second), bad->second, inst.assignment,
                                           inst.formula.arg(1)};
                }
            }
        }
        return t;
    }
    Evaluator ev(m, eval_options);
    for (const auto& inst : instances) {
        ++t.instances;
        const StateSet ext = ev.extension(inst.formula);
        if (ext == m.all()) continue;
        ++t.failures;
        if (!t.first) {
            const std::size_t s = (m.all() - ext).front();
            t.first = Countermodel{m.with_designated(s), s, inst.assignment, inst.formula};
        }
    }
    return t;
}

ItemResult run_counterexample(const ItemSpec& item, const GenParams& params) {
    ItemResult r;
    r.name = item.name;
    r.schema = item.schema;
    r.expect_failure = true;
    r.instances = 1;
    const Formula goal = split_coalition_goal();
    const Formula claim = implies(coal_dia({"a", "b"}, goal), coal_dia({"a"}, coal_dia({"b"}, goal)));
    const KripkeModel shipped = split_coalition_countermodel();
    if (!eval(shipped, *shipped.designated(), claim)) {
        r.failures = 1;
        r.countermodel = Countermodel{shipped, *shipped.designated(), {{"phi", goal}}, claim};
        return r;
    }
    GenParams bounds = params;
    bounds.agents = {"a", "b", "c"};
    bounds.props = {"p", "q", "r"};
    SearchOptions opts;
    opts.exhaustive_states = 0;
    if (auto c = find_countermodel(claim, bounds, opts)) {
        r.failures = 1;
        c->assignment = {{"phi", goal}};
        r.countermodel = std::move(c);
    }
    return r;
}

}  // namespace

bool ItemResult::passed() const {
    if (exploratory) return true;
    if (expect_failure) return failures > 0 && countermodel.has_value();
    return failures == 0;
}

bool SuiteReport::passed() const {
    return std::all_of(items.begin(), items.end(), [](const ItemResult& r) { return r.passed(); });
}

std::string SuiteReport::to_text() const {
    std::ostringstream out;
    const auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
        return s;
    };
    out << "suite seed=" << params.seed << " models=" << params.count << " max_states=" << params.max_states
        << " agents=" << join(params.agents) << " props=" << join(params.props) << "\n";
    std::size_t passed_items = 0;
    for (const auto& r : items) {
        const char* status = r.exploratory ? "INFO" : (r.passed() ? "PASS" : "FAIL");
        if (r.passed()) ++passed_items;
        out << status << "  " << r.name << "  instances=" << r.instances << " failures=" << r.failures;
        if (r.expect_failure) out << " (failure expected)";
        out << "\n      " << r.schema << "\n";
        if (r.countermodel) {
            out << "      countermodel at " << r.countermodel->model.states()[r.countermodel->state] << ": "
                << render(r.countermodel->instance) << "\n"
                << "      model " << cogal::to_json(r.countermodel->model).dump() << "\n";
        }
    }
    out << "totals: items=" << items.size() << " passed=" << passed_items << " failed=" << items.size() - passed_items
        << "\n";
    return out.str();
}

nlohmann::json SuiteReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : items) {
        nlohmann::json j{{"name", r.name},
                         {"schema", r.schema},
                         {"instances", r.instances},
                         {"failures", r.failures},
                         {"expect_failure", r.expect_failure},
                         {"exploratory", r.exploratory},
                         {"passed", r.passed()}};
        j["countermodel"] = r.countermodel ? r.countermodel->to_json() : nlohmann::json(nullptr);
        arr.push_back(std::move(j));
    }
    return nlohmann::json{{"params",
                           {{"seed", params.seed},
                            {"models", params.count},
                            {"max_states", params.max_states},
                            {"agents", params.agents},
                            {"props", params.props}}},
                          {"items", std::move(arr)},
                          {"passed", passed()}};
}

std::vector<std::string> suite_item_names() {
    std::vector<std::string> out;
    for (const auto& item : build_items()) out.push_back(item.name);
    return out;
}

SuiteReport axiom_suite(const GenParams& params, const SuiteOptions& options) {
    params.validate();
    auto items = build_items();
    if (!options.items.empty()) {
        std::vector<ItemSpec> chosen;
        for (auto& item : items) {
            const bool wanted = std::find(options.items.begin(), options.items.end(), item.name) != options.items.end() ||
                                (item.name == "coalition_split" &&
                                 std::find(options.items.begin(), options.items.end(), "prop4") != options.items.end());
            if (wanted) chosen.push_back(std::move(item));
        }
        for (const auto& name : options.items) {
            const bool known = name == "prop4" || std::any_of(chosen.begin(), chosen.end(),
                                                              [&](const ItemSpec& s) { return s.name == name; });
            if (!known) throw std::invalid_argument("unknown suite item '" + name + "'");
        }
        items = std::move(chosen);
    }

    std::vector<KripkeModel> models;
    models.reserve(params.count);
    for (std::size_t i = 0; i < params.count; ++i) models.push_back(random_model(params, i));

    // tallies[item][model], filled by workers, merged in index order.
    std::vector<std::vector<Tally>> tallies(items.size(), std::vector<Tally>(params.count));
    std::size_t threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.threads;
    threads = std::max<std::size_t>(1, std::min(threads, params.count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= params.count) return;
            try {
                for (std::size_t it = 0; it < items.size(); ++it)
                    if (items[it].kind != ItemKind::Counterexample)
                        tallies[it][i] = run_on_model(items[it], models[i], params, i, options);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    SuiteReport report;
    report.params = params;
    for (std::size_t it = 0; it < items.size(); ++it) {
        const ItemSpec& spec = items[it];
        if (spec.kind == ItemKind::Counterexample) {
            report.items.push_back(run_counterexample(spec, params));
            continue;
        }
        ItemResult r;
        r.name = spec.name;
        r.schema = spec.schema;
        r.expect_failure = spec.expect_failure;
        r.exploratory = spec.exploratory;
        for (auto& t : tallies[it]) {
            r.instances += t.instances;
            r.failures += t.failures;
            if (!r.countermodel && t.first) r.countermodel = std::move(t.first);
        }
        report.items.push_back(std::move(r));
    }
    return report;
}

// ── Shipped counterexample ──────────────────────────────────────────────────
//
// At w0 all of p, q, r hold and a knows q.  Announcing K a q removes w2 and
// w3, after which b knows p & q & r while a (w1) and c do not; c considers
// every state possible, so nothing she can truthfully announce removes a
// state.  If a moves alone, b answers K b p, which removes w1, and from then
// on a knows p & q & r.

KripkeModel split_coalition_countermodel() {
    nlohmann::json doc = {
        {"agents", {"a", "b", "c"}},
        {"props", {"p", "q", "r"}},
        {"states", {"w0", "w1", "w2", "w3"}},
        {"partitions",
         {{"a", {{"w0", "w1"}, {"w2"}, {"w3"}}},
          {"b", {{"w0", "w2"}, {"w1"}, {"w3"}}},
          {"c", {{"w0", "w1", "w2", "w3"}}}}},
        {"valuation", {{"p", {"w0", "w2", "w3"}}, {"q", {"w0", "w1", "w3"}}, {"r", {"w0", "w1", "w2"}}}},
        {"designated", "w0"},
    };
    return validate(doc);
}

Formula split_coalition_goal() {
    const Formula pqr = conj(conj(atom("p"), atom("q")), atom("r"));
    return conj(conj(know("b", pqr), neg(know("a", pqr))), neg(know("c", pqr)));
}

std::size_t threads_from_env() {
    const char* raw = std::getenv("COGAL_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(raw, &end, 10);
    if (end == raw || *end != '\0') throw std::invalid_argument("COGAL_THREADS must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

}  // namespace cogal
