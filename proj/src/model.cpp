#include "cogal/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cogal {

std::vector<std::size_t> StateSet::members() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
}

namespace {

bool valid_identifier(const std::string& s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    if (s == "top" || s == "bot") return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

template <typename T>
std::optional<std::size_t> index_in(const std::vector<T>& xs, std::string_view name) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] == name) return i;
    return std::nullopt;
}

void require_unique(const std::vector<std::string>& xs, const char* what) {
    std::set<std::string> seen;
    for (const auto& x : xs)
        if (!seen.insert(x).second) throw ModelError(std::string("duplicate ") + what + " '" + x + "'");
}

// Assigns consecutive ids to signatures in order of first appearance over the
// states of `domain`.
template <typename Sig>
std::size_t number_by_first_appearance(const std::vector<Sig>& sigs, StateSet domain, std::vector<std::size_t>& ids) {
    std::map<Sig, std::size_t> seen;
    for (std::size_t s : domain.members()) {
        auto [it, fresh] = seen.try_emplace(sigs[s], seen.size());
        ids[s] = it->second;
    }
    return seen.size();
}

std::vector<StateSet> blocks_from_ids(const std::vector<std::size_t>& ids, std::size_t count, StateSet domain) {
    std::vector<StateSet> blocks(count);
    for (std::size_t s : domain.members()) blocks[ids[s]].insert(s);
    return blocks;
}

}  // namespace

// ── KripkeModel ─────────────────────────────────────────────────────────────

KripkeModel::KripkeModel(std::vector<std::string> states, std::vector<Agent> agents, std::vector<std::string> props,
                         const std::vector<std::vector<StateSet>>& partitions, std::vector<StateSet> valuation,
                         std::optional<std::size_t> designated)
    : states_(std::move(states)),
      agents_(std::move(agents)),
      props_(std::move(props)),
      valuation_(std::move(valuation)),
      designated_(designated) {
    if (states_.empty()) throw ModelError("empty model: at least one state is required");
    if (states_.size() > kMaxStates)
        throw ModelError("too many states: " + std::to_string(states_.size()) + " > " + std::to_string(kMaxStates));
    for (const auto& s : states_)
        if (s.empty()) throw ModelError("empty state name");
    require_unique(states_, "state");
    require_unique(agents_, "agent");
    require_unique(props_, "proposition");
    for (const auto& a : agents_)
        if (!valid_identifier(a)) throw ModelError("invalid agent name '" + a + "'");
    for (const auto& p : props_)
        if (!valid_identifier(p)) throw ModelError("invalid proposition name '" + p + "'");
    if (partitions.size() != agents_.size()) throw ModelError("one partition per agent is required");
    if (valuation_.size() != props_.size()) throw ModelError("one valuation entry per proposition is required");
    if (designated_ && *designated_ >= states_.size()) throw ModelError("designated state out of range");

    const StateSet universe = all();
    for (std::size_t p = 0; p < props_.size(); ++p)
        if (!valuation_[p].subset_of(universe))
            throw ModelError("valuation of '" + props_[p] + "' references an unknown state");

    blocks_.resize(agents_.size());
    block_index_.resize(agents_.size());
    for (std::size_t a = 0; a < agents_.size(); ++a) {
        StateSet covered;
        std::vector<StateSet> blocks;
        for (StateSet b : partitions[a]) {
            if (b.empty()) throw ModelError("empty block in partition of agent '" + agents_[a] + "'");
            if (!b.subset_of(universe))
                throw ModelError("partition of agent '" + agents_[a] + "' references an unknown state");
            if (b.intersects(covered))
                throw ModelError("overlapping partition: blocks of agent '" + agents_[a] + "' share a state");
            covered |= b;
            blocks.push_back(b);
        }
        if (covered != universe)
            throw ModelError("partition of agent '" + agents_[a] + "' does not cover every state");
        std::sort(blocks.begin(), blocks.end(), [](StateSet x, StateSet y) { return x.front() < y.front(); });
        block_index_[a].assign(states_.size(), 0);
        for (std::size_t i = 0; i < blocks.size(); ++i)
            for (std::size_t s : blocks[i].members()) block_index_[a][s] = i;
        blocks_[a] = std::move(blocks);
    }
}

std::optional<std::size_t> KripkeModel::state_index(std::string_view name) const { return index_in(states_, name); }
std::optional<std::size_t> KripkeModel::agent_index(std::string_view name) const { return index_in(agents_, name); }
std::optional<std::size_t> KripkeModel::prop_index(std::string_view name) const { return index_in(props_, name); }

std::size_t KripkeModel::require_state(std::string_view name) const {
    if (auto s = state_index(name)) return *s;
    throw ModelError("unknown state '" + std::string(name) + "'");
}

std::vector<std::string> KripkeModel::names(StateSet set) const {
    std::vector<std::string> out;
    for (std::size_t s : set.members()) out.push_back(states_.at(s));
    return out;
}

StateSet KripkeModel::set_of(const std::vector<std::string>& names) const {
    StateSet out;
    for (const auto& n : names) out.insert(require_state(n));
    return out;
}

KripkeModel KripkeModel::with_designated(std::optional<std::size_t> point) const {
    KripkeModel copy = *this;
    if (point && *point >= states_.size()) throw ModelError("designated state out of range");
    copy.designated_ = point;
    return copy;
}

bool operator==(const KripkeModel& a, const KripkeModel& b) {
    return a.states_ == b.states_ && a.agents_ == b.agents_ && a.props_ == b.props_ && a.blocks_ == b.blocks_ &&
           a.valuation_ == b.valuation_ && a.designated_ == b.designated_;
}

// ── Documents ───────────────────────────────────────────────────────────────

namespace {

std::vector<std::string> string_list(const nlohmann::json& doc, const char* field, bool required) {
    if (!doc.contains(field)) {
        if (required) throw ModelError(std::string("missing field '") + field + "'");
        return {};
    }
    const auto& v = doc.at(field);
    if (!v.is_array()) throw ModelError(std::string("field '") + field + "' must be a list");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw ModelError(std::string("field '") + field + "' must contain strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

StateSet states_of(const std::vector<std::string>& states, const nlohmann::json& list, const std::string& where) {
    if (!list.is_array()) throw ModelError(where + " must be a list of state names");
    StateSet out;
    for (const auto& x : list) {
        if (!x.is_string()) throw ModelError(where + " must be a list of state names");
        auto idx = index_in(states, x.get<std::string>());
        if (!idx) throw ModelError(where + " references unknown state '" + x.get<std::string>() + "'");
        if (out.contains(*idx)) throw ModelError(where + " lists state '" + x.get<std::string>() + "' twice");
        out.insert(*idx);
    }
    return out;
}

}  // namespace

KripkeModel validate(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ModelError("model document must be a JSON object");
    auto states = string_list(doc, "states", true);
    auto agents = string_list(doc, "agents", true);
    auto props = string_list(doc, "props", false);
    if (states.empty()) throw ModelError("empty model: at least one state is required");
    require_unique(states, "state");
    require_unique(agents, "agent");
    require_unique(props, "proposition");

    std::vector<std::vector<StateSet>> partitions(agents.size());
    const nlohmann::json parts = doc.value("partitions", nlohmann::json::object());
    if (!parts.is_object()) throw ModelError("field 'partitions' must map agents to lists of blocks");
    for (const auto& [agent, blocks] : parts.items()) {
        auto a = index_in(agents, agent);
        if (!a) throw ModelError("partition given for unknown agent '" + agent + "'");
        if (!blocks.is_array()) throw ModelError("partition of agent '" + agent + "' must be a list of blocks");
        for (const auto& block : blocks)
            partitions[*a].push_back(states_of(states, block, "a block of agent '" + agent + "'"));
    }
    for (std::size_t a = 0; a < agents.size(); ++a)
        if (!parts.contains(agents[a])) throw ModelError("missing partition for agent '" + agents[a] + "'");

    std::vector<StateSet> valuation(props.size());
    const nlohmann::json val = doc.value("valuation", nlohmann::json::object());
    if (!val.is_object()) throw ModelError("field 'valuation' must map propositions to lists of states");
    for (const auto& [prop, list] : val.items()) {
        auto p = index_in(props, prop);
        if (!p) throw ModelError("valuation given for unknown proposition '" + prop + "'");
        valuation[*p] = states_of(states, list, "valuation of '" + prop + "'");
    }

    std::optional<std::size_t> designated;
    if (doc.contains("designated") && !doc.at("designated").is_null()) {
        if (!doc.at("designated").is_string()) throw ModelError("field 'designated' must be a state name");
        const auto name = doc.at("designated").get<std::string>();
        designated = index_in(states, name);
        if (!designated) throw ModelError("designated state '" + name + "' is not a state of the model");
    }
    return KripkeModel(std::move(states), std::move(agents), std::move(props), partitions, std::move(valuation),
                       designated);
}

KripkeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError("malformed JSON in '" + path + "': " + e.what());
    }
    return validate(doc);
}

nlohmann::json to_json(const KripkeModel& m) {
    nlohmann::json doc;
    doc["agents"] = m.agents();
    doc["props"] = m.props();
    doc["states"] = m.states();
    nlohmann::json parts = nlohmann::json::object();
    for (std::size_t a = 0; a < m.agents().size(); ++a) {
        nlohmann::json blocks = nlohmann::json::array();
        for (StateSet b : m.blocks(a)) blocks.push_back(m.names(b));
        parts[m.agents()[a]] = std::move(blocks);
    }
    doc["partitions"] = std::move(parts);
    nlohmann::json val = nlohmann::json::object();
    for (std::size_t p = 0; p < m.props().size(); ++p) val[m.props()[p]] = m.names(m.valuation(p));
    doc["valuation"] = std::move(val);
    if (m.designated()) doc["designated"] = m.states()[*m.designated()];
    return doc;
}

std::string to_dot(const KripkeModel& m) {
    const auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream out;
    out << "graph model {\n";
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        std::string label = m.states()[s] + "\\n";
        bool first = true;
        for (std::size_t p = 0; p < m.props().size(); ++p) {
            if (!m.holds(p, s)) continue;
            if (!first) label += ",";
            label += m.props()[p];
            first = false;
        }
        out << "  " << quote(m.states()[s]) << " [label=\"" << label << "\"";
        if (m.designated() == s) out << ", shape=doublecircle";
        out << "];\n";
    }
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t t = s + 1; t < m.num_states(); ++t) {
            std::string agents;
            for (std::size_t a = 0; a < m.agents().size(); ++a) {
                if (!m.block_of(a, s).contains(t)) continue;
                if (!agents.empty()) agents += ",";
                agents += m.agents()[a];
            }
            if (agents.empty()) continue;
            out << "  " << quote(m.states()[s]) << " -- " << quote(m.states()[t]) << " [label=\"" << agents
                << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

// ── Operations ──────────────────────────────────────────────────────────────

KripkeModel update(const KripkeModel& m, StateSet keep) {
    if (keep.empty()) throw ModelError("update by an announcement true nowhere");
    if (!keep.subset_of(m.all())) throw ModelError("update references states outside the model");
    const auto kept = keep.members();
    std::vector<std::size_t> renumber(m.num_states(), 0);
    std::vector<std::string> states;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        renumber[kept[i]] = i;
        states.push_back(m.states()[kept[i]]);
    }
    const auto project = [&](StateSet set) {
        StateSet out;
        for (std::size_t s : (set & keep).members()) out.insert(renumber[s]);
        return out;
    };
    std::vector<std::vector<StateSet>> partitions(m.agents().size());
    for (std::size_t a = 0; a < m.agents().size(); ++a)
        for (StateSet b : m.blocks(a))
            if (b.intersects(keep)) partitions[a].push_back(project(b));
    std::vector<StateSet> valuation;
    for (std::size_t p = 0; p < m.props().size(); ++p) valuation.push_back(project(m.valuation(p)));
    std::optional<std::size_t> designated;
    if (m.designated() && keep.contains(*m.designated())) designated = renumber[*m.designated()];
    return KripkeModel(std::move(states), m.agents(), m.props(), partitions, std::move(valuation), designated);
}

std::vector<StateSet> bisimulation_classes(const KripkeModel& m, StateSet domain) {
    std::vector<std::size_t> ids(m.num_states(), 0);
    std::vector<std::vector<bool>> valsig(m.num_states());
    for (std::size_t s : domain.members())
        for (std::size_t p = 0; p < m.props().size(); ++p) valsig[s].push_back(m.holds(p, s));
    std::size_t count = number_by_first_appearance(valsig, domain, ids);

    for (;;) {
        using Sig = std::vector<std::vector<std::size_t>>;
        std::vector<Sig> sigs(m.num_states());
        for (std::size_t s : domain.members()) {
            Sig sig{{ids[s]}};
            for (std::size_t a = 0; a < m.agents().size(); ++a) {
                std::set<std::size_t> reach;
                for (std::size_t t : (m.block_of(a, s) & domain).members()) reach.insert(ids[t]);
                sig.emplace_back(reach.begin(), reach.end());
            }
            sigs[s] = std::move(sig);
        }
        std::vector<std::size_t> next(m.num_states(), 0);
        const std::size_t next_count = number_by_first_appearance(sigs, domain, next);
        ids = std::move(next);
        if (next_count == count) break;
        count = next_count;
    }
    return blocks_from_ids(ids, count, domain);
}

StateSet ContractionMap::preimage(std::size_t s) const {
    StateSet out;
    for (std::size_t i = 0; i < mapping.size(); ++i)
        if (mapping[i] == s) out.insert(i);
    return out;
}

StateSet ContractionMap::preimage(StateSet set) const {
    StateSet out;
    for (std::size_t i = 0; i < mapping.size(); ++i)
        if (set.contains(mapping[i])) out.insert(i);
    return out;
}

StateSet ContractionMap::image(StateSet set) const {
    StateSet out;
    for (std::size_t s : set.members()) out.insert(mapping.at(s));
    return out;
}

ContractionMap bisim_contract(const KripkeModel& m) {
    const auto classes = bisimulation_classes(m, m.all());
    std::vector<std::size_t> mapping(m.num_states(), 0);
    std::vector<std::string> states;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        states.push_back(m.states()[classes[c].front()]);
        for (std::size_t s : classes[c].members()) mapping[s] = c;
    }
    const auto image = [&](StateSet set) {
        StateSet out;
        for (std::size_t s : set.members()) out.insert(mapping[s]);
        return out;
    };
    std::vector<std::vector<StateSet>> partitions(m.agents().size());
    for (std::size_t a = 0; a < m.agents().size(); ++a) {
        // Images of the agent's blocks coincide or are disjoint, since
        // bisimilar states reach the same classes.
        std::set<std::uint64_t> seen;
        for (StateSet b : m.blocks(a)) {
            const StateSet img = image(b);
            if (seen.insert(img.bits()).second) partitions[a].push_back(img);
        }
    }
    std::vector<StateSet> valuation;
    for (std::size_t p = 0; p < m.props().size(); ++p) valuation.push_back(image(m.valuation(p)));
    std::optional<std::size_t> designated;
    if (m.designated()) designated = mapping[*m.designated()];
    KripkeModel contracted(std::move(states), m.agents(), m.props(), partitions, std::move(valuation), designated);
    return ContractionMap{m, std::move(contracted), std::move(mapping)};
}

bool is_contracted(const KripkeModel& m) { return bisimulation_classes(m, m.all()).size() == m.num_states(); }

// ── Characteristic formulas ─────────────────────────────────────────────────
//
// Refines the valuation partition level by level, carrying for every block a
// formula whose extension is exactly that block.  A refined block B' of s gets
//
//     f(B(s)) & /\_a ( K a \/_{C in R_a(s)} f(C)  &  /\_{C in R_a(s)} ~K a ~f(C) )
//
// where R_a(s) are the previous-level blocks a considers possible at s.
// Blocks that do not split keep their formula.  On a contracted model the
// refinement ends in singletons.

namespace {

std::vector<Formula> characteristic_formulas(const KripkeModel& m) {
    const StateSet domain = m.all();
    std::vector<std::size_t> ids(m.num_states(), 0);
    std::vector<std::vector<bool>> valsig(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s)
        for (std::size_t p = 0; p < m.props().size(); ++p) valsig[s].push_back(m.holds(p, s));
    std::size_t count = number_by_first_appearance(valsig, domain, ids);

    std::vector<Formula> block_formula(count);
    for (std::size_t b = 0; b < count; ++b) {
        if (count == 1) {
            block_formula[b] = top();
            continue;
        }
        std::size_t rep = 0;
        while (ids[rep] != b) ++rep;
        std::vector<Formula> lits;
        for (std::size_t p = 0; p < m.props().size(); ++p)
            lits.push_back(m.holds(p, rep) ? atom(m.props()[p]) : neg(atom(m.props()[p])));
        block_formula[b] = conj_all(lits);
    }

    for (;;) {
        using Sig = std::vector<std::vector<std::size_t>>;
        std::vector<Sig> sigs(m.num_states());
        std::vector<std::vector<std::vector<std::size_t>>> reach(m.num_states());
        for (std::size_t s = 0; s < m.num_states(); ++s) {
            Sig sig{{ids[s]}};
            for (std::size_t a = 0; a < m.agents().size(); ++a) {
                std::set<std::size_t> r;
                for (std::size_t t : m.block_of(a, s).members()) r.insert(ids[t]);
                sig.emplace_back(r.begin(), r.end());
            }
            reach[s].assign(sig.begin() + 1, sig.end());
            sigs[s] = std::move(sig);
        }
        std::vector<std::size_t> next(m.num_states(), 0);
        const std::size_t next_count = number_by_first_appearance(sigs, domain, next);
        if (next_count == count) break;

        // Old blocks that split need new formulas.
        std::vector<std::set<std::size_t>> children(count);
        for (std::size_t s = 0; s < m.num_states(); ++s) children[ids[s]].insert(next[s]);

        std::vector<Formula> next_formula(next_count);
        std::vector<bool> done(next_count, false);
        for (std::size_t s = 0; s < m.num_states(); ++s) {
            const std::size_t nb = next[s];
            if (done[nb]) continue;
            done[nb] = true;
            const std::size_t ob = ids[s];
            if (children[ob].size() == 1) {
                next_formula[nb] = block_formula[ob];
                continue;
            }
            std::vector<Formula> parts{block_formula[ob]};
            for (std::size_t a = 0; a < m.agents().size(); ++a) {
                std::vector<Formula> options;
                for (std::size_t c : reach[s][a]) options.push_back(block_formula[c]);
                if (reach[s][a].size() < count) parts.push_back(know(m.agents()[a], disj_all(options)));
                for (const auto& o : options) parts.push_back(neg(know(m.agents()[a], neg(o))));
            }
            next_formula[nb] = conj_all(parts);
        }
        ids = std::move(next);
        block_formula = std::move(next_formula);
        count = next_count;
    }
    if (count != m.num_states()) throw ModelError("characteristic formulas require a bisimulation-contracted model");
    std::vector<Formula> out(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) out[s] = block_formula[ids[s]];
    return out;
}

}  // namespace

Formula char_formula(const KripkeModel& m, std::size_t s) {
    if (s >= m.num_states()) throw ModelError("state index out of range");
    return characteristic_formulas(m)[s];
}

// ── Announcement choices ────────────────────────────────────────────────────

StateSet AnnouncementChoice::intersection(StateSet universe) const {
    StateSet out = universe;
    for (const auto& [agent, set] : sets) out &= set;
    return out;
}

Formula realize_choice(const KripkeModel& m, std::size_t w, const AgentSet& group, const AnnouncementChoice& choice) {
    if (w >= m.num_states()) throw ModelError("state index out of range");
    if (group.empty()) return top();
    if (!is_contracted(m)) throw ModelError("realizing a choice requires a bisimulation-contracted model");
    std::vector<Formula> chars;
    std::vector<Formula> conjuncts;
    for (const auto& agent : group) {
        auto a = m.agent_index(agent);
        if (!a) throw ModelError("unknown agent '" + agent + "'");
        auto it = choice.sets.find(agent);
        if (it == choice.sets.end()) throw ModelError("choice has no set for agent '" + agent + "'");
        const StateSet set = it->second;
        if (!set.subset_of(m.all())) throw ModelError("choice references states outside the model");
        for (std::size_t s : set.members())
            if (!m.block_of(*a, s).subset_of(set))
                throw ModelError("choice for agent '" + agent + "' is not a union of its equivalence classes");
        if (set == m.all()) {
            conjuncts.push_back(know(agent, top()));
            continue;
        }
        if (chars.empty()) chars = characteristic_formulas(m);
        std::vector<Formula> disjuncts;
        for (std::size_t s : set.members()) disjuncts.push_back(chars[s]);
        conjuncts.push_back(know(agent, disj_all(disjuncts)));
    }
    return conj_all(conjuncts);
}

}  // namespace cogal
