#include "cogal/formula.hpp"

#include <algorithm>
#include <cassert>
#include <tuple>

namespace cogal {

namespace {

bool is_quantifier(Op op) {
    return op == Op::GroupBox || op == Op::GroupDia || op == Op::CoalBox || op == Op::CoalDia;
}

}  // namespace

std::string to_string(const AgentSet& group) {
    std::string out = "{";
    bool first = true;
    for (const auto& a : group) {
        if (!first) out += ',';
        out += a;
        first = false;
    }
    out += '}';
    return out;
}

std::string_view op_name(Op op) {
    switch (op) {
        case Op::Atom: return "atom";
        case Op::Top: return "top";
        case Op::Bot: return "bot";
        case Op::Not: return "not";
        case Op::And: return "and";
        case Op::Or: return "or";
        case Op::Imp: return "imp";
        case Op::Iff: return "iff";
        case Op::Know: return "know";
        case Op::PaBox: return "announce";
        case Op::PaDia: return "announce-dia";
        case Op::GroupBox: return "group";
        case Op::GroupDia: return "group-dia";
        case Op::CoalBox: return "coalition";
        case Op::CoalDia: return "coalition-dia";
    }
    return "?";
}

// ── Formula ─────────────────────────────────────────────────────────────────

Formula::Formula() : Formula(top()) {}

Formula Formula::make(Op op, std::string name, AgentSet group, std::vector<Formula> args) {
    auto node = std::make_shared<Node>(Node{op, std::move(name), std::move(group), std::move(args)});
    return Formula(std::move(node));
}

Op Formula::op() const { return node_->op; }
const std::string& Formula::name() const { return node_->name; }
const AgentSet& Formula::group() const { return node_->group; }
std::size_t Formula::arity() const { return node_->args.size(); }

const Formula& Formula::arg(std::size_t i) const {
    assert(i < node_->args.size());
    return node_->args[i];
}

bool operator==(const Formula& lhs, const Formula& rhs) {
    if (lhs.node_ == rhs.node_) return true;
    const auto& a = *lhs.node_;
    const auto& b = *rhs.node_;
    if (a.op != b.op || a.name != b.name || a.group != b.group || a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (a.args[i] != b.args[i]) return false;
    return true;
}

// ── Builders ────────────────────────────────────────────────────────────────

Formula atom(std::string name) { return Formula::make(Op::Atom, std::move(name), {}, {}); }

Formula top() {
    static const Formula t = Formula::make(Op::Top, {}, {}, {});
    return t;
}

Formula bot() {
    static const Formula b = Formula::make(Op::Bot, {}, {}, {});
    return b;
}

Formula neg(Formula f) { return Formula::make(Op::Not, {}, {}, {std::move(f)}); }
Formula conj(Formula l, Formula r) { return Formula::make(Op::And, {}, {}, {std::move(l), std::move(r)}); }
Formula disj(Formula l, Formula r) { return Formula::make(Op::Or, {}, {}, {std::move(l), std::move(r)}); }
Formula implies(Formula l, Formula r) { return Formula::make(Op::Imp, {}, {}, {std::move(l), std::move(r)}); }
Formula iff(Formula l, Formula r) { return Formula::make(Op::Iff, {}, {}, {std::move(l), std::move(r)}); }
Formula know(Agent a, Formula f) { return Formula::make(Op::Know, std::move(a), {}, {std::move(f)}); }

Formula announce(Formula ann, Formula body) {
    return Formula::make(Op::PaBox, {}, {}, {std::move(ann), std::move(body)});
}
Formula announce_dia(Formula ann, Formula body) {
    return Formula::make(Op::PaDia, {}, {}, {std::move(ann), std::move(body)});
}
Formula group_box(AgentSet g, Formula f) { return Formula::make(Op::GroupBox, {}, std::move(g), {std::move(f)}); }
Formula group_dia(AgentSet g, Formula f) { return Formula::make(Op::GroupDia, {}, std::move(g), {std::move(f)}); }
Formula coal_box(AgentSet g, Formula f) { return Formula::make(Op::CoalBox, {}, std::move(g), {std::move(f)}); }
Formula coal_dia(AgentSet g, Formula f) { return Formula::make(Op::CoalDia, {}, std::move(g), {std::move(f)}); }

Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}

Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return bot();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}

// ── Classification ──────────────────────────────────────────────────────────

std::string_view fragment_name(Fragment fr) {
    switch (fr) {
        case Fragment::EL: return "EL";
        case Fragment::PAL: return "PAL";
        case Fragment::GAL: return "GAL";
        case Fragment::CoGAL: return "CoGAL";
    }
    return "?";
}

Fragment fragment(const Formula& f) {
    Fragment own = Fragment::EL;
    switch (f.op()) {
        case Op::PaBox:
        case Op::PaDia: own = Fragment::PAL; break;
        case Op::GroupBox:
        case Op::GroupDia: own = Fragment::GAL; break;
        case Op::CoalBox:
        case Op::CoalDia: own = Fragment::CoGAL; break;
        default: break;
    }
    for (std::size_t i = 0; i < f.arity(); ++i) own = std::max(own, fragment(f.arg(i)));
    return own;
}

namespace {

void flatten_conjunction(const Formula& f, std::vector<Formula>& out) {
    if (f.op() == Op::And) {
        flatten_conjunction(f.arg(0), out);
        flatten_conjunction(f.arg(1), out);
    } else {
        out.push_back(f);
    }
}

}  // namespace

bool is_group_announcement(const Formula& f, const AgentSet& group) {
    if (group.empty()) return f.op() == Op::Top;
    std::vector<Formula> conjuncts;
    flatten_conjunction(f, conjuncts);
    if (conjuncts.size() != group.size()) return false;
    AgentSet seen;
    for (const auto& c : conjuncts) {
        if (c.op() != Op::Know) return false;
        if (!group.contains(c.name()) || !seen.insert(c.name()).second) return false;
        if (fragment(c.arg(0)) != Fragment::EL) return false;
    }
    return true;
}

// ── Normal forms ────────────────────────────────────────────────────────────

Formula normalize(const Formula& f) {
    switch (f.op()) {
        case Op::Atom:
        case Op::Top: return f;
        case Op::Bot: return neg(top());
        case Op::Not: return neg(normalize(f.arg(0)));
        case Op::And: return conj(normalize(f.arg(0)), normalize(f.arg(1)));
        case Op::Or: return neg(conj(neg(normalize(f.arg(0))), neg(normalize(f.arg(1)))));
        case Op::Imp: return neg(conj(normalize(f.arg(0)), neg(normalize(f.arg(1)))));
        case Op::Iff: {
            Formula l = normalize(f.arg(0));
            Formula r = normalize(f.arg(1));
            return conj(neg(conj(l, neg(r))), neg(conj(r, neg(l))));
        }
        case Op::Know: return know(f.name(), normalize(f.arg(0)));
        case Op::PaBox: return announce(normalize(f.arg(0)), normalize(f.arg(1)));
        case Op::PaDia: return neg(announce(normalize(f.arg(0)), neg(normalize(f.arg(1)))));
        case Op::GroupBox: return group_box(f.group(), normalize(f.arg(0)));
        case Op::GroupDia: return neg(group_box(f.group(), neg(normalize(f.arg(0)))));
        case Op::CoalBox: return coal_box(f.group(), normalize(f.arg(0)));
        case Op::CoalDia: return neg(coal_box(f.group(), neg(normalize(f.arg(0)))));
    }
    return f;
}

Formula resugar(const Formula& f) {
    if (f.op() == Op::Not) {
        const Formula& inner = f.arg(0);
        switch (inner.op()) {
            case Op::Top: return bot();
            case Op::Not: return resugar(inner.arg(0));
            case Op::And:
                if (inner.arg(1).op() == Op::Not) {
                    if (inner.arg(0).op() == Op::Not)
                        return disj(resugar(inner.arg(0).arg(0)), resugar(inner.arg(1).arg(0)));
                    return implies(resugar(inner.arg(0)), resugar(inner.arg(1).arg(0)));
                }
                break;
            case Op::PaBox:
                if (inner.arg(1).op() == Op::Not)
                    return announce_dia(resugar(inner.arg(0)), resugar(inner.arg(1).arg(0)));
                break;
            case Op::GroupBox:
                if (inner.arg(0).op() == Op::Not) return group_dia(inner.group(), resugar(inner.arg(0).arg(0)));
                break;
            case Op::CoalBox:
                if (inner.arg(0).op() == Op::Not) return coal_dia(inner.group(), resugar(inner.arg(0).arg(0)));
                break;
            default: break;
        }
        return neg(resugar(inner));
    }
    if (f.arity() == 0) return f;
    std::vector<Formula> args;
    args.reserve(f.arity());
    for (std::size_t i = 0; i < f.arity(); ++i) args.push_back(resugar(f.arg(i)));
    return Formula::make(f.op(), f.name(), f.group(), std::move(args));
}

// ── Measures ────────────────────────────────────────────────────────────────
// All three measures are defined on the primitive basis; derived connectives
// are expanded first.

namespace {

std::size_t size_primitive(const Formula& f) {
    switch (f.op()) {
        case Op::Atom:
        case Op::Top: return 1;
        case Op::Not:
        case Op::Know:
        case Op::GroupBox:
        case Op::CoalBox: return size_primitive(f.arg(0)) + 1;
        case Op::And: return size_primitive(f.arg(0)) + size_primitive(f.arg(1)) + 1;
        case Op::PaBox: return size_primitive(f.arg(0)) + 3 * size_primitive(f.arg(1));
        default: throw std::logic_error("size: formula not in primitive form");
    }
}

std::size_t depth_primitive(const Formula& f, Op counted) {
    switch (f.op()) {
        case Op::Atom:
        case Op::Top: return 0;
        case Op::Not:
        case Op::Know: return depth_primitive(f.arg(0), counted);
        case Op::GroupBox:
        case Op::CoalBox: return depth_primitive(f.arg(0), counted) + (f.op() == counted ? 1 : 0);
        case Op::And: return std::max(depth_primitive(f.arg(0), counted), depth_primitive(f.arg(1), counted));
        case Op::PaBox: return depth_primitive(f.arg(0), counted) + depth_primitive(f.arg(1), counted);
        default: throw std::logic_error("depth: formula not in primitive form");
    }
}

}  // namespace

std::size_t size(const Formula& f) { return size_primitive(normalize(f)); }
std::size_t depth_pa(const Formula& f) { return depth_primitive(normalize(f), Op::GroupBox); }
std::size_t depth_ca(const Formula& f) { return depth_primitive(normalize(f), Op::CoalBox); }

bool order_lt(const Formula& lhs, const Formula& rhs) {
    const Formula l = normalize(lhs);
    const Formula r = normalize(rhs);
    const auto key = [](const Formula& f) {
        return std::tuple{depth_primitive(f, Op::CoalBox), depth_primitive(f, Op::GroupBox), size_primitive(f)};
    };
    return key(l) < key(r);
}

std::size_t modal_depth(const Formula& f) {
    std::size_t inner = 0;
    for (std::size_t i = 0; i < f.arity(); ++i) inner = std::max(inner, modal_depth(f.arg(i)));
    switch (f.op()) {
        case Op::Know:
        case Op::PaBox:
        case Op::PaDia: return inner + 1;
        default: return is_quantifier(f.op()) ? inner + 1 : inner;
    }
}

namespace {

void collect(const Formula& f, std::set<std::string>& atoms, AgentSet& agents) {
    if (f.op() == Op::Atom) atoms.insert(f.name());
    if (f.op() == Op::Know) agents.insert(f.name());
    if (is_quantifier(f.op())) agents.insert(f.group().begin(), f.group().end());
    for (std::size_t i = 0; i < f.arity(); ++i) collect(f.arg(i), atoms, agents);
}

}  // namespace

std::set<std::string> atoms_of(const Formula& f) {
    std::set<std::string> atoms;
    AgentSet agents;
    collect(f, atoms, agents);
    return atoms;
}

AgentSet agents_of(const Formula& f) {
    std::set<std::string> atoms;
    AgentSet agents;
    collect(f, atoms, agents);
    return agents;
}

Formula substitute(const Formula& f, const std::map<std::string, Formula>& assignment) {
    if (f.op() == Op::Atom) {
        auto it = assignment.find(f.name());
        return it == assignment.end() ? f : it->second;
    }
    if (f.arity() == 0) return f;
    std::vector<Formula> args;
    args.reserve(f.arity());
    for (std::size_t i = 0; i < f.arity(); ++i) args.push_back(substitute(f.arg(i), assignment));
    return Formula::make(f.op(), f.name(), f.group(), std::move(args));
}

// ── Necessity forms ─────────────────────────────────────────────────────────

NecessityForm NecessityForm::under_implication(Formula premise) const {
    NecessityForm out;
    out.steps_.reserve(steps_.size() + 1);
    out.steps_.push_back({Kind::Imp, std::move(premise), {}});
    out.steps_.insert(out.steps_.end(), steps_.begin(), steps_.end());
    return out;
}

NecessityForm NecessityForm::under_knowledge(Agent agent) const {
    NecessityForm out;
    out.steps_.push_back({Kind::Know, top(), std::move(agent)});
    out.steps_.insert(out.steps_.end(), steps_.begin(), steps_.end());
    return out;
}

NecessityForm NecessityForm::under_announcement(Formula announcement) const {
    NecessityForm out;
    out.steps_.push_back({Kind::Announce, std::move(announcement), {}});
    out.steps_.insert(out.steps_.end(), steps_.begin(), steps_.end());
    return out;
}

Formula NecessityForm::instantiate(const Formula& f) const {
    Formula acc = f;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        switch (it->kind) {
            case Kind::Imp: acc = implies(it->formula, acc); break;
            case Kind::Know: acc = know(it->agent, acc); break;
            case Kind::Announce: acc = announce(it->formula, acc); break;
        }
    }
    return acc;
}

std::string NecessityForm::render() const {
    // The hole is printed as the reserved atom "#", which parse() rejects.
    std::string text = cogal::render(instantiate(atom("#")));
    return text;
}

}  // namespace cogal
