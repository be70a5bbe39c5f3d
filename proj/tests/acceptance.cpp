// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <atomic>
#include <chrono>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>

#include "cogal/checker.hpp"
#include "cogal/harness.hpp"
#include "cogal/translate.hpp"
#include "support/reference.hpp"

using namespace cogal;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Realizes every observed choice on the materialized submodel and compares
// extensions.
class Certifier {
public:
    void operator()(const ChoiceEvent& e) {
        bool ok = true;
        try {
            const KripkeModel sub = update(*e.root, e.domain);
            const ContractionMap cm = bisim_contract(sub);
            const auto to_sub = [&](StateSet set) {
                StateSet out;
                for (std::size_t s : set.members()) out.insert(reference::index_in(e.domain, s));
                return out;
            };
            AnnouncementChoice mapped;
            for (const auto& [agent, set] : e.choice.sets) {
                const StateSet local = to_sub(set & e.domain);
                // A choice must not split bisimilar states of the submodel.
                ok = ok && cm.preimage(cm.image(local)) == local;
                mapped.sets.emplace(agent, cm.image(local));
            }
            const std::size_t w = cm.mapping[reference::index_in(e.domain, e.state)];
            const Formula psi = realize_choice(cm.contracted, w, e.group, mapped);
            ok = ok && is_group_announcement(psi, e.group);
            ok = ok && reference::extension(sub, psi) == to_sub(e.choice.intersection(e.domain));
        } catch (const std::exception&) {
            ok = false;
        }
        std::lock_guard lock(mutex_);
        ++seen_;
        if (!ok) ++failed_;
    }

    std::size_t seen() const { return seen_; }
    std::size_t failed() const { return failed_; }

private:
    std::mutex mutex_;
    std::size_t seen_ = 0;
    std::size_t failed_ = 0;
};

Certifier certifier;

EvalOptions certified() {
    EvalOptions o;
    o.on_choice = [](const ChoiceEvent& e) { certifier(e); };
    return o;
}

SuiteOptions certified_suite(std::vector<std::string> items) {
    SuiteOptions o;
    o.items = std::move(items);
    o.threads = 0;
    o.on_choice = [](const ChoiceEvent& e) { certifier(e); };
    return o;
}

GenParams params(std::uint64_t seed, std::size_t count, std::vector<Agent> agents,
                 std::vector<std::string> props = {"p", "q"}) {
    GenParams p;
    p.seed = seed;
    p.count = count;
    p.max_states = 4;
    p.agents = std::move(agents);
    p.props = std::move(props);
    return p;
}

// Merges item results of several suite runs by name.
std::map<std::string, ItemResult> merge(const std::vector<SuiteReport>& runs) {
    std::map<std::string, ItemResult> out;
    for (const auto& run : runs)
        for (const auto& r : run.items) {
            auto [it, fresh] = out.emplace(r.name, r);
            if (fresh) continue;
            it->second.instances += r.instances;
            it->second.failures += r.failures;
            if (!it->second.countermodel) it->second.countermodel = r.countermodel;
        }
    return out;
}

Outcome require_clean(const std::map<std::string, ItemResult>& items, const std::vector<std::string>& names,
                      std::size_t min_instances) {
    Outcome o;
    std::ostringstream d;
    for (const auto& n : names) {
        const auto it = items.find(n);
        if (it == items.end()) {
            o.ok = false;
            d << n << " missing; ";
            continue;
        }
        if (it->second.failures != 0 || it->second.instances < min_instances) o.ok = false;
        d << n << " " << it->second.instances << "/" << it->second.failures << " ";
    }
    o.detail = d.str() + "(instances/failures)";
    return o;
}

Outcome train_claims() {
    const KripkeModel m = load_model(std::string(COGAL_DATA_DIR) + "/train.json");
    Evaluator ev(m, certified());
    const std::size_t w = m.require_state("w");
    const std::vector<std::pair<std::string, bool>> claims{
        {"[~p] K c ~p", true},
        {"[{c}] (~K c ~p & ~K c p)", true},
        {"<{a,b}> (~K c ~p & ~K c p)", true},
        {"<[{a,b}]> (~K c ~p & ~K c p)", true},
        {"<[{a,c}]> (~K c ~p & ~K c p)", false},
        {"[<{a,c}>] (K c ~p | K c p)", true},
    };
    Outcome o;
    std::size_t right = 0;
    for (const auto& [text, expected] : claims) {
        if (ev.eval(w, parse(text)) == expected)
            ++right;
        else
            o.ok = false;
    }
    o.detail = std::to_string(right) + "/6 claims as stated";
    return o;
}

Outcome axiom_suite_run() {
    const std::vector<std::string> items{"A0", "A1", "A2",  "A3",  "A4",  "A5",  "A6",  "A7", "A8", "A9", "A10",
                                         "A11", "C0", "C1", "C2", "C3", "C4", "C5", "R1", "R2", "R3", "R4", "canary"};
    const auto two = axiom_suite(params(101, 100, {"a", "b"}), certified_suite(items));
    const auto three = axiom_suite(params(102, 100, {"a", "b", "c"}), certified_suite(items));
    auto merged = merge({two, three});
    std::vector<std::string> clean(items.begin(), items.end() - 1);
    Outcome o = require_clean(merged, clean, 1);
    const ItemResult& canary = merged.at("canary");
    const bool canary_caught = canary.failures > 0 && canary.countermodel &&
                               !eval(canary.countermodel->model, canary.countermodel->state, canary.countermodel->instance);
    o.ok = o.ok && canary_caught;
    o.detail = "200 models; canary " + std::string(canary_caught ? "caught" : "MISSED") + "; " + o.detail;
    return o;
}

Outcome merge_lemma() {
    const auto r = axiom_suite(params(103, 100, {"a", "b", "c"}), certified_suite({"merge_announcements"}));
    Outcome o = require_clean(merge({r}), {"merge_announcements"}, 1000);
    o.detail = "100 models, 12 tuples each; " + o.detail;
    return o;
}

Outcome composition() {
    const auto r = axiom_suite(params(104, 100, {"a", "b", "c"}),
                               certified_suite({"coalition_composition", "coalition_composition_same"}));
    Outcome o = require_clean(merge({r}), {"coalition_composition", "coalition_composition_same"}, 100 * 8);
    o.detail = "100 three-agent models, all G and H; " + o.detail;
    return o;
}

Outcome split_coalition() {
    const KripkeModel m = split_coalition_countermodel();
    const Formula goal = split_coalition_goal();
    Evaluator ev(m, certified());
    const std::size_t w = *m.designated();
    const bool joint = ev.eval(w, coal_dia({"a", "b"}, goal));
    const bool split = ev.eval(w, coal_dia({"a"}, coal_dia({"b"}, goal)));
    Outcome o;
    o.ok = m.agents().size() == 3 && m.props().size() == 3 && joint && !split &&
           goal == parse("K b (p & q & r) & ~K a (p & q & r) & ~K c (p & q & r)");
    o.detail = std::string("<[{a,b}]> phi ") + (joint ? "true" : "false") + ", <[{a}]> <[{b}]> phi " +
               (split ? "true" : "false") + " at " + m.states()[w];
    return o;
}

Outcome translation() {
    const GenParams p = params(105, 50, {"a", "b"});
    std::mt19937_64 rng = make_rng(105, "acceptance-translate", 0);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        const KripkeModel m = random_model(p, i);
        Evaluator ev(m);
        for (int k = 0; k < 10; ++k) {
            const Formula f = random_formula(rng, FormulaGen{m.agents(), m.props(), 3, Fragment::PAL, true, 0});
            const Formula t = translate(f);
            if (fragment(t) == Fragment::EL && ev.extension(f) == ev.extension(t) &&
                reference::extension(m, f) == reference::extension(m, t))
                ++agree;
        }
    }
    return {agree == 500, std::to_string(agree) + "/500 formulas agree"};
}

Outcome certificate() {
    return {certifier.seen() > 0 && certifier.failed() == 0,
            std::to_string(certifier.seen()) + " choices realized, " + std::to_string(certifier.failed()) +
                " mismatches"};
}

Outcome contraction_invariance() {
    GenParams p = params(106, 200, {"a", "b"}, {"p"});
    p.max_states = 6;
    std::mt19937_64 rng = make_rng(106, "acceptance-contraction", 0);
    std::size_t agree = 0;
    std::size_t shrunk = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        const KripkeModel m = random_model(p, i);
        const ContractionMap c = bisim_contract(m);
        if (c.contracted.num_states() < m.num_states()) ++shrunk;
        const Formula f = random_formula(rng, FormulaGen{m.agents(), m.props(), 2, Fragment::CoGAL, true, 0});
        const StateSet on_original = reference::extension(m, f);
        const StateSet on_contracted = extension(c.contracted, f);
        if (on_original == c.preimage(on_contracted) && extension(m, f) == on_original) ++agree;
    }
    return {agree == 200,
            std::to_string(agree) + "/200 formulas agree (" + std::to_string(shrunk) + " models shrank)"};
}

Outcome order_cases() {
    const std::vector<Agent> agents{"a", "b", "c"};
    const FormulaGen any{agents, {"p", "q"}, 2, Fragment::CoGAL, true, 0};
    std::mt19937_64 rng = make_rng(107, "acceptance-order", 0);
    std::size_t held = 0;
    for (int i = 0; i < 200; ++i) {
        AgentSet g;
        AgentSet rest;
        for (const auto& a : agents) (rng() % 2 ? g : rest).insert(a);
        const Formula phi = random_formula(rng, any);
        const Formula chi = random_formula(rng, any);
        const Formula tau = random_formula(rng, any);
        const Formula mine = random_group_announcement(rng, any, g);
        const Formula theirs = random_group_announcement(rng, any, rest);
        const Formula respond = implies(mine, announce_dia(conj(mine, theirs), phi));
        const bool all = order_lt(announce(mine, phi), group_box(g, phi)) &&
                         order_lt(announce(chi, announce(mine, phi)), announce(chi, group_box(g, phi))) &&
                         order_lt(respond, coal_box(g, phi)) &&
                         order_lt(announce(tau, respond), announce(tau, coal_box(g, phi)));
        held += all;
    }
    std::vector<Formula> sample;
    for (int i = 0; i < 60; ++i) sample.push_back(random_formula(rng, any));
    bool strict = true;
    for (const auto& x : sample) {
        strict = strict && !order_lt(x, x);
        for (const auto& y : sample)
            for (const auto& z : sample)
                if (order_lt(x, y) && order_lt(y, z) && !order_lt(x, z)) strict = false;
    }
    return {held == 200 && strict, std::to_string(held) + "/200 instantiations of the four cases; " +
                                       (strict ? "irreflexive and transitive" : "NOT a strict order") +
                                       " on 60^3 triples"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"train model claims", train_claims},
        {"axiom and coalition schemas", axiom_suite_run},
        {"merged announcements", merge_lemma},
        {"coalition composition", composition},
        {"split coalition countermodel", split_coalition},
        {"PAL translation", translation},
        {"choice realization certificate", certificate},
        {"contraction invariance", contraction_invariance},
        {"complexity order", order_cases},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        all = all && o.ok;
        std::cout << "criterion " << i + 1 << "  " << (o.ok ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ("
                  << ms << " ms)  " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
