#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cogal/checker.hpp"
#include "cogal/harness.hpp"
#include "cogal/model.hpp"
#include "support/fixtures.hpp"
#include "support/reference.hpp"

using namespace cogal;
using fixtures::train;

namespace {

nlohmann::json train_doc() { return to_json(train()); }

std::string model_error(const nlohmann::json& doc) {
    try {
        validate(doc);
    } catch (const ModelError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// Contracted random models with up to `max_states` states.
std::vector<KripkeModel> contracted_models(std::uint64_t seed, std::size_t count, std::size_t max_states) {
    std::vector<KripkeModel> out;
    const GenParams p = fixtures::params(seed, count, max_states, {"a", "b"}, {"p", "q"});
    for (std::size_t i = 0; i < count; ++i) out.push_back(bisim_contract(random_model(p, i)).contracted);
    return out;
}

}  // namespace

TEST_CASE("the train model validates") {
    const KripkeModel m = train();
    CHECK(m.num_states() == 2);
    CHECK(m.states() == std::vector<std::string>{"w", "v"});
    CHECK(m.agents() == std::vector<Agent>{"a", "b", "c"});
    CHECK(m.designated() == std::optional<std::size_t>{0});
    CHECK(m.blocks(0).size() == 2);
    CHECK(m.blocks(2).size() == 1);
    CHECK(m.valuation(0) == StateSet::single(1));
}

TEST_CASE("validation errors") {
    auto doc = train_doc();
    doc["partitions"]["a"] = {{"w"}, {"w", "v"}};
    CHECK(contains(model_error(doc), "overlapping partition"));

    doc = train_doc();
    doc["states"] = nlohmann::json::array();
    doc["partitions"] = {{"a", nlohmann::json::array()}, {"b", nlohmann::json::array()}, {"c", nlohmann::json::array()}};
    doc["valuation"] = {{"p", nlohmann::json::array()}};
    doc.erase("designated");
    CHECK(contains(model_error(doc), "empty model"));

    doc = train_doc();
    doc["partitions"]["a"] = {{"w"}};
    CHECK(contains(model_error(doc), "does not cover every state"));

    doc = train_doc();
    doc["valuation"]["p"] = {"u"};
    CHECK(contains(model_error(doc), "unknown state"));

    doc = train_doc();
    doc["states"] = {"w", "w"};
    CHECK(contains(model_error(doc), "duplicate"));

    doc = train_doc();
    doc["agents"] = {"a", "b", "c", "a"};
    CHECK(contains(model_error(doc), "duplicate"));

    doc = train_doc();
    doc["designated"] = "u";
    CHECK_FALSE(model_error(doc).empty());

    doc = train_doc();
    doc["agents"] = {"A", "b", "c"};
    CHECK_FALSE(model_error(doc).empty());

    doc = train_doc();
    doc.erase("partitions");
    CHECK_FALSE(model_error(doc).empty());

    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ModelError);
}

TEST_CASE("documents round-trip") {
    const KripkeModel m = train();
    CHECK(validate(to_json(m)) == m);
    const GenParams p = fixtures::params(11, 50);
    for (std::size_t i = 0; i < 50; ++i) {
        const KripkeModel r = random_model(p, i);
        CHECK(validate(to_json(r)) == r);
    }
}

TEST_CASE("update") {
    const KripkeModel m = train();
    const KripkeModel w = update(m, StateSet::single(0));
    CHECK(w.states() == std::vector<std::string>{"w"});
    CHECK_FALSE(w.holds(0, 0));
    for (std::size_t a = 0; a < 3; ++a) CHECK(w.blocks(a) == std::vector<StateSet>{StateSet::single(0)});
    CHECK(update(m, m.all()) == m);
    CHECK_THROWS_AS(update(m, StateSet()), ModelError);
    CHECK_THROWS_AS(update(m, StateSet::single(5)), ModelError);
}

TEST_CASE("update keeps valid partitions on 500 random restrictions") {
    const GenParams p = fixtures::params(12, 500, 5, {"a", "b", "c"}, {"p", "q"});
    std::mt19937_64 rng = make_rng(12, "update", 0);
    for (std::size_t i = 0; i < 500; ++i) {
        const KripkeModel m = random_model(p, i);
        StateSet keep(rng() & m.all().bits());
        if (keep.empty()) keep = StateSet::single(0);
        const KripkeModel u = update(m, keep);
        REQUIRE(u.num_states() == keep.count());
        CHECK(u.names(u.all()) == m.names(keep));
        for (std::size_t a = 0; a < m.agents().size(); ++a) {
            StateSet covered;
            for (const auto& b : u.blocks(a)) {
                CHECK_FALSE(b.empty());
                CHECK_FALSE(b.intersects(covered));
                covered |= b;
            }
            CHECK(covered == u.all());
            // Related in u iff related in m.
            const auto idx = keep.members();
            for (std::size_t x = 0; x < idx.size(); ++x)
                for (std::size_t y = 0; y < idx.size(); ++y)
                    CHECK(u.block_of(a, x).contains(y) == m.block_of(a, idx[x]).contains(idx[y]));
        }
        const auto idx = keep.members();
        for (std::size_t q = 0; q < m.props().size(); ++q)
            for (std::size_t x = 0; x < idx.size(); ++x) CHECK(u.holds(q, x) == m.holds(q, idx[x]));
        CHECK(update(u, u.all()) == u);
    }
}

TEST_CASE("bisimulation contraction") {
    const ContractionMap t = bisim_contract(train());
    CHECK(t.contracted == train());
    CHECK(t.mapping == std::vector<std::size_t>{0, 1});

    const auto dup = nlohmann::json::parse(R"({
        "agents": ["a", "b"], "props": ["p"], "states": ["x", "y"],
        "partitions": {"a": [["x", "y"]], "b": [["x", "y"]]},
        "valuation": {"p": ["x", "y"]}, "designated": "y"})");
    const ContractionMap d = bisim_contract(validate(dup));
    CHECK(d.contracted.num_states() == 1);
    CHECK(d.contracted.states() == std::vector<std::string>{"x"});
    CHECK(d.contracted.designated() == std::optional<std::size_t>{0});
    CHECK(d.preimage(0) == StateSet(3));
    CHECK_FALSE(is_contracted(validate(dup)));

    const GenParams p = fixtures::params(13, 200, 6);
    for (std::size_t i = 0; i < 200; ++i) {
        const KripkeModel m = random_model(p, i);
        const ContractionMap c = bisim_contract(m);
        CHECK(is_contracted(c.contracted));
        CHECK(bisim_contract(c.contracted).contracted == c.contracted);
        CHECK(c.image(m.all()) == c.contracted.all());
        StateSet seen;
        for (std::size_t s = 0; s < c.contracted.num_states(); ++s) {
            // A contracted state is named after the least state it stands for.
            CHECK(*m.state_index(c.contracted.states()[s]) == c.preimage(s).front());
            CHECK_FALSE(seen.intersects(c.preimage(s)));
            seen |= c.preimage(s);
        }
        CHECK(seen == m.all());
    }
}

TEST_CASE("bisimulation classes on a restriction") {
    // Removing the only state that told x and y apart makes them bisimilar.
    const auto doc = nlohmann::json::parse(R"({
        "agents": ["a"], "props": ["p"], "states": ["x", "y", "z"],
        "partitions": {"a": [["x", "z"], ["y"]]},
        "valuation": {"p": ["x", "y"]}})");
    const KripkeModel m = validate(doc);
    CHECK(bisimulation_classes(m, m.all()).size() == 3);
    CHECK(bisimulation_classes(m, StateSet(3)) == std::vector<StateSet>{StateSet(3)});
}

TEST_CASE("characteristic formulas") {
    const KripkeModel m = train();
    const Formula v = char_formula(m, 1);
    CHECK(fragment(v) == Fragment::EL);
    CHECK(reference::extension(m, v) == StateSet::single(1));

    nlohmann::json single = {{"agents", {"a"}},
                             {"props", {"p"}},
                             {"states", {"s"}},
                             {"partitions", {{"a", {{"s"}}}}},
                             {"valuation", {{"p", nlohmann::json::array()}}}};
    const KripkeModel one = validate(single);
    CHECK(reference::extension(one, char_formula(one, 0)) == one.all());

    nlohmann::json dup = single;
    dup["states"] = {"s", "t"};
    dup["partitions"]["a"] = nlohmann::json::parse(R"([["s", "t"]])");
    CHECK_THROWS_AS(char_formula(validate(dup), 0), ModelError);
}

TEST_CASE("characteristic formulas of 100 contracted models are disjoint singletons") {
    for (const auto& m : contracted_models(14, 100, 6)) {
        StateSet seen;
        for (std::size_t s = 0; s < m.num_states(); ++s) {
            const Formula f = char_formula(m, s);
            CHECK(fragment(f) == Fragment::EL);
            const StateSet ext = reference::extension(m, f);
            CHECK(ext == StateSet::single(s));
            CHECK_FALSE(seen.intersects(ext));
            seen |= ext;
        }
    }
}

TEST_CASE("realize_choice on the train model") {
    const KripkeModel m = train();
    AnnouncementChoice a_w{{{"a", StateSet::single(0)}}};
    const Formula fa = realize_choice(m, 0, {"a"}, a_w);
    CHECK(is_group_announcement(fa, {"a"}));
    CHECK(reference::extension(m, fa) == StateSet::single(0));
    CHECK(reference::extension(m, iff(fa, know("a", neg(atom("p"))))) == m.all());

    AnnouncementChoice c_all{{{"c", m.all()}}};
    const Formula fc = realize_choice(m, 0, {"c"}, c_all);
    CHECK(reference::extension(m, fc) == m.all());

    CHECK(realize_choice(m, 0, {}, AnnouncementChoice{}) == top());

    AnnouncementChoice bad{{{"c", StateSet::single(0)}}};
    CHECK_THROWS_AS(realize_choice(m, 0, {"c"}, bad), ModelError);
}

TEST_CASE("realize_choice on 300 random instances") {
    std::mt19937_64 rng = make_rng(15, "realize", 0);
    const GenParams p = fixtures::params(15, 300, 5, {"a", "b", "c"}, {"p", "q"});
    std::size_t checked = 0;
    for (std::size_t i = 0; i < 300; ++i) {
        const KripkeModel m = bisim_contract(random_model(p, i)).contracted;
        const std::size_t w = rng() % m.num_states();
        AgentSet g;
        for (const auto& a : m.agents())
            if (rng() % 2) g.insert(a);
        const auto choices = group_choices(m, w, g);
        REQUIRE_FALSE(choices.empty());
        const AnnouncementChoice& c = choices[rng() % choices.size()];
        const Formula f = realize_choice(m, w, g, c);
        CHECK(is_group_announcement(f, g));
        CHECK(reference::extension(m, f) == c.intersection(m.all()));
        for (const auto& [agent, set] : c.sets) {
            const Formula one = realize_choice(m, w, {agent}, AnnouncementChoice{{{agent, set}}});
            CHECK(reference::extension(m, one) == set);
        }
        ++checked;
    }
    CHECK(checked == 300);
}

TEST_CASE("dot export") {
    const std::string dot = to_dot(train());
    CHECK(dot.rfind("graph model {", 0) == 0);
    CHECK(std::count(dot.begin(), dot.end(), '\n') == 5);
    CHECK(contains(dot, "\"w\" -- \"v\" [label=\"c\"]"));
    CHECK(contains(dot, "doublecircle"));
    CHECK_FALSE(contains(dot, "\"w\" -- \"w\""));
}

TEST_CASE("state sets") {
    StateSet s;
    CHECK(s.empty());
    s.insert(3);
    s.insert(0);
    CHECK(s.members() == std::vector<std::size_t>{0, 3});
    CHECK(s.front() == 0);
    CHECK((s - StateSet::single(0)) == StateSet::single(3));
    CHECK(StateSet::first(64).count() == 64);
    CHECK(StateSet::single(1).subset_of(StateSet::first(2)));
}
