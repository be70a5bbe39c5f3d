#ifndef COGAL_TESTS_FIXTURES_HPP
#define COGAL_TESTS_FIXTURES_HPP

#include <string>

#include <doctest.h>

#include "cogal/harness.hpp"
#include "cogal/model.hpp"

namespace cogal::fixtures {

inline std::string data_path(const std::string& name) { return std::string(COGAL_DATA_DIR) + "/" + name; }

/// Two states w (p false) and v (p true); a and b tell them apart, c does not.
inline KripkeModel train() { return load_model(data_path("train.json")); }

inline GenParams params(std::uint64_t seed, std::size_t count, std::size_t max_states = 4,
                        std::vector<Agent> agents = {"a", "b"}, std::vector<std::string> props = {"p", "q"}) {
    GenParams p;
    p.seed = seed;
    p.count = count;
    p.max_states = max_states;
    p.agents = std::move(agents);
    p.props = std::move(props);
    return p;
}

inline FormulaGen gen_for(const KripkeModel& m, Fragment fr = Fragment::CoGAL, std::size_t depth = 2) {
    return FormulaGen{m.agents(), m.props(), depth, fr, true, 0};
}

}  // namespace cogal::fixtures

namespace doctest {
template <>
struct StringMaker<cogal::Formula> {
    static String convert(const cogal::Formula& f) { return cogal::render(f).c_str(); }
};
template <>
struct StringMaker<cogal::StateSet> {
    static String convert(const cogal::StateSet& s) { return toString(s.bits()); }
};
}  // namespace doctest

#endif  // COGAL_TESTS_FIXTURES_HPP
