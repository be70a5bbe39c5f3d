#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cogal/checker.hpp"
#include "support/fixtures.hpp"

using namespace cogal;

namespace {

struct Run {
    int status;
    std::string out;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Run cli(const std::vector<std::string>& args) {
    std::string cmd = quote(COGAL_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int raw = ::pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

const std::string train = fixtures::data_path("train.json");

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "cogal-cli-test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("check") {
    CHECK(cli({"check", train, "[~p] K c ~p", "--at", "w"}).status == 0);
    const Run f = cli({"check", train, "<[{a,c}]> (~K c ~p & ~K c p)", "--at", "w"});
    CHECK(f.status == 1);
    CHECK(f.out.find("truth: false") != std::string::npos);
    CHECK(f.out.find("refutation:") != std::string::npos);
    CHECK(f.out.find("announcement:") != std::string::npos);
    CHECK(cli({"check", train, "K d p", "--at", "w"}).status == 2);
    CHECK(cli({"check", train, "p &", "--at", "w"}).status == 2);
    CHECK(cli({"check", train, "p", "--at", "u"}).status == 2);
    CHECK(cli({"check", "/nonexistent.json", "p"}).status == 2);
    // Designated state w is the default point.
    CHECK(cli({"check", train, "~p"}).status == 0);
    const Run t = cli({"check", train, "<{a,b}> (~K c ~p & ~K c p)"});
    CHECK(t.status == 0);
    CHECK(t.out.find("witness:") != std::string::npos);
}

TEST_CASE("check requires a point without a designated state") {
    auto doc = to_json(fixtures::train());
    doc.erase("designated");
    const auto path = scratch("undesignated.json");
    std::ofstream(path) << doc.dump();
    CHECK(cli({"check", path.string(), "~p"}).status == 2);
    CHECK(cli({"check", path.string(), "~p", "--at", "w"}).status == 0);
}

TEST_CASE("check --json and --file") {
    const Run r = cli({"check", train, "<[{a,b}]> (~K c ~p & ~K c p)", "--json"});
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["truth"] == true);
    CHECK(j["state"] == "w");
    CHECK(j["witness"]["announcement"].is_string());

    const auto path = scratch("formula.txt");
    std::ofstream(path) << "[<{a,c}>]\n  (K c ~p | K c p)\n";
    CHECK(cli({"check", train, "--file", path.string()}).status == 0);
    CHECK(cli({"check", train, "p", "--file", path.string()}).status == 2);
}

TEST_CASE("suite") {
    const Run a = cli({"suite", "--items", "C1", "--seed", "9"});
    const Run b = cli({"suite", "--items", "C1", "--seed", "9"});
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());

    const Run split = cli({"suite", "--items", "prop4"});
    CHECK(split.status == 0);
    CHECK(split.out.find("countermodel at w0") != std::string::npos);

    const Run canary = cli({"suite", "--items", "canary", "--json", "--models", "5"});
    CHECK(canary.status == 0);
    CHECK(nlohmann::json::parse(canary.out)["items"][0]["failures"] == 5);

    CHECK(cli({"suite", "--max-states", "0"}).status == 2);
    CHECK(cli({"suite", "--items", "nonsense"}).status == 2);
    CHECK(cli({"suite", "--agents", "A"}).status == 2);
    CHECK(cli({"suite", "--seed", "x"}).status == 2);
}

TEST_CASE("the full suite passes") {
    const Run r = cli({"suite", "--seed", "7", "--models", "100", "--max-states", "4"});
    CHECK(r.status == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("search") {
    const auto out = scratch("countermodel.json");
    std::filesystem::remove(out);
    CHECK(cli({"search", "p -> K a p", "--max-states", "2", "--out", out.string()}).status == 0);
    REQUIRE(std::filesystem::exists(out));
    const KripkeModel m = load_model(out.string());
    CHECK_FALSE(eval(m, *m.designated(), implies(atom("p"), know("a", atom("p")))));
    CHECK(cli({"check", out.string(), "p -> K a p"}).status == 1);

    CHECK(cli({"search", "K a p -> p", "--max-states", "3"}).status == 1);
    CHECK(cli({"search", "p &"}).status == 2);

    const Run printed = cli({"search", "p -> K a p", "--max-states", "2"});
    CHECK(printed.status == 0);
    CHECK(validate(nlohmann::json::parse(printed.out)).num_states() == 2);

    CHECK(cli({"search", "x -> K a x", "--letters", "x", "--props", "p", "--max-states", "2"}).status == 0);
}

TEST_CASE("contract, dot and translate") {
    const Run c = cli({"contract", train});
    CHECK(c.status == 0);
    CHECK(validate(nlohmann::json::parse(c.out)) == fixtures::train());

    const Run d = cli({"dot", train});
    CHECK(d.status == 0);
    CHECK(d.out.find("\"w\" -- \"v\" [label=\"c\"]") != std::string::npos);
    std::size_t edges = 0;
    for (std::size_t pos = 0; (pos = d.out.find(" -- ", pos)) != std::string::npos; ++pos) ++edges;
    CHECK(edges == 1);

    const Run t = cli({"translate", "[p] K a q"});
    CHECK(t.status == 0);
    CHECK(t.out == "p -> K a (p -> q)\n");
    CHECK(cli({"translate", "[{a}] p"}).status == 2);
    CHECK(cli({}).status == 2);
    CHECK(cli({"frobnicate"}).status == 2);
    CHECK(cli({"--help"}).status == 0);
}
