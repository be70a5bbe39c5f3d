// cogal: command-line front end for the CoGAL model checker.
//
//   cogal check MODEL [FORMULA] [--file F] [--at STATE] [--json]
//   cogal suite [--seed N] [--models N] [--max-states N] [--agents a,b] ...
//   cogal search FORMULA [--max-states N] [--out FILE] ...
//   cogal contract MODEL
//   cogal dot MODEL
//   cogal translate FORMULA
//
// Exit status: 0 success (true / all pass / countermodel found), 1 negative
// result, 2 usage, parse or validation error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cogal/checker.hpp"
#include "cogal/harness.hpp"
#include "cogal/translate.hpp"

namespace {

using namespace cogal;

constexpr int kError = 2;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Formula parse_or_report(const std::string& text) {
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw std::runtime_error("parse error at " + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                                 ": " + e.what());
    }
}

std::string choice_text(const KripkeModel& m, const ChoiceReport& r) {
    std::string out = to_string(r.group) + " choose";
    for (const auto& [agent, set] : r.choice.sets) {
        out += " " + agent + "={";
        const auto names = m.names(set);
        for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
        out += "}";
    }
    if (r.choice.sets.empty()) out += " nothing";
    return out + "\n    announcement: " + render(r.announcement);
}

struct CheckArgs {
    std::string model;
    std::string formula;
    std::string file;
    std::string at;
    bool json = false;
};

int cmd_check(const CheckArgs& a) {
    const KripkeModel m = load_model(a.model);
    if (a.formula.empty() == a.file.empty()) throw std::runtime_error("give exactly one of FORMULA or --file");
    const Formula f = parse_or_report(a.file.empty() ? a.formula : read_file(a.file));
    std::size_t point = 0;
    if (!a.at.empty())
        point = m.require_state(a.at);
    else if (m.designated())
        point = *m.designated();
    else
        throw std::runtime_error("model has no designated state; use --at");

    Evaluator ev(m);
    ev.bind(f);
    const Verdict v = ev.check(point, f);
    if (a.json) {
        nlohmann::json j = to_json(v, m);
        j["formula"] = render(f);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "formula: " << render(f) << "\n"
                  << "state: " << m.states()[point] << "\n"
                  << "truth: " << (v.truth ? "true" : "false") << "\n";
        if (v.witness) std::cout << "witness: " << choice_text(m, *v.witness) << "\n";
        if (v.refuted_choice) std::cout << "refuted choice: " << choice_text(m, *v.refuted_choice) << "\n";
        if (v.refutation) std::cout << "refutation: " << choice_text(m, *v.refutation) << "\n";
    }
    return v.truth ? 0 : 1;
}

struct SuiteArgs {
    GenParams params;
    std::string agents = "a,b";
    std::string props = "p,q";
    std::string items;
    std::size_t instantiations = 3;
    std::optional<std::size_t> threads;
    bool json = false;
};

int cmd_suite(SuiteArgs a) {
    a.params.agents = split_list(a.agents);
    a.params.props = split_list(a.props);
    SuiteOptions opts;
    opts.items = split_list(a.items);
    opts.instantiations = a.instantiations;
    opts.threads = a.threads ? *a.threads : threads_from_env();
    const SuiteReport r = axiom_suite(a.params, opts);
    if (a.json)
        std::cout << r.to_json().dump(2) << "\n";
    else
        std::cout << r.to_text();
    return r.passed() ? 0 : 1;
}

struct SearchArgs {
    std::string formula;
    GenParams params{3, {}, {}, 0, 100};
    std::string agents;
    std::string props;
    std::string letters;
    std::size_t pool = 12;
    std::string out;
};

int cmd_search(const SearchArgs& a) {
    const Formula f = parse_or_report(a.formula);
    GenParams bounds = a.params;
    bounds.agents = split_list(a.agents);
    bounds.props = split_list(a.props);
    SearchOptions opts;
    opts.schema_vars = split_list(a.letters);
    if (!opts.schema_vars.empty()) {
        // Pool over the non-schematic vocabulary.
        const std::set<std::string> letters(opts.schema_vars.begin(), opts.schema_vars.end());
        FormulaGen gen{bounds.agents, bounds.props, 2, Fragment::CoGAL, true, 9};
        for (const auto& ag : agents_of(f))
            if (std::find(gen.agents.begin(), gen.agents.end(), ag) == gen.agents.end()) gen.agents.push_back(ag);
        for (const auto& p : atoms_of(f))
            if (!letters.contains(p) && std::find(gen.props.begin(), gen.props.end(), p) == gen.props.end())
                gen.props.push_back(p);
        if (gen.props.empty()) gen.props.push_back("p");
        if (gen.agents.empty()) gen.agents.push_back("a");
        std::mt19937_64 rng = make_rng(bounds.seed, "pool", 0);
        for (std::size_t i = 0; i < a.pool; ++i) opts.pool.push_back(random_formula(rng, gen));
    }
    const auto found = find_countermodel(f, bounds, opts);
    if (!found) {
        std::cout << "no countermodel within bounds\n";
        return 1;
    }
    const std::string doc = to_json(found->model).dump(2) + "\n";
    const std::string where = found->model.states()[found->state];
    if (a.out.empty()) {
        std::cerr << "countermodel found: " << render(found->instance) << " is false at " << where << "\n";
        std::cout << doc;
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!(out << doc)) throw std::runtime_error("cannot write '" + a.out + "'");
        std::cout << "countermodel found: " << render(found->instance) << " is false at " << where << "\n"
                  << "written to " << a.out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model checker for coalition and group announcement logic"};
    app.require_subcommand(1);

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "Evaluate a formula at a state of a model");
    check->add_option("model", check_args.model, "Model document (JSON)")->required();
    check->add_option("formula", check_args.formula, "Formula text");
    check->add_option("--file", check_args.file, "Read the formula from a file");
    check->add_option("--at", check_args.at, "Evaluation state (default: designated)");
    check->add_flag("--json", check_args.json, "Print the verdict as JSON");

    SuiteArgs suite_args;
    auto* suite = app.add_subcommand("suite", "Run the validity suite on random models");
    suite->add_option("--seed", suite_args.params.seed, "Random seed")->capture_default_str();
    suite->add_option("--models", suite_args.params.count, "Number of random models")->capture_default_str();
    suite->add_option("--max-states", suite_args.params.max_states, "States per model, at most")->capture_default_str();
    suite->add_option("--agents", suite_args.agents, "Comma-separated agents")->capture_default_str();
    suite->add_option("--props", suite_args.props, "Comma-separated propositions")->capture_default_str();
    suite->add_option("--items", suite_args.items, "Comma-separated item names (default: all)");
    suite->add_option("--instantiations", suite_args.instantiations, "Instances per model and item")
        ->capture_default_str();
    suite->add_option("--threads", suite_args.threads, "Worker threads (0 = auto; default: COGAL_THREADS)");
    suite->add_flag("--json", suite_args.json, "Print the report as JSON");

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "Search for a countermodel");
    search->add_option("formula", search_args.formula, "Formula text")->required();
    search->add_option("--max-states", search_args.params.max_states, "States per model, at most")
        ->capture_default_str();
    search->add_option("--agents", search_args.agents, "Extra agents (comma-separated)");
    search->add_option("--props", search_args.props, "Extra propositions (comma-separated)");
    search->add_option("--seed", search_args.params.seed, "Random seed")->capture_default_str();
    search->add_option("--models", search_args.params.count, "Random models after enumeration")
        ->capture_default_str();
    search->add_option("--letters", search_args.letters, "Atoms treated as schematic letters");
    search->add_option("--pool", search_args.pool, "Instances per schematic letter")->capture_default_str();
    search->add_option("--out", search_args.out, "Write the countermodel here");

    std::string contract_model;
    auto* contract = app.add_subcommand("contract", "Print the bisimulation contraction of a model");
    contract->add_option("model", contract_model, "Model document (JSON)")->required();

    std::string dot_model;
    auto* dot = app.add_subcommand("dot", "Print a model in Graphviz DOT");
    dot->add_option("model", dot_model, "Model document (JSON)")->required();

    std::string translate_formula;
    auto* translate_cmd = app.add_subcommand("translate", "Rewrite an announcement formula into epistemic logic");
    translate_cmd->add_option("formula", translate_formula, "Formula text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*check) return cmd_check(check_args);
        if (*suite) return cmd_suite(suite_args);
        if (*search) return cmd_search(search_args);
        if (*contract) {
            std::cout << to_json(bisim_contract(load_model(contract_model)).contracted).dump(2) << "\n";
            return 0;
        }
        if (*dot) {
            std::cout << to_dot(load_model(dot_model));
            return 0;
        }
        if (*translate_cmd) {
            std::cout << render(resugar(translate(parse_or_report(translate_formula)))) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
