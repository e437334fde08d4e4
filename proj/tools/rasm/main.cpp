#include <CLI11.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rasm/instances.hpp"
#include "rasm/markov.hpp"
#include "rasm/rule_algebra.hpp"
#include "rasm/rule_json.hpp"
#include "rasm/species.hpp"

using namespace rasm;

namespace {

// flag combinations the parser accepts but the command cannot honor
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SystemBundle {
    std::string label;
    std::shared_ptr<const TypeGraph> types;
    ConstraintSet constraints;
    std::vector<WeightedRule> rules;
    std::vector<Observable> observables;
    TypedGraph initial;
};

SystemBundle load_system(const std::string& name, const std::string& initial) {
    if (name == "prbt") {
        PRBTSystem sys = make_remy_system();
        if (!initial.empty() && initial != "default")
            throw UsageError("--initial for the tree system must be 'default'");
        return {name,         sys.type_graph,  sys.constraints,
                sys.rules,    sys.observables, make_initial_tree(sys.type_graph)};
    }
    if (name == "birthdeath" || name == "birthdeath:conditioned") {
        BirthDeathSystem bd = make_birth_death(name != "birthdeath");
        int n = 0;
        if (!initial.empty() && initial != "empty") {
            try {
                std::size_t used = 0;
                n = std::stoi(initial, &used);
                if (used != initial.size() || n < 0) throw std::invalid_argument(initial);
            } catch (const std::exception&) {
                throw UsageError("--initial for birthdeath must be 'empty' or a vertex count");
            }
        }
        TypedGraph one(bd.type_graph);
        one.add_vertex("p", 0);
        Observable vertices{"V", {Rule::identity("V", one)}};
        return {name,      bd.type_graph, bd.constraints,
                bd.rules,  {vertices},    make_vertices(bd.type_graph, n)};
    }
    throw UsageError("unknown system '" + name + "' (prbt, birthdeath, birthdeath:conditioned)");
}

void load_rule_file(SystemBundle& bundle, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read rule file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    RuleSetFile file = rule_set_from_json(ss.str());
    if (!(*file.types == *bundle.types))
        throw std::runtime_error("rule file '" + path +
                                 "' uses a different type graph than system " + bundle.label);
    bundle.rules = file.rules;
}

void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move '" + tmp + "' to '" + path + "'");
}

bool row(const std::string& label, bool pass, const std::string& note = "") {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << label;
    if (!pass && !note.empty()) std::cout << " (" << note << ")";
    std::cout << "\n";
    return pass;
}

bool row(const std::string& label, const IdentityReport& rep) {
    std::string note;
    if (!rep.pass) {
        note = "witness column " + std::to_string(rep.witness_column);
        if (!rep.detail.empty()) note += ": " + rep.detail;
    }
    return row(label, rep.pass, note);
}

FormalSum weighted_sum(const std::vector<WeightedRule>& rules) {
    FormalSum s;
    for (const auto& wr : rules) s.add(wr.weight, wr.rule);
    return s;
}

FormalSum observable_sum(const Observable& obs) {
    FormalSum s;
    for (const auto& part : obs.parts) s.add(Rat(1), part);
    return s;
}

// ---------------------------------------------------------------- enumerate

int cmd_enumerate(const SystemBundle& bundle, int generations, const std::string& out,
                  const std::string& format) {
    GenerationTable table =
        expand(bundle.rules, bundle.initial, generations, Semantics::SqPO, &bundle.constraints);

    std::cout << "g_0";
    if (generations > 0) std::cout << "..g_" << generations;
    std::cout << " = ";
    for (int n = 0; n <= generations; ++n)
        std::cout << (n ? ", " : "") << rat_to_string(table.generation_weight(n));
    std::cout << "\n";

    if (out.empty()) return 0;
    std::ostringstream data;
    if (format == "csv") {
        data << "generation,key,weight,vertices,edges\n";
        for (int n = 0; n <= generations; ++n)
            for (const auto& [key, entry] : table.generations[n])
                data << n << ',' << hex_key(key) << ',' << rat_to_string(entry.weight) << ','
                     << entry.representative.n_vertices() << ','
                     << entry.representative.n_edges() << '\n';
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (int n = 0; n <= generations; ++n)
            for (const auto& [key, entry] : table.generations[n])
                arr.push_back({{"generation", n},
                               {"key", hex_key(key)},
                               {"weight", rat_to_string(entry.weight)},
                               {"vertices", entry.representative.n_vertices()},
                               {"edges", entry.representative.n_edges()}});
        data << arr.dump(2) << '\n';
    } else {
        throw UsageError("--format must be csv or json");
    }
    write_atomic(out, data.str());
    std::cout << "wrote " << out << "\n";
    return 0;
}

// ------------------------------------------------------------------ verify

bool suite_commutators(const SystemBundle& bundle, int depth) {
    if (bundle.observables.size() != 4)
        throw UsageError("suite commutators needs the prbt observables");
    GenerationTable table =
        expand(bundle.rules, bundle.initial, depth + 2, Semantics::SqPO, &bundle.constraints);
    auto basis = std::make_shared<StateBasis>(state_basis(table));
    std::vector<int> cols = basis->interior(depth);

    SparseOperator g = represent(weighted_sum(bundle.rules), basis, Semantics::SqPO);
    auto diag = [&](int i) {
        return represent(observable_sum(bundle.observables[i]), basis, Semantics::SqPO);
    };
    SparseOperator oe = diag(0), p1 = diag(1), p2 = diag(2), p3 = diag(3);
    SparseOperator c2 = commutator(p2, g);
    SparseOperator c3 = commutator(p3, g);
    SparseOperator c23 = commutator(p2, c3);

    bool ok = true;
    ok &= row("[O_E, G] = 2 G entrywise", verify_identity(commutator(oe, g), scale(g, Rat(2)), cols));
    ok &= row("<| G = 2 <| O_E", verify_projected(g, scale(oe, Rat(2)), cols));
    ok &= row("[O_P1, G] = G entrywise", verify_identity(commutator(p1, g), g, cols));
    ok &= row("<| [O_P2, G] = <| (3 O_P1 - 2 O_P2)",
              verify_projected(c2, subtract(scale(p1, Rat(3)), scale(p2, Rat(2))), cols));
    ok &= row("<| [O_P2, [O_P2, G]] = <| [O_P2, G]",
              verify_projected(commutator(p2, c2), c2, cols));
    ok &= row("<| [O_P3, G] = <| (4 O_P2 - 4 O_P3)",
              verify_projected(c3, subtract(scale(p2, Rat(4)), scale(p3, Rat(4))), cols));
    ok &= row("<| [O_P2, [O_P3, G]] = <| (4 O_P2 - 3 O_P3)",
              verify_projected(c23, subtract(scale(p2, Rat(4)), scale(p3, Rat(3))), cols));
    ok &= row("<| [O_P2, [O_P3, G]] - <| [O_P3, G] = <| O_P3",
              verify_projected(subtract(c23, c3), p3, cols));
    ok &= row("<| [O_P3, [O_P3, G]] = <| [O_P3, G] + 2 <| O_P3",
              verify_projected(commutator(p3, c3), add(c3, scale(p3, Rat(2))), cols));
    return ok;
}

bool suite_jumpclosure(const SystemBundle& bundle, int depth) {
    GenerationTable table =
        expand(bundle.rules, bundle.initial, depth + 1, Semantics::SqPO, &bundle.constraints);
    auto basis = std::make_shared<StateBasis>(state_basis(table));
    std::vector<int> cols = basis->interior(depth);

    bool ok = true;
    for (const auto& wr : bundle.rules) {
        SparseOperator lhs = represent(FormalSum::of(wr.rule), basis, Semantics::SqPO);
        Rule input = Rule::identity(wr.rule.name + "_input", wr.rule.i, wr.rule.condition);
        SparseOperator rhs = represent(FormalSum::of(input), basis, Semantics::SqPO);
        ok &= row("<| R_" + wr.rule.name + " = <| O_input", verify_projected(lhs, rhs, cols));
    }
    return ok;
}

bool suite_homomorphism(const SystemBundle& bundle, int depth) {
    GenerationTable table =
        expand(bundle.rules, bundle.initial, depth + 2, Semantics::SqPO, &bundle.constraints);
    auto basis = std::make_shared<StateBasis>(state_basis(table));
    std::vector<int> cols = basis->interior(depth);

    std::vector<SparseOperator> reps;
    reps.reserve(bundle.rules.size());
    for (const auto& wr : bundle.rules)
        reps.push_back(represent(FormalSum::of(wr.rule), basis, Semantics::SqPO));

    bool ok = true;
    for (std::size_t a = 0; a < bundle.rules.size(); ++a)
        for (std::size_t b = 0; b < bundle.rules.size(); ++b) {
            FormalSum composite =
                compose(bundle.rules[a].rule, bundle.rules[b].rule, bundle.constraints);
            IdentityReport rep = verify_identity(
                represent(composite, basis, Semantics::SqPO), product(reps[a], reps[b]), cols);
            ok &= row(bundle.rules[a].rule.name + " after " + bundle.rules[b].rule.name, rep);
        }
    return ok;
}

bool dtmc_rows(const std::string& name, const SystemBundle& bundle, int depth) {
    TransitionSet ts{bundle.rules, Semantics::SqPO};
    GenerationTable table =
        expand(bundle.rules, bundle.initial, depth, Semantics::SqPO, &bundle.constraints);
    auto basis = std::make_shared<StateBasis>(state_basis(table));
    SparseOperator h = build_generator(ts, basis);
    SparseOperator d = embedded_dtmc(ts, basis);

    bool zero = true, one = true, complete = true;
    for (int j : basis->interior(depth - 1)) {
        complete &= h.col_complete[j] != 0;
        zero &= h.column_sum(j) == Rat(0);
        one &= d.column_sum(j) == Rat(1);
    }
    bool ok = true;
    ok &= row(name + ": interior columns are complete", complete);
    ok &= row(name + ": rate matrix columns sum to zero", zero);
    ok &= row(name + ": jump chain columns sum to one", one);
    return ok;
}

bool suite_dtmc(int depth) {
    bool ok = true;
    ok &= dtmc_rows("prbt", load_system("prbt", ""), depth);
    ok &= dtmc_rows("birthdeath", load_system("birthdeath", "empty"), depth);
    ok &= dtmc_rows("birthdeath:conditioned", load_system("birthdeath:conditioned", "2"), depth);
    return ok;
}

bool suite_marginal(const SystemBundle& bundle, int depth) {
    if (bundle.label != "prbt") throw UsageError("suite marginal runs on the prbt system");
    TransitionSet ts{bundle.rules, Semantics::SqPO};
    GenerationTable fit_table =
        expand(bundle.rules, bundle.initial, depth, Semantics::SqPO, &bundle.constraints);
    CountTable fit_counts = count_patterns(fit_table, bundle.observables);

    MarginalGenerator mg;
    try {
        mg = derive_marginal_generator(fit_table, fit_counts, ts);
    } catch (const std::runtime_error& e) {
        return row("count shifts close over the observables", false, e.what());
    }
    bool ok = row("count shifts close over the observables", true);
    ok &= row("exactly four count shifts", mg.transitions.size() == 4);

    Rat c_sum = 0;
    std::vector<Rat> coeff_sum(bundle.observables.size(), Rat(0));
    for (const auto& tr : mg.transitions) {
        c_sum += tr.weight.constant;
        for (std::size_t i = 0; i < coeff_sum.size(); ++i) coeff_sum[i] += tr.weight.coeffs[i];
    }
    ok &= row("shift weights sum to the activity",
              c_sum == mg.normalizer.constant && coeff_sum == mg.normalizer.coeffs);

    GenerationTable deep = expand(bundle.rules, bundle.initial, 6, Semantics::SqPO);
    CountTable deep_counts = count_patterns(deep, bundle.observables);
    auto basis = std::make_shared<StateBasis>(state_basis(deep));
    SparseOperator d = embedded_dtmc(ts, basis);
    CountVector c0;
    for (const auto& obs : bundle.observables)
        c0.push_back(observable_count(obs, bundle.initial).get_si());

    bool cross = true;
    for (int n = 0; n <= 6; ++n) {
        CountDistribution folded;
        for (const auto& [key, p] : dtmc_propagate(d, bundle.initial, n)) {
            const auto& r = deep_counts.at(key);
            CountVector c(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) c[i] = r[i].get_si();
            folded[c] += p;
        }
        cross &= marginal_propagate(mg, c0, n) == folded;
    }
    ok &= row("marginal propagation matches the jump chain through 6 steps", cross);

    CountDistribution far = marginal_propagate(mg, c0, 50);
    Rat mass = 0;
    bool nonneg = true, point = true;
    for (const auto& [c, p] : far) {
        mass += p;
        nonneg &= p >= 0;
        point &= c[0] == 101;
    }
    ok &= row("50-step law is normalized with nonnegative weights",
              mass == Rat(1) && nonneg);
    ok &= row("50-step edge count is pinned at 101", point);
    return ok;
}

int cmd_verify(const SystemBundle& bundle, const std::string& suite, int depth) {
    bool ok = false;
    if (suite == "commutators")
        ok = suite_commutators(bundle, depth > 0 ? depth : 5);
    else if (suite == "jumpclosure")
        ok = suite_jumpclosure(bundle, depth > 0 ? depth : 5);
    else if (suite == "homomorphism")
        ok = suite_homomorphism(bundle, depth > 0 ? depth : 4);
    else if (suite == "dtmc")
        ok = suite_dtmc(depth > 0 ? depth : 4);
    else if (suite == "marginal")
        ok = suite_marginal(bundle, depth > 0 ? depth : 5);
    else
        throw UsageError("unknown suite '" + suite + "'");
    std::cout << (ok ? "all checks passed" : "suite failed") << "\n";
    return ok ? 0 : 1;
}

// --------------------------------------------------------------------- ssa

int cmd_ssa(const SystemBundle& bundle, long steps, double max_time, int samples,
            std::uint64_t seed, const std::string& out) {
    if (steps < 0 && !(max_time < std::numeric_limits<double>::infinity()))
        throw UsageError("ssa needs --steps or --max-time");
    SsaOptions opt;
    opt.max_steps = steps;
    opt.max_time = max_time;
    TransitionSet ts{bundle.rules, Semantics::SqPO};

    std::vector<std::string> names;
    for (const auto& obs : bundle.observables) names.push_back(obs.name);

    std::ostringstream data;
    long jumps = 0;
    for (int i = 0; i < samples; ++i) {
        Trajectory tr = ssa_run(ts, bundle.initial, opt, seed + static_cast<std::uint64_t>(i),
                                bundle.observables);
        jumps += static_cast<long>(tr.points.size()) - 1;
        export_trajectory_jsonl(tr, names, data);
    }
    if (out.empty()) {
        std::cout << data.str();
    } else {
        write_atomic(out, data.str());
        std::cout << samples << " trajectories, " << jumps << " jumps, wrote " << out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------- marginal / plot

std::vector<int> project_indices(const SystemBundle& bundle, const std::string& project) {
    std::vector<int> keep;
    if (project.empty()) {
        for (std::size_t i = 0; i < bundle.observables.size(); ++i)
            keep.push_back(static_cast<int>(i));
        return keep;
    }
    std::stringstream ss(project);
    std::string name;
    while (std::getline(ss, name, ',')) {
        int found = -1;
        for (std::size_t i = 0; i < bundle.observables.size(); ++i)
            if (bundle.observables[i].name == name) found = static_cast<int>(i);
        if (found < 0) throw UsageError("unknown observable '" + name + "' in --project");
        keep.push_back(found);
    }
    if (keep.empty()) throw UsageError("--project names no observables");
    return keep;
}

CountDistribution marginal_law(const SystemBundle& bundle, int depth, int steps) {
    TransitionSet ts{bundle.rules, Semantics::SqPO};
    GenerationTable table =
        expand(bundle.rules, bundle.initial, depth, Semantics::SqPO, &bundle.constraints);
    MarginalGenerator mg =
        derive_marginal_generator(table, count_patterns(table, bundle.observables), ts);
    CountVector c0;
    for (const auto& obs : bundle.observables)
        c0.push_back(observable_count(obs, bundle.initial).get_si());
    return marginal_propagate(mg, c0, steps);
}

int cmd_marginal(const SystemBundle& bundle, int depth, int steps, const std::string& project,
                 const std::string& format, const std::string& out) {
    std::vector<int> keep = project_indices(bundle, project);
    CountDistribution dist = project_counts(marginal_law(bundle, depth, steps), keep);
    std::vector<std::string> names;
    for (int i : keep) names.push_back(bundle.observables[i].name);

    std::ostringstream data;
    export_distribution(dist, names, format, data);
    if (out.empty()) {
        std::cout << data.str();
    } else {
        write_atomic(out, data.str());
        std::cout << dist.size() << " count vectors after " << steps << " jumps, wrote " << out
                  << "\n";
    }
    return 0;
}

int cmd_plotdata(const SystemBundle& bundle, int depth, int steps, std::string project,
                 const std::string& out) {
    if (out.empty()) throw UsageError("plotdata needs --out");
    if (project.empty() && bundle.label == "prbt") project = "P2,P3";
    std::vector<int> keep = project_indices(bundle, project);
    if (keep.size() != 2) throw UsageError("plotdata projects onto exactly two observables");
    CountDistribution dist = project_counts(marginal_law(bundle, depth, steps), keep);
    std::vector<std::string> names = {bundle.observables[keep[0]].name,
                                      bundle.observables[keep[1]].name};

    std::ostringstream data;
    export_distribution(dist, names, "csv", data);
    write_atomic(out, data.str());

    std::string script = out;
    std::size_t dot = script.find_last_of("./");
    if (dot != std::string::npos && script[dot] == '.')
        script.erase(dot);
    script += ".gp";

    std::ostringstream gp;
    gp << "# " << names[0] << "/" << names[1] << " distribution after " << steps
       << " jumps of the " << bundle.label << " chain\n"
       << "set datafile separator ','\n"
       << "set key off\n"
       << "set xlabel '" << names[0] << "'\n"
       << "set ylabel '" << names[1] << "'\n"
       << "set zlabel 'probability'\n"
       << "set ticslevel 0\n"
       << "splot '" << out << "' every ::1 using 1:2:3 with impulses linewidth 2, \\\n"
       << "      '" << out << "' every ::1 using 1:2:3 with points pointtype 7\n";
    write_atomic(script, gp.str());
    std::cout << "wrote " << out << " and " << script << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic graph rewriting workbench"};
    app.require_subcommand(1);

    std::string system = "prbt", initial, rules_path, out, format = "csv", suite, project;
    int generations = 5, depth = 0, steps = -1, samples = 1;
    double max_time = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    auto add_system = [&](CLI::App* cmd) {
        cmd->add_option("--system", system, "prbt, birthdeath or birthdeath:conditioned");
        cmd->add_option("--initial", initial, "initial state (birthdeath: 'empty' or a count)");
        cmd->add_option("--rules", rules_path, "JSON rule set overriding the shipped rules");
    };

    CLI::App* enumerate = app.add_subcommand(
        "enumerate", "expand the chain and print the generation weight sequence");
    add_system(enumerate);
    enumerate->add_option("--generations", generations, "depth of the expansion")
        ->check(CLI::NonNegativeNumber);
    enumerate->add_option("--out", out, "write the generation table here");
    enumerate->add_option("--format", format, "csv or json");

    CLI::App* verify = app.add_subcommand("verify", "run an exact identity suite");
    add_system(verify);
    verify->add_option("--suite", suite,
                       "commutators, jumpclosure, homomorphism, dtmc or marginal")
        ->required();
    verify->add_option("--depth", depth, "interior generations to assert")
        ->check(CLI::PositiveNumber);

    CLI::App* ssa = app.add_subcommand("ssa", "sample exact stochastic trajectories");
    add_system(ssa);
    ssa->add_option("--steps", steps, "jump bound per trajectory");
    ssa->add_option("--max-time", max_time, "time horizon per trajectory");
    ssa->add_option("--samples", samples, "number of trajectories")
        ->check(CLI::PositiveNumber);
    ssa->add_option("--seed", seed, "base seed; trajectory i uses seed + i")->required();
    ssa->add_option("--out", out, "write JSONL here instead of stdout");

    CLI::App* marginal =
        app.add_subcommand("marginal", "propagate the pattern-count law exactly");
    add_system(marginal);
    marginal->add_option("--steps", steps, "number of jumps")
        ->required()
        ->check(CLI::NonNegativeNumber);
    marginal->add_option("--depth", depth, "expansion depth for the count-shift fit");
    marginal->add_option("--project", project, "comma-separated observable names to keep");
    marginal->add_option("--format", format, "csv or json");
    marginal->add_option("--out", out, "write the distribution here instead of stdout");

    CLI::App* plotdata = app.add_subcommand(
        "plotdata", "write a two-observable distribution CSV plus a gnuplot script");
    add_system(plotdata);
    plotdata->add_option("--steps", steps, "number of jumps")->check(CLI::NonNegativeNumber);
    plotdata->add_option("--depth", depth, "expansion depth for the count-shift fit");
    plotdata->add_option("--project", project, "two observable names (default P2,P3)");
    plotdata->add_option("--out", out, "CSV path; the script lands next to it")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        SystemBundle bundle = load_system(system, initial);
        load_rule_file(bundle, rules_path);
        if (enumerate->parsed()) return cmd_enumerate(bundle, generations, out, format);
        if (verify->parsed()) return cmd_verify(bundle, suite, depth);
        if (ssa->parsed()) return cmd_ssa(bundle, steps, max_time, samples, seed, out);
        if (marginal->parsed())
            return cmd_marginal(bundle, depth > 0 ? depth : 5, steps, project, format, out);
        if (plotdata->parsed())
            return cmd_plotdata(bundle, depth > 0 ? depth : 5, steps >= 0 ? steps : 5, project,
                                out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
