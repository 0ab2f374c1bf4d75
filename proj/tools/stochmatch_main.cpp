#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stochmatch/attenuation.hpp"
#include "stochmatch/bounds.hpp"
#include "stochmatch/errors.hpp"
#include "stochmatch/generator.hpp"
#include "stochmatch/graph.hpp"
#include "stochmatch/instance_io.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/oracle.hpp"
#include "stochmatch/probing.hpp"
#include "stochmatch/rounding.hpp"
#include "stochmatch/unit_patience.hpp"

namespace sm = stochmatch;

namespace {

// ---------------------------------------------------------------------------
// Report model: every command fills one of these and a single emitter renders
// it as an aligned table, delimited values, or structured text.  The config
// block is the audit header; --jobs is deliberately left out of it so output
// bytes are identical for any worker count.

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, std::string>> scalars;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

void emit_table_format(const Report& r) {
    for (const auto& [k, v] : r.config) std::printf("# %s = %s\n", k.c_str(), v.c_str());
    for (const Table& t : r.tables) {
        std::printf("\n== %s ==\n", t.name.c_str());
        std::vector<size_t> width(t.columns.size());
        for (size_t c = 0; c < t.columns.size(); ++c) width[c] = t.columns[c].size();
        for (const auto& row : t.rows) {
            for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
        }
        auto line = [&](const std::vector<std::string>& cells) {
            for (size_t c = 0; c < cells.size(); ++c) {
                std::printf("%-*s", static_cast<int>(width[c]) + (c + 1 < cells.size() ? 2 : 0),
                            cells[c].c_str());
            }
            std::printf("\n");
        };
        line(t.columns);
        for (const auto& row : t.rows) line(row);
    }
    if (!r.scalars.empty()) {
        std::printf("\n");
        for (const auto& [k, v] : r.scalars) std::printf("%s = %s\n", k.c_str(), v.c_str());
    }
}

void emit_csv_format(const Report& r) {
    for (const auto& [k, v] : r.config) std::printf("# %s=%s\n", k.c_str(), v.c_str());
    auto row_out = [](const std::vector<std::string>& cells) {
        for (size_t c = 0; c < cells.size(); ++c) {
            std::printf("%s%s", c ? "," : "", csv_quote(cells[c]).c_str());
        }
        std::printf("\n");
    };
    for (const Table& t : r.tables) {
        std::printf("table,%s\n", csv_quote(t.name).c_str());
        row_out(t.columns);
        for (const auto& row : t.rows) row_out(row);
    }
    for (const auto& [k, v] : r.scalars) {
        std::printf("scalar,%s,%s\n", csv_quote(k).c_str(), csv_quote(v).c_str());
    }
}

void emit_json_format(const Report& r) {
    nlohmann::ordered_json doc;
    auto& config = doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) config[k] = v;
    auto& tables = doc["tables"] = nlohmann::ordered_json::object();
    for (const Table& t : r.tables) {
        auto& jt = tables[t.name] = nlohmann::ordered_json::object();
        jt["columns"] = t.columns;
        jt["rows"] = t.rows;
    }
    auto& scalars = doc["scalars"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.scalars) scalars[k] = v;
    std::printf("%s\n", doc.dump(2).c_str());
}

void emit(const Report& r, const std::string& format) {
    if (format == "table") emit_table_format(r);
    else if (format == "csv") emit_csv_format(r);
    else emit_json_format(r);
}

// ---------------------------------------------------------------------------
// Options shared across subcommands.

struct Options {
    std::string instance;
    std::string gen;
    std::string attenuation = "exp";
    double alpha = 0.5;
    std::uint64_t reps = 10000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double tol = 1e-7;
    std::string format = "table";
    int jobs = 1;
    bool exact = false;
    bool full_search = false;
    int z_steps = 0;  // per-command default applied at dispatch
    int t_max = 47;
    std::string y_from = "solve";
    std::string out;
    bool compare = false;
    std::string family;  // check-attenuation
};

void require_seed(const Options& o) {
    if (!o.seed_given) {
        throw sm::ValidationError("--seed is required (no wall-clock default)");
    }
}

sm::StochasticGraph resolve_instance(const Options& o) {
    if (!o.instance.empty() && !o.gen.empty()) {
        throw sm::ValidationError("give either --instance or --gen, not both");
    }
    if (!o.instance.empty()) return sm::load_instance_file(o.instance);
    if (!o.gen.empty()) {
        require_seed(o);
        return sm::generate_instance(sm::parse_generator_spec(o.gen), o.seed);
    }
    throw sm::ValidationError("one of --instance or --gen is required");
}

void push_source_config(Report& r, const Options& o) {
    if (!o.instance.empty()) r.config.emplace_back("instance", o.instance);
    if (!o.gen.empty()) r.config.emplace_back("gen", o.gen);
}

std::string ratio_or_dash(double num, double den) {
    return den > 1e-15 ? fmt(num / den) : "-";
}

// ---------------------------------------------------------------------------
// Subcommand handlers.

int cmd_gen(const Options& o) {
    if (o.gen.empty()) throw sm::ValidationError("gen: --gen SPEC is required");
    require_seed(o);
    const sm::StochasticGraph g = sm::generate_instance(sm::parse_generator_spec(o.gen), o.seed);
    const std::string text = sm::format_instance(g);
    if (o.out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        sm::save_instance_file(g, o.out);
    }
    return 0;
}

int cmd_solve(const Options& o) {
    const sm::StochasticGraph g = resolve_instance(o);
    const sm::LpSolution lp = sm::solve_lp(g);
    const sm::FeasibilityReport feas = sm::check_feasibility(g, lp.y, o.tol);

    Report r;
    r.config.emplace_back("command", "solve");
    push_source_config(r, o);
    r.config.emplace_back("tol", fmt(o.tol));
    r.config.emplace_back("format", o.format);

    Table edges{"edges", {"edge", "u", "v", "w", "p", "y", "z"}, {}};
    for (int e = 0; e < g.num_edges(); ++e) {
        const sm::Edge& ed = g.edge(e);
        edges.rows.push_back({std::to_string(e), g.vertex(ed.u).name, g.vertex(ed.v).name,
                              fmt(ed.weight), fmt(ed.prob), fmt(lp.y[e]), fmt(lp.z[e])});
    }
    r.tables.push_back(std::move(edges));
    if (!feas.feasible()) {
        Table viol{"violations", {"description"}, {}};
        for (const auto& v : feas.violations) viol.rows.push_back({v.describe(g)});
        r.tables.push_back(std::move(viol));
    }
    r.scalars.emplace_back("objective", fmt(lp.objective));
    r.scalars.emplace_back("iterations", std::to_string(lp.iterations));
    r.scalars.emplace_back("feasible", fmt_bool(feas.feasible()));
    emit(r, o.format);
    return 0;
}

int cmd_simulate(const Options& o) {
    const sm::StochasticGraph g = resolve_instance(o);
    const sm::AttenuationSpec atten = sm::make_attenuation(o.attenuation, o.alpha);
    const sm::LpSolution lp = sm::solve_lp(g);

    Report r;
    r.config.emplace_back("command", "simulate");
    push_source_config(r, o);
    r.config.emplace_back("attenuation", atten.to_string());
    r.config.emplace_back("exact", fmt_bool(o.exact));
    if (!o.exact) {
        r.config.emplace_back("reps", std::to_string(o.reps));
        r.config.emplace_back("seed", std::to_string(o.seed));
    }
    r.config.emplace_back("format", o.format);

    Table edges{"edges", {"edge", "u", "v", "y", "z", "probe_rate", "ci", "ratio"}, {}};
    if (o.exact) {
        const std::vector<double> probs = sm::exact_probe_probabilities(g, lp.y, atten);
        for (int e = 0; e < g.num_edges(); ++e) {
            const sm::Edge& ed = g.edge(e);
            edges.rows.push_back({std::to_string(e), g.vertex(ed.u).name, g.vertex(ed.v).name,
                                  fmt(lp.y[e]), fmt(lp.z[e]), fmt(probs[e]), fmt(0.0),
                                  ratio_or_dash(probs[e], lp.y[e])});
        }
        r.tables.push_back(std::move(edges));
    } else {
        require_seed(o);
        const sm::SimResult res = sm::monte_carlo(g, lp.y, atten, o.reps, o.seed, o.jobs);
        for (int e = 0; e < g.num_edges(); ++e) {
            const sm::Edge& ed = g.edge(e);
            edges.rows.push_back({std::to_string(e), g.vertex(ed.u).name, g.vertex(ed.v).name,
                                  fmt(lp.y[e]), fmt(lp.z[e]), fmt(res.probe_rate[e]),
                                  fmt(res.probe_ci[e]), ratio_or_dash(res.probe_rate[e], lp.y[e])});
        }
        r.tables.push_back(std::move(edges));
        r.scalars.emplace_back("mean_weight", fmt(res.mean_weight));
        r.scalars.emplace_back("weight_ci", fmt(res.weight_ci));
    }
    r.scalars.emplace_back("lp_objective", fmt(lp.objective));
    emit(r, o.format);
    return 0;
}

std::vector<double> load_y_file(const std::string& path, int num_edges) {
    std::ifstream in(path);
    if (!in) throw sm::ParseError(path + ": cannot open");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw sm::ParseError(path + ": " + e.what());
    }
    if (doc.is_object() && doc.contains("y")) doc = doc["y"];
    if (!doc.is_array()) throw sm::ParseError(path + ": expected an array of y values");
    std::vector<double> y;
    for (const auto& v : doc) {
        if (!v.is_number()) throw sm::ParseError(path + ": y entries must be numbers");
        y.push_back(v.get<double>());
    }
    if (static_cast<int>(y.size()) != num_edges) {
        throw sm::ValidationError(path + ": expected " + std::to_string(num_edges) +
                                  " y values, got " + std::to_string(y.size()));
    }
    return y;
}

int cmd_round(const Options& o) {
    const sm::StochasticGraph g = resolve_instance(o);
    require_seed(o);
    const std::vector<double> y =
        o.y_from == "solve" ? sm::solve_lp(g).y : load_y_file(o.y_from, g.num_edges());
    const sm::RoundedVector rounded = sm::dependent_round(g, y, o.seed);

    Report r;
    r.config.emplace_back("command", "round");
    push_source_config(r, o);
    r.config.emplace_back("y_from", o.y_from);
    r.config.emplace_back("seed", std::to_string(o.seed));
    r.config.emplace_back("format", o.format);

    Table edges{"edges", {"edge", "u", "v", "y", "Y"}, {}};
    for (int e = 0; e < g.num_edges(); ++e) {
        const sm::Edge& ed = g.edge(e);
        edges.rows.push_back({std::to_string(e), g.vertex(ed.u).name, g.vertex(ed.v).name,
                              fmt(y[e]), std::to_string(rounded.values[e])});
    }
    r.tables.push_back(std::move(edges));

    Table verts{"vertices", {"vertex", "frac_degree", "rounded_degree", "within_floor_ceil"}, {}};
    for (int v = 0; v < g.num_vertices(); ++v) {
        double frac = 0.0;
        int sum = 0;
        for (int e : g.incident(v)) {
            frac += y[e];
            sum += rounded.values[e];
        }
        const bool ok = sum >= std::floor(frac + 1e-9) - 1e-9 && sum <= std::ceil(frac - 1e-9) + 1e-9;
        verts.rows.push_back({g.vertex(v).name, fmt(frac), std::to_string(sum), fmt_bool(ok)});
    }
    r.tables.push_back(std::move(verts));
    r.scalars.emplace_back("iterations", std::to_string(rounded.iterations));
    r.scalars.emplace_back("degree_rounding_ok", fmt_bool(sm::degree_rounding_ok(g, y, rounded)));
    emit(r, o.format);
    return 0;
}

int cmd_unit_patience(const Options& o) {
    const sm::StochasticGraph g = resolve_instance(o);
    require_seed(o);
    const sm::UnitPatienceStats stats = sm::unit_patience_monte_carlo(g, o.reps, o.seed);

    Report r;
    r.config.emplace_back("command", "unit-patience");
    push_source_config(r, o);
    r.config.emplace_back("reps", std::to_string(o.reps));
    r.config.emplace_back("seed", std::to_string(o.seed));
    r.config.emplace_back("format", o.format);

    Table verts{"centers", {"vertex", "opt", "lower_bound", "mean", "ci", "ratio"}, {}};
    for (const sm::VertexStats& vs : stats.per_vertex) {
        verts.rows.push_back({g.vertex(vs.vertex).name, fmt(vs.opt), fmt(vs.lower_bound),
                              fmt(vs.mean), fmt(vs.ci), ratio_or_dash(vs.mean, vs.opt)});
    }
    r.tables.push_back(std::move(verts));
    r.scalars.emplace_back("lp_objective", fmt(stats.lp_objective));
    r.scalars.emplace_back("total_mean", fmt(stats.total_mean));
    r.scalars.emplace_back("total_ci", fmt(stats.total_ci));
    r.scalars.emplace_back("aggregate_ratio", ratio_or_dash(stats.total_mean, stats.lp_objective));
    r.scalars.emplace_back("one_minus_inv_e", fmt(1.0 - std::exp(-1.0)));
    emit(r, o.format);
    return 0;
}

int cmd_verify_bounds(const Options& o) {
    const sm::AttenuationSpec atten = sm::make_attenuation(o.attenuation, o.alpha);
    const int z_steps = o.z_steps > 0 ? o.z_steps : 101;

    Report r;
    r.config.emplace_back("command", "verify-bounds");
    r.config.emplace_back("attenuation", atten.to_string());
    r.config.emplace_back("full_search", fmt_bool(o.full_search));
    if (o.full_search) {
        r.config.emplace_back("t_max", std::to_string(o.t_max));
        r.config.emplace_back("z_steps", std::to_string(z_steps));
    }
    r.config.emplace_back("format", o.format);

    const auto t2 = sm::Patience::finite(2);
    const auto t48 = sm::Patience::finite(48);
    const auto tinf = sm::Patience::infinite();

    Table consts{"constants", {"case", "value", "reference", "abs_error"}, {}};
    auto add = [&](const std::string& name, double value, double reference) {
        consts.rows.push_back({name, fmt(value), fmt(reference), fmt(std::abs(value - reference))});
    };
    add("guarantee(2,2,z=0)", sm::guarantee_factor({t2, t2, 0.0, atten, false, false}), 0.38278);
    add("chernoff(2,48,z=0)", sm::chernoff_factor(t2, t48, 0.0), 0.38283);
    add("chernoff(48,48,z=0)", sm::chernoff_factor(t48, t48, 0.0), 0.393);
    add("guarantee(inf,inf,z=0)", sm::guarantee_factor({tinf, tinf, 0.0, atten, false, false}),
        (1.0 - std::exp(-2.0)) / 2.0);
    add("balanced_star(z=0.5)",
        sm::guarantee_factor(
            {sm::Patience::finite(1), sm::Patience::finite(1), 0.5, sm::AttenuationSpec::balanced(),
             false, true}),
        1.0 - std::exp(-1.0));
    r.tables.push_back(std::move(consts));

    if (o.full_search) {
        const sm::WorstCase wc = sm::worst_case_search(atten, o.t_max, z_steps);
        r.scalars.emplace_back("worst_value", fmt(wc.value));
        r.scalars.emplace_back("worst_t_u", wc.t_u.to_string());
        r.scalars.emplace_back("worst_t_v", wc.t_v.to_string());
        r.scalars.emplace_back("worst_z", fmt(wc.z));
    }
    emit(r, o.format);
    return 0;
}

int cmd_oracle(const Options& o) {
    const sm::StochasticGraph g = resolve_instance(o);
    const double opt = sm::optimal_adaptive_value(g);

    Report r;
    r.config.emplace_back("command", "oracle");
    push_source_config(r, o);
    r.config.emplace_back("compare", fmt_bool(o.compare));
    if (o.compare) {
        r.config.emplace_back("attenuation", sm::make_attenuation(o.attenuation, o.alpha).to_string());
        r.config.emplace_back("reps", std::to_string(o.reps));
        r.config.emplace_back("seed", std::to_string(o.seed));
    }
    r.config.emplace_back("format", o.format);
    r.scalars.emplace_back("opt", fmt(opt));

    if (o.compare) {
        require_seed(o);
        const sm::AttenuationSpec atten = sm::make_attenuation(o.attenuation, o.alpha);
        const sm::LpSolution lp = sm::solve_lp(g);
        const sm::SimResult res = sm::monte_carlo(g, lp.y, atten, o.reps, o.seed, o.jobs);
        const sm::RatioResult rr = sm::approximation_ratio(g, res.mean_weight, res.weight_ci);
        r.scalars.emplace_back("sim_mean_weight", fmt(res.mean_weight));
        r.scalars.emplace_back("sim_weight_ci", fmt(res.weight_ci));
        r.scalars.emplace_back("ratio", rr.zero_opt ? "-" : fmt(rr.ratio));
        r.scalars.emplace_back("ratio_ci", rr.zero_opt ? "-" : fmt(rr.ci));
    }
    emit(r, o.format);
    return 0;
}

int cmd_check_attenuation(const Options& o) {
    if (o.family.empty()) throw sm::ValidationError("check-attenuation: --family is required");
    const sm::AttenuationSpec spec = sm::make_attenuation(o.family, o.alpha);
    const int z_steps = o.z_steps > 0 ? o.z_steps : 1001;
    const std::vector<double> x_grid = sm::default_x_grid();
    const sm::EffectivenessReport rep = sm::check_effective(spec, z_steps, x_grid);

    Report r;
    r.config.emplace_back("command", "check-attenuation");
    r.config.emplace_back("family", spec.to_string());
    r.config.emplace_back("z_steps", std::to_string(z_steps));
    r.config.emplace_back("format", o.format);
    r.scalars.emplace_back("condition2_ok", fmt_bool(rep.condition2_ok));
    r.scalars.emplace_back("condition3_ok", fmt_bool(rep.condition3_ok));
    r.scalars.emplace_back("worst_second_difference", fmt(rep.worst_second_difference));
    r.scalars.emplace_back("worst_x", fmt(rep.worst_x));
    r.scalars.emplace_back("worst_z", fmt(rep.worst_z));
    r.scalars.emplace_back("effective", fmt_bool(rep.effective()));
    emit(r, o.format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic matching: LP, probing simulation, rounding, and bound checks"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub, bool with_instance) {
        if (with_instance) {
            sub->add_option("--instance", o.instance, "instance file");
            sub->add_option("--gen", o.gen, "generator spec, e.g. er:n=8,q=0.4");
        }
        sub->add_option("--seed", o.seed, "random seed")->each([&o](const std::string&) {
            o.seed_given = true;
        });
        sub->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"table", "csv", "json-like"}));
    };

    CLI::App* gen = app.add_subcommand("gen", "generate an instance file");
    gen->add_option("--gen", o.gen, "generator spec")->required();
    gen->add_option("--seed", o.seed, "random seed")->each([&o](const std::string&) {
        o.seed_given = true;
    });
    gen->add_option("--out", o.out, "write to this path instead of stdout");

    CLI::App* solve = app.add_subcommand("solve", "solve the fractional relaxation");
    add_common(solve, true);
    solve->add_option("--tol", o.tol, "feasibility tolerance");

    CLI::App* simulate = app.add_subcommand("simulate", "random-order probing simulation");
    add_common(simulate, true);
    simulate->add_option("--attenuation", o.attenuation, "exp|lin|balanced|none");
    simulate->add_option("--alpha", o.alpha, "attenuation strength");
    simulate->add_option("--reps", o.reps, "replications")->check(CLI::PositiveNumber);
    simulate->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    simulate->add_flag("--exact", o.exact, "exact probe probabilities (<= 8 edges)");

    CLI::App* round = app.add_subcommand("round", "dependent rounding of a fractional vector");
    add_common(round, true);
    round->add_option("--y-from", o.y_from, "'solve' or a file with y values");

    CLI::App* unit = app.add_subcommand("unit-patience", "unit-patience pipeline Monte Carlo");
    add_common(unit, true);
    unit->add_option("--reps", o.reps, "replications")->check(CLI::PositiveNumber);

    CLI::App* bounds = app.add_subcommand("verify-bounds", "reproduce the guarantee constants");
    bounds->add_option("--attenuation", o.attenuation, "exp|lin|balanced|none");
    bounds->add_option("--alpha", o.alpha, "attenuation strength");
    bounds->add_flag("--full-search", o.full_search, "grid-minimize the guarantee factor");
    bounds->add_option("--z-steps", o.z_steps, "z grid size")->check(CLI::PositiveNumber);
    bounds->add_option("--t-max", o.t_max, "largest finite patience in the search")
        ->check(CLI::PositiveNumber);
    bounds->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json-like"}));

    CLI::App* oracle = app.add_subcommand("oracle", "optimal adaptive value by brute force");
    add_common(oracle, true);
    oracle->add_flag("--compare", o.compare, "also simulate and report the ratio");
    oracle->add_option("--attenuation", o.attenuation, "exp|lin|balanced|none");
    oracle->add_option("--alpha", o.alpha, "attenuation strength");
    oracle->add_option("--reps", o.reps, "replications")->check(CLI::PositiveNumber);
    oracle->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

    CLI::App* checka = app.add_subcommand("check-attenuation", "effectiveness conditions");
    checka->add_option("--family", o.family, "exp|lin|balanced|none")->required();
    checka->add_option("--alpha", o.alpha, "attenuation strength");
    checka->add_option("--z-steps", o.z_steps, "z grid size")->check(CLI::PositiveNumber);
    checka->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json-like"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(o);
        if (solve->parsed()) return cmd_solve(o);
        if (simulate->parsed()) return cmd_simulate(o);
        if (round->parsed()) return cmd_round(o);
        if (unit->parsed()) return cmd_unit_patience(o);
        if (bounds->parsed()) return cmd_verify_bounds(o);
        if (oracle->parsed()) return cmd_oracle(o);
        if (checka->parsed()) return cmd_check_attenuation(o);
        return 1;
    } catch (const sm::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const sm::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const sm::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
