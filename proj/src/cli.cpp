#include "vircomp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "vircomp/equilibria.hpp"
#include "vircomp/errors.hpp"
#include "vircomp/io.hpp"
#include "vircomp/ocp.hpp"
#include "vircomp/parallel.hpp"
#include "vircomp/portrait.hpp"
#include "vircomp/scenario.hpp"
#include "vircomp/verify.hpp"

namespace vircomp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string scenario;
    std::string out_dir{"."};
    std::vector<std::string> sets;
    std::string method;
    std::optional<double> dt;
    std::optional<int> criterion;
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("failed while writing " + path.string());
}

fs::path prepare_out(const Options& o) {
    const fs::path dir = o.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

/// `--method all` keeps the scenario's own method and is expanded by simulate.
Scenario load(const Options& o) {
    std::vector<std::string> overrides = o.sets;
    if (!o.method.empty() && o.method != "all") overrides.push_back("solver.method=" + o.method);
    if (o.dt) overrides.push_back("grid.dt=" + format_double(*o.dt));
    return load_scenario(o.scenario, overrides);
}

std::string fmt_state(State s) {
    return "(" + format_double(s.v_a) + ", " + format_double(s.v_b) + ")";
}

int simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const Scenario sc = load(o);
    std::vector<StepMethod> methods{sc.method};
    if (o.method == "all") methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
    const fs::path dir = prepare_out(o);

    const std::vector<double> schedule(sc.grid.intervals(), sc.simulation_control());
    int status = kOk;
    for (StepMethod m : methods) {
        const auto bundle = integrate_bundle(m, sc.dynamics(), schedule, sc.grid, sc.initial_conditions, sc.cost);
        for (std::size_t i = 0; i < bundle.size(); ++i) {
            const BundleMember& b = bundle[i];
            if (!b.ok()) {
                err << "simulate: initial condition " << i << " " << fmt_state(b.init) << " with " << to_string(m)
                    << " failed: " << b.error << "\n";
                status = kSolverFailure;
                continue;
            }
            const std::string name = "simulate_ic" + std::to_string(i) + "_" + std::string(to_string(m)) + ".csv";
            write_file(dir / name, write_trajectory_csv(*b.trajectory, sc.cost));
            out << name << "  final " << fmt_state(b.trajectory->final_state().state) << "\n";
            if (b.trajectory->clamped_components > 0) {
                err << "simulate: " << name << ": " << b.trajectory->clamped_components
                    << " negative round-off components clamped to 0\n";
            }
        }
    }
    return status;
}

int equilibria(const Options& o, std::ostream& out, std::ostream&) {
    const Scenario sc = load(o);
    const double u = sc.simulation_control();
    json doc = {{"scenario", sc.name}, {"mode", to_string(sc.mode)}, {"u", u}};
    const auto reports = sc.efficacy ? equilibria_constant_control(sc.phenotype, *sc.efficacy, u)
                                     : equilibria_free(sc.phenotype);
    doc["equilibria"] = to_json(reports);
    doc["degenerate_control"] = nullptr;
    if (sc.efficacy) {
        if (const auto ud = find_degenerate_control(sc.phenotype, *sc.efficacy)) {
            doc["degenerate_control"] = {
                {"u", *ud}, {"equilibria", to_json(equilibria_constant_control(sc.phenotype, *sc.efficacy, *ud))}};
        }
    }
    write_file(prepare_out(o) / "equilibria.json", doc.dump(2) + "\n");

    for (const auto& r : reports) {
        out << r.label << " " << fmt_state(r.point) << " " << to_string(r.verdict)
            << (r.in_biological_domain ? "" : " (outside biological domain)") << "\n";
    }
    return kOk;
}

int optimize(const Options& o, std::ostream& out, std::ostream& err) {
    const Scenario sc = load(o);
    if (sc.mode != Mode::Ocp && sc.mode != Mode::OcpWsc) {
        throw ValidationError("optimize needs a scenario with mode ocp or ocp-wsc, got " +
                              std::string(to_string(sc.mode)));
    }
    const fs::path dir = prepare_out(o);
    int status = kOk;
    for (std::size_t i = 0; i < sc.initial_conditions.size(); ++i) {
        const State init = sc.initial_conditions[i];
        const SolveReport r =
            sc.mode == Mode::Ocp
                ? solve_fbsm(sc.dynamics(), sc.cost, sc.grid, init, sc.u_max, sc.fbsm)
                : solve_penalty(sc.dynamics(), sc.cost, sc.grid, init, sc.u_max, *sc.xi, sc.fbsm, sc.penalty);
        json j = to_json(r);
        j["scenario"] = sc.name;
        j["initial_condition"] = {init.v_a, init.v_b};
        const std::string stem = "optimize_ic" + std::to_string(i);
        write_file(dir / (stem + ".json"), j.dump(2) + "\n");
        write_file(dir / (stem + ".csv"), write_trajectory_csv(r.trajectory, r.weights));
        out << stem << "  objective " << format_double(r.objective) << "  iterations " << r.iterations
            << "  min(V_A - V_B) " << format_double(r.min_dominance) << "\n";
        if (!r.ok()) {
            err << "optimize: " << stem << ": solver did not meet its targets"
                << (r.max_iterations_exceeded ? " [max iterations exceeded]" : "")
                << (r.non_monotone_stall ? " [stalled]" : "") << (r.constraint_not_met ? " [constraint not met]" : "")
                << "\n";
            status = kSolverFailure;
        }
    }
    return status;
}

int portrait(const Options& o, std::ostream& out, std::ostream& err) {
    const Scenario sc = load(o);
    const PortraitData data =
        phase_portrait(sc.phenotype, sc.efficacy, sc.simulation_control(), sc.portrait, sc.method);
    const fs::path dir = prepare_out(o);
    write_file(dir / "portrait.csv", portrait_csv(data));
    write_file(dir / "portrait.svg", portrait_svg(data));
    const auto failed = std::count_if(data.bundle.begin(), data.bundle.end(), [](const SeedPath& p) { return !p.ok; });
    for (const SeedPath& p : data.bundle) {
        if (!p.ok) err << "portrait: seed " << fmt_state(p.seed) << " failed: " << p.error << "\n";
    }
    out << "portrait.csv portrait.svg  " << data.arrows.size() << " arrows, " << data.bundle.size() << " seeds ("
        << failed << " failed), " << data.equilibria.size() << " equilibria\n";
    return kOk;
}

int verify(const Options& o, std::ostream& out, std::ostream&) {
    const fs::path fixtures = o.scenario.empty() ? default_fixture_dir() : fs::path(o.scenario);
    if (!fs::is_directory(fixtures)) throw ValidationError("fixture directory not found: " + fixtures.string());
    if (o.criterion && (*o.criterion < 1 || *o.criterion > kCriterionCount)) {
        throw ValidationError("--criterion must be between 1 and " + std::to_string(kCriterionCount));
    }
    const auto results = run_acceptance(fixtures, o.criterion);
    out << format_results(results);
    const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    return all ? kOk : kSolverFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-strain viral competition: simulation, equilibria, optimal treatment, phase portraits"};
    app.name("vircomp");
    app.require_subcommand(1, 1);

    Options o;
    auto add_common = [&](CLI::App* sub, bool needs_scenario) {
        auto* pos = sub->add_option("scenario", o.scenario, needs_scenario ? "scenario file" : "fixture directory");
        if (needs_scenario) pos->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
        sub->add_option("--set", o.sets, "override a scenario key (key=value), repeatable")->take_all();
        sub->add_option("--method", o.method, "integrator")
            ->check(CLI::IsMember({"euler", "explicit-euler", "implicit-euler", "trapezoid", "trapezoidal", "rk4", "all"}));
        sub->add_option("--dt", o.dt, "step size override")->check(CLI::PositiveNumber);
    };

    std::vector<std::pair<CLI::App*, int (*)(const Options&, std::ostream&, std::ostream&)>> verbs = {
        {app.add_subcommand("simulate", "integrate every initial condition"), simulate},
        {app.add_subcommand("equilibria", "equilibria and their stability"), equilibria},
        {app.add_subcommand("optimize", "optimal treatment schedule per initial condition"), optimize},
        {app.add_subcommand("portrait", "phase-portrait CSV and SVG"), portrait},
    };
    for (auto& [sub, fn] : verbs) add_common(sub, true);
    auto* ver = app.add_subcommand("verify", "run the acceptance criteria against the shipped fixtures");
    add_common(ver, false);
    ver->add_option("--criterion", o.criterion, "run a single criterion");
    verbs.emplace_back(ver, verify);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    if (o.method == "all") {
        const bool on_simulate = verbs.front().first->parsed();
        if (!on_simulate) {
            err << "error: --method all is only meaningful for simulate\n";
            return kInvalid;
        }
    }

    try {
        for (auto& [sub, fn] : verbs) {
            if (sub->parsed()) return fn(o, out, err);
        }
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kInvalid;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}

}  // namespace vircomp::cli
