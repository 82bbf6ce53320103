#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pkmech/cli.hpp"
#include "pkmech/curvature.hpp"
#include "pkmech/hamilton.hpp"
#include "pkmech/integrate.hpp"
#include "pkmech/lagrange.hpp"
#include "pkmech/sampling.hpp"

namespace pkmech::cli {

namespace {

std::string slot_name(const Chart& chart, std::size_t slot) { return chart.coordinate(slot).name(); }

SampleOptions sample_options(const ProblemFile& p, const Chart& chart) {
    SampleOptions o;
    o.trials = 100;
    o.seed = p.seed;
    o.n = chart.n();
    return o;
}

bool form_vanishes(const DifferentialForm& form, const SampleOptions& opts) {
    for (const auto& [idx, coef] : form.terms()) {
        if (!equal_on_samples(coef, Expr(0.0), opts)) return false;
    }
    return true;
}

// Coefficients of a 1-form keyed "dx1", .., "dyn".
Json one_form_json(const DifferentialForm& form) {
    const Chart& chart = form.chart();
    Json out = Json::object();
    for (std::size_t a = 0; a < chart.dim(); ++a) {
        out["d" + slot_name(chart, a)] = to_string(simplify(form.coefficient({static_cast<int>(a)})));
    }
    return out;
}

Json state_json(std::span<const double> s) {
    Json out = Json::array();
    for (double v : s) out.push_back(v);
    return out;
}

std::string state_text(const Chart& chart, std::span<const double> s) {
    std::string out;
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (a) out += ", ";
        out += slot_name(chart, a) + " = " + format_real(s[a]);
    }
    return out;
}

Expr parse_function(const ProblemFile& p, const Chart& chart) {
    if (p.kind == "metric") throw ProblemError("this command needs kind lagrangian or hamiltonian");
    return parse(p.function, chart);
}

Metric build_metric(const ProblemFile& p, const Chart& chart) {
    switch (p.metric.type) {
        case MetricSpec::Type::Model: return model_metric(chart);
        case MetricSpec::Type::Potential: return metric_from_potential(parse(p.metric.potential, chart), chart);
        case MetricSpec::Type::Matrix: {
            ExprMatrix m(chart.dim(), chart.dim());
            for (std::size_t a = 0; a < chart.dim(); ++a) {
                for (std::size_t b = 0; b < chart.dim(); ++b) m(a, b) = parse(p.metric.matrix[a][b], chart);
            }
            return Metric::from_matrix(chart, m);
        }
    }
    return model_metric(chart);
}

std::string metric_label(const MetricSpec& m) {
    switch (m.type) {
        case MetricSpec::Type::Model: return "model";
        case MetricSpec::Type::Potential: return "potential";
        case MetricSpec::Type::Matrix: return "matrix";
    }
    return "model";
}

Json header(const std::string& command, const ProblemFile& p) {
    Json j;
    j["command"] = command;
    j["kind"] = p.kind;
    j["n"] = p.n;
    if (p.kind != "metric") j["function"] = p.function;
    j["seed"] = p.seed;
    return j;
}

// ---------------------------------------------------------------------------
// derive

Report derive_lagrangian(const ProblemFile& p) {
    const Chart chart(p.n);
    const LagrangianSystem L(chart, parse_function(p, chart));
    const SampleOptions samples = sample_options(p, chart);
    SolveOptions solve_opts;
    solve_opts.seed = p.seed;
    const EulerLagrangeSystem el = euler_lagrange_system(L, solve_opts);
    const DifferentialForm phi = kahler_form(L).simplified();
    const bool phi_zero = form_vanishes(phi, samples);

    Report r;
    r.json = header("derive", p);
    std::ostringstream text;
    text << "L = " << to_string(simplify(L.lagrangian())) << "\n";

    Json odes = Json::object();
    if (el.odes.is_symbolic()) {
        for (std::size_t a = 0; a < chart.dim(); ++a) {
            const std::string lhs = "d" + slot_name(chart, a) + "/dt";
            const std::string rhs = to_string(el.odes.rhs()[a]);
            odes[lhs] = rhs;
            text << lhs << " = " << rhs << "\n";
        }
    } else {
        odes["implicit"] = true;
        Json matrix = Json::array();
        for (std::size_t a = 0; a < chart.dim(); ++a) {
            Json row = Json::array();
            for (std::size_t b = 0; b < chart.dim(); ++b) row.push_back(to_string(el.odes.lhs()(a, b)));
            matrix.push_back(row);
        }
        Json rhs = Json::array();
        for (const Expr& e : el.odes.rhs()) rhs.push_back(to_string(e));
        odes["matrix"] = matrix;
        odes["rhs"] = rhs;
        text << "d(x, y)/dt solves Hess(L) v = (dL/dx, -dL/dy) pointwise (2n = " << chart.dim() << ")\n";
    }
    r.json["odes"] = odes;

    if (!el.residuals.empty()) {
        Json residuals = Json::object();
        bool vanish = true;
        for (std::size_t a = 0; a < el.residuals.size(); ++a) {
            residuals["d" + slot_name(chart, a)] = to_string(simplify(el.residuals[a]));
            vanish = vanish && equal_on_samples(el.residuals[a], Expr(0.0), samples);
        }
        r.json["residuals"] = residuals;
        r.json["residuals_vanish"] = vanish;
        text << "residuals " << (vanish ? "vanish" : "DO NOT vanish") << "\n";
    } else {
        r.json["residuals"] = nullptr;
    }

    r.json["form"] = phi.str();
    r.json["form_is_zero"] = phi_zero;
    text << "Phi_L = " << phi.str() << "\n";
    if (phi_zero) text << "warning: Phi_L = 0, the Lagrangian 2-form is degenerate\n";

    if (el.semispray.is_symbolic()) {
        const Expr E = energy(L, el.semispray);
        r.json["energy"] = to_string(E);
        r.json["semispray"] = el.semispray.field().str();
        text << "E_L = " << to_string(E) << "\n";
        text << "xi = " << el.semispray.field().str() << "\n";
    } else {
        r.json["energy"] = nullptr;
        r.json["semispray"] = nullptr;
    }
    const bool velocity = satisfies_velocity_condition(el.semispray, 50, p.seed);
    r.json["velocity_condition"] = velocity;
    text << "velocity condition X_i = y_i: " << (velocity ? "holds" : "does not hold") << "\n";
    r.text = text.str();
    return r;
}

Report derive_hamiltonian(const ProblemFile& p) {
    const Chart chart(p.n);
    const HamiltonianSystem H(chart, parse_function(p, chart));
    const SampleOptions samples = sample_options(p, chart);
    const VectorField Z = hamiltonian_vector_field(H).simplified();
    const VectorField closed = hamiltonian_vector_field_closed_form(H);
    bool matches = true;
    for (std::size_t a = 0; a < chart.dim(); ++a) matches = matches && equal_on_samples(Z[a], closed[a], samples);
    const DifferentialForm phi = canonical_form(chart);
    const DifferentialForm residual =
        (interior_product(Z, phi) - exterior_derivative(DifferentialForm::scalar(chart, H.hamiltonian())))
            .simplified();
    const ODESystem odes = hamilton_odes(H);

    Report r;
    r.json = header("derive", p);
    std::ostringstream text;
    const std::string hs = to_string(simplify(H.hamiltonian()));
    text << "H = " << hs << "\n";
    Json oj = Json::object();
    for (std::size_t a = 0; a < chart.dim(); ++a) {
        const std::string lhs = "d" + slot_name(chart, a) + "/dt";
        const std::string rhs = to_string(odes.rhs()[a]);
        oj[lhs] = rhs;
        text << lhs << " = " << rhs << "\n";
    }
    r.json["odes"] = oj;
    r.json["residuals"] = one_form_json(residual);
    const bool vanish = form_vanishes(residual, samples);
    r.json["residuals_vanish"] = vanish;
    r.json["energy"] = hs;
    r.json["form"] = phi.str();
    r.json["vector_field"] = Z.str();
    r.json["matches_closed_form"] = matches;
    text << "Phi = " << phi.str() << "\n";
    text << "Z_H = " << Z.str() << "\n";
    text << "i_Z Phi - dH " << (vanish ? "vanishes" : "DOES NOT vanish") << "\n";
    text << "closed form " << (matches ? "matches" : "DOES NOT match") << "\n";
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------------------
// integrate

std::string numbered(const std::string& name, std::size_t k, std::size_t count) {
    if (count == 1) return name;
    const auto dot = name.rfind('.');
    const std::string suffix = "_" + std::to_string(k + 1);
    if (dot == std::string::npos) return name + suffix;
    return name.substr(0, dot) + suffix + name.substr(dot);
}

Json conservation_json(const std::string& label, const Expr& q, const ConservationReport& c) {
    Json j;
    j["quantity"] = label;
    j["expression"] = to_string(q);
    j["first"] = c.first;
    j["last"] = c.last;
    j["min"] = c.min;
    j["max"] = c.max;
    j["max_relative_drift"] = c.max_relative_drift;
    return j;
}

Json families_json(const std::vector<double>& x, const std::vector<double>& y) {
    Json j;
    j["x_family"] = x;
    j["y_family"] = y;
    return j;
}

}  // namespace

Report cmd_derive(const ProblemFile& p) {
    if (p.kind == "lagrangian") return derive_lagrangian(p);
    if (p.kind == "hamiltonian") return derive_hamiltonian(p);
    throw ProblemError("derive needs kind lagrangian or hamiltonian");
}

Report cmd_check(const ProblemFile& p) {
    const Chart chart(p.n);
    const Metric g = build_metric(p, chart);
    const ProductStructure J = model_product_structure(chart);
    const double tol = p.tolerance;

    Report r;
    r.json = header("check", p);
    r.json["metric"] = metric_label(p.metric);
    r.json["tolerance"] = tol;
    Json checks = Json::array();
    std::ostringstream text;
    std::string first_failure;

    auto record = [&](const std::string& name, double violation, bool pass, Json extra = Json::object()) {
        Json c;
        c["name"] = name;
        c["violation"] = violation;
        for (auto it = extra.begin(); it != extra.end(); ++it) c[it.key()] = it.value();
        c["pass"] = pass;
        checks.push_back(c);
        text << (pass ? "PASS " : "FAIL ") << name << "  max violation " << format_real(violation) << "\n";
        if (!pass && first_failure.empty()) first_failure = name;
    };
    auto record_identity = [&](const std::string& name, const IdentityViolation& v) {
        Json extra;
        extra["basis"] = v.basis;
        extra["random"] = v.random;
        record(name, v.max(), v.max() < tol, extra);
    };

    const bool nondegenerate = g.is_nondegenerate(p.trials, p.seed);
    record("nondegenerate", nondegenerate ? 0.0 : 1.0, nondegenerate);
    const bool almost_product = is_almost_product(J, p.trials, p.seed);
    record("almost_product", almost_product ? 0.0 : 1.0, almost_product);
    const double compat = compatibility_violation(g, J, 100, p.seed);
    record("compatibility", compat, almost_product && compat < tol);

    if (nondegenerate) {
        const ChristoffelSymbols gamma = christoffel(g);
        const double nj = nabla_J(gamma, J, p.trials, p.seed);
        record("nabla_J", nj, nj < tol);
        const CurvatureTensor R = riemann(g, gamma);
        const SymmetryReport sym = symmetry_report(R, J, p.trials, p.seed);
        record_identity("antisymmetry_first", sym.antisymmetry_first);
        record_identity("antisymmetry_last", sym.antisymmetry_last);
        record_identity("bianchi", sym.bianchi);
        record_identity("j_identity", sym.j_identity);
        Json unsigned_form;
        unsigned_form["basis"] = sym.j_identity_unsigned.basis;
        unsigned_form["random"] = sym.j_identity_unsigned.random;
        r.json["j_identity_unsigned"] = unsigned_form;

        const SpaceFormFit fit = constant_c_test(R, r_zero(g, J), p.trials, p.seed);
        Json sf;
        sf["name"] = "space_form";
        sf["violation"] = fit.max_residual;
        if (fit.c) {
            sf["c"] = *fit.c;
        } else {
            sf["c"] = nullptr;
        }
        sf["pass"] = fit.c.has_value();
        checks.push_back(sf);
        if (fit.c) {
            text << "PASS space_form  c = " << format_real(*fit.c) << "  residual " << format_real(fit.max_residual)
                 << "\n";
        } else {
            text << "FAIL space_form  no constant c, residual " << format_real(fit.max_residual) << "\n";
            if (first_failure.empty()) first_failure = "space_form";
        }
    }
    r.json["checks"] = checks;
    r.json["pass"] = first_failure.empty();
    if (!first_failure.empty()) {
        r.json["first_failure"] = first_failure;
        text << "first failing identity: " << first_failure << "\n";
        r.exit_code = kExitIdentity;
    }
    r.text = text.str();
    return r;
}

Report cmd_integrate(const ProblemFile& p) {
    if (p.kind == "metric") throw ProblemError("integrate needs kind lagrangian or hamiltonian");
    if (p.initial_conditions.empty()) throw ProblemError("integrate needs initial_conditions");
    const Chart chart(p.n);
    const Expr f = parse_function(p, chart);
    Scheme scheme;
    try {
        scheme = parse_scheme(p.integrator.scheme);
    } catch (const std::invalid_argument& e) {
        throw ProblemError(e.what());
    }
    const IntegratorConfig& cfg = p.integrator;
    const std::size_t count = p.initial_conditions.size();

    Report r;
    r.json = header("integrate", p);
    r.json["scheme"] = scheme_name(scheme);
    r.json["t0"] = cfg.t0;
    r.json["t1"] = cfg.t1;
    r.json["h"] = cfg.h;
    r.json["steps"] = step_count(cfg.t0, cfg.t1, cfg.h);
    std::ostringstream text;
    Json runs = Json::array();

    if (p.kind == "lagrangian") {
        if (scheme != Scheme::RK4) throw ProblemError("Euler-Lagrange systems integrate with rk4 only");
        const LagrangianSystem L(chart, f);
        SolveOptions solve_opts;
        solve_opts.seed = p.seed;
        const EulerLagrangeSystem el = euler_lagrange_system(L, solve_opts);
        std::optional<Expr> E;
        bool conserved = false;
        if (el.semispray.is_symbolic()) {
            E = energy(L, el.semispray);
            const Expr rate = simplify(el.semispray.field().apply(*E));
            conserved = equal_on_samples(rate, Expr(0.0), sample_options(p, chart));
        }
        r.json["energy_conserved"] = conserved;
        const auto trajectories = integrate_batch(el.odes, p.initial_conditions, cfg.t0, cfg.t1, cfg.h);
        for (std::size_t k = 0; k < count; ++k) {
            const Trajectory& tr = trajectories[k];
            const std::string file = numbered(p.trajectory_output, k, count);
            r.files.emplace_back(file, tr.to_csv());
            Json run;
            run["initial"] = state_json(p.initial_conditions[k]);
            run["final"] = state_json(tr.back());
            run["trajectory"] = file;
            text << "run " << k + 1 << ": final " << state_text(chart, tr.back()) << "\n";
            if (conserved) {
                const auto c = conservation_report(tr, *E);
                run["conservation"] = conservation_json("E_L", *E, c);
                text << "  E_L drift " << format_real(c.max_relative_drift) << "\n";
            } else {
                run["conservation"] = nullptr;
            }
            const auto law = exponential_law_report(L, tr);
            run["exponential_law"] = families_json(law.x_family, law.y_family);
            text << "  exponential law max drift " << format_real(law.max()) << "\n";
            const auto prop = proposition1_report(L, tr);
            run["momentum_residuals"] = families_json(prop.x_family, prop.y_family);
            text << "  Euler-Lagrange residual max " << format_real(prop.max()) << "\n";
            runs.push_back(run);
        }
    } else {
        const HamiltonianSystem H(chart, f);
        std::vector<Trajectory> trajectories(count, Trajectory(cfg.t0, cfg.h, chart.dim()));
        if (scheme == Scheme::RK4) {
            trajectories = integrate_batch(hamilton_odes(H), p.initial_conditions, cfg.t0, cfg.t1, cfg.h);
        } else {
            for_each_index(count, Execution::Parallel, [&](std::size_t k) {
                trajectories[k] = integrate_symplectic_euler(H, p.initial_conditions[k], cfg.t0, cfg.t1, cfg.h);
            });
        }
        r.json["energy_conserved"] = true;
        for (std::size_t k = 0; k < count; ++k) {
            const Trajectory& tr = trajectories[k];
            const std::string file = numbered(p.trajectory_output, k, count);
            r.files.emplace_back(file, tr.to_csv());
            Json run;
            run["initial"] = state_json(p.initial_conditions[k]);
            run["final"] = state_json(tr.back());
            run["trajectory"] = file;
            const auto c = conservation_report(tr, H.hamiltonian());
            run["conservation"] = conservation_json("H", H.hamiltonian(), c);
            text << "run " << k + 1 << ": final " << state_text(chart, tr.back()) << "\n";
            text << "  H drift " << format_real(c.max_relative_drift) << "\n";
            runs.push_back(run);
        }
    }
    r.json["runs"] = runs;
    r.text = text.str();
    return r;
}

// ---------------------------------------------------------------------------
// entry point

int run(int argc, char** argv) {
    CLI::App app{"Para-Kähler mechanics: derive, check and integrate problem files"};
    app.require_subcommand(1);

    std::string problem_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::string format = "text";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--problem", problem_path, "Problem file (JSON)")->required();
        sub->add_option("--out", out_dir, "Directory for reports and trajectories");
        sub->add_option("--seed", seed, "RNG seed, overrides the problem file");
        sub->add_option("--tol", tol, "Identity tolerance, overrides the problem file")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    };
    CLI::App* derive = app.add_subcommand("derive", "Print the derived equations of motion");
    CLI::App* check = app.add_subcommand("check", "Verify the para-Kähler identities of a metric");
    CLI::App* integrate = app.add_subcommand("integrate", "Integrate the equations of motion");
    add_common(derive);
    add_common(check);
    add_common(integrate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    std::string context;
    try {
        ProblemFile p = load_problem(problem_path);
        if (chosen->count("--seed")) p.seed = seed;
        if (chosen->count("--tol")) p.tolerance = tol;
        context = p.kind == "metric" ? "metric" : (p.kind == "lagrangian" ? "L = " : "H = ") + p.function;

        Report r;
        if (command == "derive") {
            r = cmd_derive(p);
        } else if (command == "check") {
            r = cmd_check(p);
        } else {
            r = cmd_integrate(p);
        }
        const std::string json_text = r.json.dump(2) + "\n";
        if (format == "json") {
            std::cout << json_text;
        } else {
            std::cout << r.text;
        }
        if (!out_dir.empty()) {
            const std::filesystem::path dir(out_dir);
            write_atomic(dir / (p.report_output.empty() ? command + ".json" : p.report_output), json_text);
            for (const auto& [name, contents] : r.files) write_atomic(dir / name, contents);
        } else if (!r.files.empty()) {
            for (const auto& [name, contents] : r.files) write_atomic(name, contents);
        }
        return r.exit_code;
    } catch (const ProblemError& e) {
        std::cerr << "error: problem file: " << e.what() << "\n";
        return kExitParse;
    } catch (const ParseError& e) {
        std::cerr << "error: cannot parse " << context << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const DegenerateLagrangian& e) {
        std::cerr << "error: " << context << ": " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IntegrationError& e) {
        std::cerr << "error: integration of " << context << " failed: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << context << ": " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace pkmech::cli
