#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "doctest.h"
#include "pkmech/cli.hpp"

using namespace pkmech::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pkmech_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_problem(const fs::path& dir, const Json& doc) {
    const fs::path p = dir / "problem.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pkmech");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = run(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json lagrangian(const std::string& f) {
    return Json{{"n", 1}, {"kind", "lagrangian"}, {"function", f}, {"seed", 1}};
}

}  // namespace

TEST_CASE("problem file validation") {
    CHECK_THROWS_AS(parse_problem(Json::array()), ProblemError);
    CHECK_THROWS_AS(parse_problem(Json{{"kind", "lagrangian"}, {"function", "x1"}}), ProblemError);
    CHECK_THROWS_AS(parse_problem(Json{{"n", 0}, {"kind", "metric"}}), ProblemError);
    CHECK_THROWS_AS(parse_problem(Json{{"n", 1}, {"kind", "other"}}), ProblemError);
    CHECK_THROWS_AS(parse_problem(Json{{"n", 1}, {"kind", "lagrangian"}}), ProblemError);
    Json bad_h = lagrangian("x1*y1");
    bad_h["integrator"] = Json{{"h", 0.0}};
    CHECK_THROWS_AS(parse_problem(bad_h), ProblemError);
    Json bad_ic = lagrangian("x1*y1");
    bad_ic["initial_conditions"] = Json::array({1.0});
    CHECK_THROWS_AS(parse_problem(bad_ic), ProblemError);
    Json bad_matrix{{"n", 1}, {"kind", "metric"}, {"metric", {{"type", "matrix"}, {"matrix", {{"1"}}}}}};
    CHECK_THROWS_AS(parse_problem(bad_matrix), ProblemError);

    Json ok = lagrangian("x1*y1");
    ok["initial_conditions"] = Json::array({Json::array({1, 2}), Json::array({3, 4})});
    ok["integrator"] = Json{{"scheme", "rk4"}, {"t0", 0}, {"t1", 2}, {"h", 0.5}};
    const ProblemFile p = parse_problem(ok);
    CHECK(p.n == 1);
    CHECK(p.initial_conditions.size() == 2);
    CHECK(p.initial_conditions[1][1] == 4.0);
    CHECK(p.integrator.t1 == 2.0);
    CHECK(p.seed == 1);
    CHECK(p.metric.type == MetricSpec::Type::Model);
}

TEST_CASE("derive prints the Euler-Lagrange system") {
    const fs::path dir = scratch_dir("derive");
    const Outcome o = run_cli({"derive", "--problem", write_problem(dir, lagrangian("x1*y1")).string()});
    CHECK(o.code == kExitOk);
    CHECK(o.out.find("dx1/dt = -x1\n") != std::string::npos);
    CHECK(o.out.find("dy1/dt = y1\n") != std::string::npos);
    CHECK(o.out.find("E_L = -3*x1*y1\n") != std::string::npos);
    CHECK(o.out.find("Phi_L = 2 · dx1^dy1\n") != std::string::npos);

    const Outcome j = run_cli({"derive", "--problem", (dir / "problem.json").string(), "--format", "json",
                               "--out", (dir / "out").string()});
    CHECK(j.code == kExitOk);
    const Json report = Json::parse(j.out);
    CHECK(report["odes"]["dx1/dt"] == "-x1");
    CHECK(report["residuals"]["dx1"] == "0");
    CHECK(report["energy"] == "-3*x1*y1");
    CHECK(report["form_is_zero"] == false);
    CHECK(slurp(dir / "out" / "derive.json") == j.out);
}

TEST_CASE("derive on the Hamiltonian oscillator") {
    const fs::path dir = scratch_dir("derive_h");
    Json doc{{"n", 1}, {"kind", "hamiltonian"}, {"function", "0.5*(x1^2+y1^2)"}};
    const Outcome o = run_cli({"derive", "--problem", write_problem(dir, doc).string()});
    CHECK(o.code == kExitOk);
    CHECK(o.out.find("dx1/dt = y1\n") != std::string::npos);
    CHECK(o.out.find("dy1/dt = -x1\n") != std::string::npos);
}

TEST_CASE("derive flags a vanishing Lagrangian form and rejects degenerate Lagrangians") {
    const fs::path dir = scratch_dir("degenerate");
    const Outcome flat = run_cli({"derive", "--problem", write_problem(dir, lagrangian("0.5*(x1^2 + y1^2)")).string(),
                                  "--format", "json"});
    CHECK(flat.code == kExitOk);
    CHECK(Json::parse(flat.out)["form_is_zero"] == true);

    const Outcome lin = run_cli({"derive", "--problem", write_problem(dir, lagrangian("x1")).string()});
    CHECK(lin.code == kExitDegenerate);
    CHECK(lin.err.find("L = x1") != std::string::npos);
    CHECK(lin.err.find("degenerate") != std::string::npos);
}

TEST_CASE("parse errors exit with code 2") {
    const fs::path dir = scratch_dir("parse");
    const Outcome bad = run_cli({"derive", "--problem", write_problem(dir, lagrangian("x1*z9")).string()});
    CHECK(bad.code == kExitParse);
    CHECK(bad.err.find("x1*z9") != std::string::npos);
    CHECK(run_cli({"derive", "--problem", (dir / "missing.json").string()}).code == kExitParse);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(run_cli({"derive", "--problem", (dir / "broken.json").string()}).code == kExitParse);
    CHECK(run_cli({"frobnicate"}).code == kExitParse);
    CHECK(run_cli({"derive"}).code == kExitParse);
    CHECK(run_cli({"derive", "--problem", (dir / "problem.json").string(), "--format", "yaml"}).code == kExitParse);
}

TEST_CASE("check reports identities") {
    const fs::path dir = scratch_dir("check");
    const Outcome model =
        run_cli({"check", "--problem", write_problem(dir, Json{{"n", 2}, {"kind", "metric"}}).string(), "--format", "json"});
    CHECK(model.code == kExitOk);
    const Json r = Json::parse(model.out);
    CHECK(r["pass"] == true);
    CHECK(r["checks"].back()["name"] == "space_form");
    CHECK(r["checks"].back()["c"] == 0.0);

    Json flat{{"n", 1}, {"kind", "metric"}, {"metric", {{"type", "potential"}, {"potential", "x1*y1"}}}};
    CHECK(run_cli({"check", "--problem", write_problem(dir, flat).string()}).code == kExitOk);

    Json identity{{"n", 1}, {"kind", "metric"}, {"metric", {{"type", "matrix"}, {"matrix", {{1, 0}, {0, 1}}}}}};
    const Outcome id = run_cli({"check", "--problem", write_problem(dir, identity).string()});
    CHECK(id.code == kExitIdentity);
    CHECK(id.out.find("FAIL compatibility") != std::string::npos);
    CHECK(id.out.find("first failing identity: compatibility") != std::string::npos);

    Json curved{{"n", 1}, {"kind", "metric"}, {"metric", {{"type", "potential"}, {"potential", "x1*y1 + (x1*y1)^2"}}}};
    const Outcome cv = run_cli({"check", "--problem", write_problem(dir, curved).string(), "--tol", "1e-6"});
    CHECK(cv.code == kExitIdentity);
    CHECK(cv.out.find("first failing identity: space_form") != std::string::npos);
}

TEST_CASE("integrate writes trajectories and drift reports") {
    const fs::path dir = scratch_dir("integrate");
    Json h{{"n", 1},
           {"kind", "hamiltonian"},
           {"function", "x1*y1"},
           {"initial_conditions", {1, 1}},
           {"integrator", {{"scheme", "rk4"}, {"t0", 0}, {"t1", 5}, {"h", 1e-3}}}};
    const Outcome o = run_cli({"integrate", "--problem", write_problem(dir, h).string(), "--out", (dir / "h").string(),
                               "--format", "json"});
    REQUIRE(o.code == kExitOk);
    const Json r = Json::parse(o.out);
    const Json& run0 = r["runs"][0];
    CHECK(run0["final"][0].get<double>() == doctest::Approx(std::exp(5.0)).epsilon(1e-6));
    CHECK(run0["final"][1].get<double>() == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
    CHECK(run0["conservation"]["max_relative_drift"].get<double>() < 1e-8);
    const std::string csv = slurp(dir / "h" / "trajectory.csv");
    CHECK(csv.rfind("t,x1,y1\n0,1,1\n", 0) == 0);

    Json l = lagrangian("x1*y1");
    l["initial_conditions"] = Json::array({1, 1});
    l["integrator"] = Json{{"t0", 0}, {"t1", 5}, {"h", 1e-3}};
    const Outcome lo = run_cli({"integrate", "--problem", write_problem(dir, l).string(), "--out",
                                (dir / "l").string(), "--format", "json"});
    REQUIRE(lo.code == kExitOk);
    const Json lr = Json::parse(lo.out);
    CHECK(lr["energy_conserved"] == true);
    CHECK(lr["runs"][0]["final"][0].get<double>() == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
    CHECK(lr["runs"][0]["final"][1].get<double>() == doctest::Approx(std::exp(5.0)).epsilon(1e-6));
    CHECK(lr["runs"][0]["conservation"]["max_relative_drift"].get<double>() < 1e-8);
    CHECK(lr["runs"][0]["exponential_law"]["x_family"][0].get<double>() < 1e-5);

    h["initial_conditions"] = Json::array({0, 0});
    const Outcome z = run_cli({"integrate", "--problem", write_problem(dir, h).string(), "--out",
                               (dir / "z").string(), "--format", "json"});
    REQUIRE(z.code == kExitOk);
    CHECK(Json::parse(z.out)["runs"][0]["final"] == Json::array({0.0, 0.0}));
}

TEST_CASE("integrate exit codes") {
    const fs::path dir = scratch_dir("integrate_fail");
    Json blow{{"n", 1},
              {"kind", "hamiltonian"},
              {"function", "x1^2*y1"},
              {"initial_conditions", {1, 1}},
              {"integrator", {{"t0", 0}, {"t1", 10}, {"h", 0.01}}}};
    const Outcome o = run_cli({"integrate", "--problem", write_problem(dir, blow).string(), "--out",
                               (dir / "o").string()});
    CHECK(o.code == kExitNumeric);
    CHECK(o.err.find("at step") != std::string::npos);

    Json no_ic{{"n", 1}, {"kind", "hamiltonian"}, {"function", "x1*y1"}};
    CHECK(run_cli({"integrate", "--problem", write_problem(dir, no_ic).string()}).code == kExitParse);
    Json se = lagrangian("x1*y1");
    se["initial_conditions"] = Json::array({1, 1});
    se["integrator"] = Json{{"scheme", "symplectic_euler"}};
    CHECK(run_cli({"integrate", "--problem", write_problem(dir, se).string()}).code == kExitParse);
}

TEST_CASE("reports are reproducible") {
    const fs::path dir = scratch_dir("repro");
    Json l = lagrangian("x1*y1 + 0.1*x1^2*y1");
    l["initial_conditions"] = Json::array({Json::array({0.2, 0.1}), Json::array({-0.1, 0.3})});
    l["integrator"] = Json{{"t0", 0}, {"t1", 1}, {"h", 1e-2}};
    const fs::path p = write_problem(dir, l);
    const Outcome a = run_cli({"integrate", "--problem", p.string(), "--out", (dir / "a").string(), "--format", "json"});
    const Outcome b = run_cli({"integrate", "--problem", p.string(), "--out", (dir / "b").string(), "--format", "json"});
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(slurp(dir / "a" / "trajectory_2.csv") == slurp(dir / "b" / "trajectory_2.csv"));
    const Outcome c1 = run_cli({"check", "--problem", p.string(), "--seed", "9", "--format", "json"});
    const Outcome c2 = run_cli({"check", "--problem", p.string(), "--seed", "9", "--format", "json"});
    CHECK(c1.out == c2.out);
    CHECK(Json::parse(c1.out)["seed"] == 9);
}

TEST_CASE("atomic writes leave no temporary files") {
    const fs::path dir = scratch_dir("atomic");
    write_atomic(dir / "sub" / "a.txt", "one");
    write_atomic(dir / "sub" / "a.txt", "two");
    CHECK(slurp(dir / "sub" / "a.txt") == "two");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++entries;
    CHECK(entries == 1);
}

TEST_CASE("number formatting is shortest round-trip") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(-3.0) == "-3");
    CHECK(format_real(1e-9) == "1e-09");
}
