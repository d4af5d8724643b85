#include "expreg/config.hpp"
#include "expreg/error.hpp"
#include "expreg/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace expreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("expreg_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidSpec;
}

std::string message_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("field round trip is bit exact")
{
    const fs::path d = scratch("field");
    const Grid g = build_grid({2, 1.5, 6});
    GridFunction u(g);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = std::sin(0.37 * static_cast<double>(i)) / 3.0;
    write_field(d / "u", u, {{"method", "naive"}});
    for (const fs::path p : {d / "u", d / "u.bin", d / "u.json"}) {
        const GridFunction r = read_field(p);
        CHECK(r.grid.same_lattice(g));
        CHECK(r.values == u.values);
    }
    CHECK(fs::file_size(d / "u.bin") == u.values.size() * sizeof(double));
    const Json side = read_json(d / "u.json");
    CHECK(side["ordering"] == "row-major");
    CHECK(side["dtype"] == "float64-le");
    CHECK(side["method"] == "naive");
    CHECK(side["dims"] == std::vector<int>{10, 10});

    std::ofstream(d / "u.bin", std::ios::binary | std::ios::trunc) << "short";
    CHECK(code_of([&] { (void)read_field(d / "u"); }) == ErrorCode::IoError);
}

TEST_CASE("format_double round trips")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("report CSV column order")
{
    const fs::path d = scratch("csv");
    ErrorReport rep;
    rep.experiment_id = "E-total";
    rep.rows.push_back({"E-total", 2.0, 4.0 / 3.0, 0.1, "regularized", 1e-3, 12, 1e-11, 0.5, false});
    rep.rows.push_back({"E-total", 2.0, 4.0 / 3.0, std::nullopt, "naive", 2e-3, 10, 1e-11, 0.2, false});
    write_report_csv(d / "r.csv", rep);
    std::ifstream in(d / "r.csv");
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header == "experiment_id,R,L,T,method,error,iterations,residual,seconds");
    CHECK(row1.rfind("E-total,2,", 0) == 0);
    CHECK(row1.find(",regularized,0.001,12,") != std::string::npos);
    CHECK(row2.find(",,naive,") != std::string::npos);
}

TEST_CASE("fits JSON lists fits and excluded rows")
{
    ErrorReport rep;
    rep.experiment_id = "E-boundary";
    rep.rows.push_back({"E-boundary", 8.0, 5.0, 0.2, "regularized", 0.0, 1, 0.0, 0.0, true});
    rep.fits.push_back({"naive", FitModel::PowerLaw, "R", {-1.0, 0.5, 0.99}, 6});
    rep.headline = Headline{8.0, 1e-4, 1e-2, "closed_form"};
    const Json j = fits_to_json(rep);
    CHECK(j["fits"].size() == 1u);
    CHECK(j["fits"][0]["model"] == "powerlaw");
    CHECK(j["fits"][0]["slope"] == -1.0);
    CHECK(j["excluded_rows"].size() == 1u);
    CHECK(j["headline"]["ratio"].get<double>() == doctest::Approx(0.01));
}

TEST_CASE("solve config")
{
    const Json j = Json::parse(R"({"solve": {
        "grid": {"dim": 1, "side": 3, "nodes_per_unit": 8},
        "coefficient": {"type": "constant", "value": 2},
        "source": {"type": "gaussian", "sigma": 0.3},
        "method": {"type": "regularized"}}})");
    const SolveConfig c = parse_solve(j);
    CHECK(c.T_from_rule);
    CHECK(c.L == doctest::Approx(2.0));
    CHECK(std::get<method::Regularized>(c.request.method).T == doctest::Approx(choose_T(3.0, 2.0, 2.0, 2.0)));

    Json bad = j;
    bad["solve"]["method"]["L"] = 3.0;
    const std::string msg = message_of([&] { (void)parse_solve(bad); });
    CHECK(msg.find("solve.method.L") != std::string::npos);

    bad = j;
    bad["solve"]["grid"]["bogus"] = 1;
    CHECK(code_of([&] { (void)parse_solve(bad); }) == ErrorCode::ConfigError);
    bad = j;
    bad["solve"]["method"] = "exact_dirichlet";
    CHECK(code_of([&] { (void)parse_solve(bad); }) == ErrorCode::ConfigError);
    bad = j;
    bad["solve"]["coefficient"] = "marble";
    CHECK(message_of([&] { (void)parse_solve(bad); }).find("solve.coefficient") != std::string::npos);
}

TEST_CASE("plan config")
{
    const Json j = Json::parse(R"({"plan": {
        "id": "E-boundary", "dim": 2, "R_values": [2, 3, 4, 5], "nodes_per_unit": 10,
        "T_policy": {"fixed": 0.4}, "methods": ["naive", "regularized"],
        "reference": {"type": "regularized_at_rmax", "R": 6, "naive": "closed_form"},
        "coefficient": "radial_bump", "solution": "bump", "source": "from_solution",
        "solver": {"rel_tol": 1e-9}, "threads": 2}})");
    const ExperimentPlan p = parse_plan(j);
    CHECK(p.T_policy.kind == TPolicy::Kind::Fixed);
    CHECK(p.T_policy.fixed == 0.4);
    CHECK(p.reference.kind == ReferencePolicy::Kind::RegularizedAtRmax);
    CHECK(p.reference.R == 6.0);
    CHECK(p.reference.naive_closed_form);
    CHECK(p.methods.size() == 2u);
    CHECK(p.threads == 2);
    CHECK(p.solver.rel_tol == 1e-9);

    Json bad = j;
    bad["plan"]["id"] = "E-nope";
    CHECK(code_of([&] { (void)parse_plan(bad); }) == ErrorCode::ConfigError);
    bad = j;
    bad["plan"]["methods"] = {"naive", "magic"};
    CHECK(code_of([&] { (void)parse_plan(bad); }) == ErrorCode::ConfigError);
}

TEST_CASE("shipped experiment configs parse")
{
    for (const char* name : {"E-naive-rate", "E-boundary", "E-total", "E-modelling", "E-quasi"}) {
        const fs::path p = fs::path(EXPREG_CONFIG_DIR) / (std::string(name) + ".json");
        const ExperimentPlan plan = parse_plan(read_json(p), p.parent_path());
        CHECK(plan.id == name);
        CHECK_NOTHROW(validate(plan));
    }
}

TEST_CASE("overrides")
{
    Json j = Json::parse(R"({"plan": {"nodes_per_unit": 40, "T_policy": "per_row_rule", "solver": {"rel_tol": 1e-10}}})");
    apply_override(j, "nodes_per_unit=8");
    CHECK(j["plan"]["nodes_per_unit"] == 8);
    apply_override(j, "plan.T_policy.fixed=0.5");
    CHECK(j["plan"]["T_policy"]["fixed"] == 0.5);
    apply_override(j, "plan.coefficient=radial_bump");
    CHECK(j["plan"]["coefficient"] == "radial_bump");
    apply_override(j, "rel_tol=1e-12");
    CHECK(j["plan"]["solver"]["rel_tol"] == 1e-12);
    CHECK(code_of([&] { apply_override(j, "missing=1"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { apply_override(j, "no_equals"); }) == ErrorCode::ConfigError);
    Json amb = Json::parse(R"({"a": {"x": 1}, "b": {"x": 2}})");
    CHECK(code_of([&] { apply_override(amb, "x=3"); }) == ErrorCode::ConfigError);
}

TEST_CASE("probe and rhs configs")
{
    const ProbeConfig p = parse_probe(Json::parse(R"({"probe": {"kind": "heat", "grid": {"dim": 2, "side": 2, "nodes_per_unit": 10},
        "y": [0, 0], "t": 0.01}})"));
    CHECK(p.kind == ProbeConfig::Kind::Heat);
    CHECK(p.t == 0.01);
    const RhsConfig r = parse_rhs(Json::parse(R"({"rhs": {"grid": {"dim": 1, "side": 4, "nodes_per_unit": 8},
        "source": {"type": "gaussian"}, "band_filter": 1.5, "remove_moments": 1}})"));
    CHECK(*r.band_filter == 1.5);
    CHECK(*r.remove_moments == 1);
}

TEST_CASE("error codes split into config and numeric failures")
{
    CHECK(is_numeric_failure(ErrorCode::NonConvergence));
    CHECK(is_numeric_failure(ErrorCode::SubstepLimit));
    CHECK_FALSE(is_numeric_failure(ErrorCode::ConfigError));
    CHECK_FALSE(is_numeric_failure(ErrorCode::InvalidGeometry));
}
