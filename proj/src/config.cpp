#include "expreg/config.hpp"

#include "expreg/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace expreg {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what)
{
    throw Error(ErrorCode::ConfigError, where + ": " + what);
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) config_error(where, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            config_error(where + "." + key, "unknown field");
        }
    }
}

const Json& require(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) config_error(where + "." + key, "missing");
    return j.at(key);
}

template <class T>
T get(const Json& j, const std::string& where)
{
    try {
        return j.get<T>();
    } catch (const Json::exception&) {
        config_error(where, "has the wrong type (" + j.dump() + ")");
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    return get<T>(j.at(key), where + "." + key);
}

int get_int(const Json& j, const std::string& where)
{
    if (j.is_number_integer()) return j.get<int>();
    if (j.is_number()) {
        const double v = j.get<double>();
        if (v == std::round(v)) return static_cast<int>(v);
    }
    config_error(where, "must be an integer");
}

// "name" or {"type": "name", ...}
std::string type_of(const Json& j, const std::string& where)
{
    if (j.is_string()) return j.get<std::string>();
    if (j.is_object()) return get<std::string>(require(j, "type", where), where + ".type");
    config_error(where, "expected a name or an object with a type");
}

const Json& unwrap(const Json& root, const char* key)
{
    if (!root.is_object() || !root.contains(key)) config_error(key, "missing top-level object");
    return root.at(key);
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

} // namespace

GridSpec parse_grid(const Json& j, const std::string& where)
{
    check_keys(j, where, {"dim", "side", "R", "nodes_per_unit"});
    GridSpec g;
    g.dim = get_int(require(j, "dim", where), where + ".dim");
    if (j.contains("side") == j.contains("R")) config_error(where + ".side", "give exactly one of side / R");
    g.side = get<double>(j.contains("side") ? j.at("side") : j.at("R"), where + ".side");
    g.nodes_per_unit = get_int(require(j, "nodes_per_unit", where), where + ".nodes_per_unit");
    try {
        (void)build_grid(g);
    } catch (const Error& e) {
        config_error(where, e.what());
    }
    return g;
}

CoefficientSpec parse_coefficient(const Json& j, const std::string& where)
{
    const std::string t = type_of(j, where);
    try {
        if (t == "constant") {
            return coeff::Constant{j.is_object() ? get_or<double>(j, "value", 1.0, where) : 1.0};
        }
        if (t == "radial_bump") return coeff::RadialBump{};
        if (t == "quasi_periodic") return coeff::QuasiPeriodic{};
        if (t == "periodic") return coeff::Periodic{j.is_object() ? get_or<double>(j, "epsilon", 0.1, where) : 0.1};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        config_error(where, e.what());
    }
    config_error(where + ".type", "unknown coefficient '" + t + "'");
}

SolutionSpec parse_solution(const Json& j, const std::string& where)
{
    const std::string t = type_of(j, where);
    if (t == "zero") return solution::Zero{};
    if (t == "sine3d_bump") return solution::Sine3DBump{};
    if (t == "sine2d_bump") return solution::Sine2DBump{};
    if (t == "highfreq2d_bump") return solution::HighFreq2DBump{};
    if (t == "bump") return solution::Bump{};
    if (t == "plummer") return solution::Plummer{j.is_object() ? get_or<double>(j, "scale", 0.5, where) : 0.5};
    if (t == "cosine") {
        return solution::Cosine{j.is_object() ? get_or<double>(j, "freq", std::numbers::pi, where) : std::numbers::pi};
    }
    config_error(where + ".type", "unknown solution '" + t + "'");
}

SourceSpec parse_source(const Json& j, const std::optional<SolutionSpec>& solution, const fs::path& base_dir,
                        const std::string& where)
{
    const std::string t = type_of(j, where);
    if (t == "from_solution") {
        if (!solution) config_error(where, "from_solution needs a solution field");
        return source::FromSolution{*solution};
    }
    if (t == "quasi_source") return source::QuasiSource{};
    if (t == "gaussian") {
        source::Gaussian g;
        if (j.is_object()) {
            g.sigma = get_or<double>(j, "sigma", g.sigma, where);
            g.amplitude = get_or<double>(j, "amplitude", g.amplitude, where);
        }
        if (!(g.sigma > 0.0)) config_error(where + ".sigma", "must be positive");
        return g;
    }
    if (t == "file") {
        const auto path = get<std::string>(require(j, "path", where), where + ".path");
        try {
            return source::GridValues{read_field(resolve(base_dir, path))};
        } catch (const Error& e) {
            config_error(where + ".path", e.what());
        }
    }
    config_error(where + ".type", "unknown source '" + t + "'");
}

SolverConfig parse_solver(const Json& j, const std::string& where)
{
    SolverConfig c;
    if (j.is_null()) return c;
    check_keys(j, where, {"rel_tol", "max_iter", "preconditioner"});
    c.rel_tol = get_or<double>(j, "rel_tol", c.rel_tol, where);
    c.max_iter = get_or<std::int64_t>(j, "max_iter", c.max_iter, where);
    const auto pc = get_or<std::string>(j, "preconditioner", "jacobi", where);
    if (pc == "jacobi") c.preconditioner = Preconditioner::Jacobi;
    else if (pc == "none") c.preconditioner = Preconditioner::None;
    else config_error(where + ".preconditioner", "must be 'jacobi' or 'none'");
    try {
        validate(c);
    } catch (const Error& e) {
        config_error(where, e.what());
    }
    return c;
}

ExpmConfig parse_expm(const Json& j, const std::string& where)
{
    ExpmConfig c;
    if (j.is_null()) return c;
    check_keys(j, where, {"krylov_dim", "rel_tol", "max_substeps"});
    if (j.contains("krylov_dim")) c.krylov_dim = get_int(j.at("krylov_dim"), where + ".krylov_dim");
    c.rel_tol = get_or<double>(j, "rel_tol", c.rel_tol, where);
    c.max_substeps = get_or<std::int64_t>(j, "max_substeps", c.max_substeps, where);
    try {
        validate(c);
    } catch (const Error& e) {
        config_error(where, e.what());
    }
    return c;
}

namespace {

std::optional<SolutionSpec> optional_solution(const Json& j, const std::string& where)
{
    if (!j.contains("solution")) return std::nullopt;
    return parse_solution(j.at("solution"), where + ".solution");
}

Json sub(const Json& j, const char* key)
{
    return j.contains(key) ? j.at(key) : Json();
}

} // namespace

SolveConfig parse_solve(const Json& root, const fs::path& base_dir)
{
    const Json& j = unwrap(root, "solve");
    const std::string w = "solve";
    check_keys(j, w, {"grid", "coefficient", "solution", "source", "method", "solver", "expm"});
    SolveConfig cfg;
    SolveRequest& req = cfg.request;
    req.grid = parse_grid(require(j, "grid", w), w + ".grid");
    req.coefficient = j.contains("coefficient") ? parse_coefficient(j.at("coefficient"), w + ".coefficient")
                                                : CoefficientSpec{};
    const auto sol = optional_solution(j, w);
    req.source = parse_source(require(j, "source", w), sol, base_dir, w + ".source");
    req.solver = parse_solver(sub(j, "solver"), w + ".solver");
    req.expm = parse_expm(sub(j, "expm"), w + ".expm");

    const Json& m = require(j, "method", w);
    const std::string mw = w + ".method";
    const std::string t = type_of(m, mw);
    const double R = build_grid(req.grid).side();
    if (t == "naive") {
        req.method = method::Naive{};
    } else if (t == "exact_dirichlet") {
        if (!sol) config_error(mw, "exact_dirichlet needs a solution field");
        req.method = method::ExactDirichlet{*sol};
    } else if (t == "regularized") {
        if (m.is_object()) check_keys(m, mw, {"type", "T", "L"});
        cfg.L = m.is_object() ? get_or<double>(m, "L", 2.0 * R / 3.0, mw) : 2.0 * R / 3.0;
        if (!(cfg.L > 0.0) || !(cfg.L < R)) {
            std::ostringstream os;
            os << "must satisfy 0 < L < R (L=" << cfg.L << ", R=" << R << ")";
            config_error(mw + ".L", os.str());
        }
        double T = 0.0;
        if (m.is_object() && m.contains("T")) {
            T = get<double>(m.at("T"), mw + ".T");
            if (!(T > 0.0)) config_error(mw + ".T", "must be positive");
        } else {
            T = choose_T(R, cfg.L, req.coefficient.alpha(req.grid.dim), req.coefficient.beta(req.grid.dim));
            cfg.T_from_rule = true;
        }
        req.method = method::Regularized{T};
    } else {
        config_error(mw + ".type", "unknown method '" + t + "'");
    }
    return cfg;
}

ExperimentPlan parse_plan(const Json& root, const fs::path& base_dir)
{
    const Json& j = unwrap(root, "plan");
    const std::string w = "plan";
    check_keys(j, w,
               {"id", "dim", "R_values", "nodes_per_unit", "L_fraction", "L", "T_policy", "reference", "methods",
                "coefficient", "solution", "source", "solver", "expm", "threads", "description"});
    ExperimentPlan p;
    p.id = get<std::string>(require(j, "id", w), w + ".id");
    if (!is_known_experiment(p.id)) config_error(w + ".id", "unknown experiment id '" + p.id + "'");
    p.dim = get_int(require(j, "dim", w), w + ".dim");
    p.R_values = get<std::vector<double>>(require(j, "R_values", w), w + ".R_values");
    p.nodes_per_unit = get_int(require(j, "nodes_per_unit", w), w + ".nodes_per_unit");
    p.L_fraction = get_or<double>(j, "L_fraction", p.L_fraction, w);
    if (j.contains("L")) p.L_fixed = get<double>(j.at("L"), w + ".L");
    if (j.contains("threads")) p.threads = get_int(j.at("threads"), w + ".threads");
    p.coefficient = j.contains("coefficient") ? parse_coefficient(j.at("coefficient"), w + ".coefficient")
                                              : CoefficientSpec{};
    p.solution = optional_solution(j, w);
    p.source = j.contains("source") ? parse_source(j.at("source"), p.solution, base_dir, w + ".source")
                                    : SourceSpec(source::FromSolution{p.solution.value_or(SolutionSpec{})});
    p.solver = parse_solver(sub(j, "solver"), w + ".solver");
    p.expm = parse_expm(sub(j, "expm"), w + ".expm");

    if (j.contains("T_policy")) {
        const Json& tp = j.at("T_policy");
        const std::string tw = w + ".T_policy";
        if (tp.is_string()) {
            const auto s = tp.get<std::string>();
            if (s == "per_row_rule") p.T_policy.kind = TPolicy::Kind::PerRowRule;
            else if (s == "reference_rule") p.T_policy.kind = TPolicy::Kind::ReferenceRule;
            else config_error(tw, "unknown policy '" + s + "'");
        } else if (tp.is_object() && tp.contains("fixed")) {
            p.T_policy.kind = TPolicy::Kind::Fixed;
            p.T_policy.fixed = get<double>(tp.at("fixed"), tw + ".fixed");
        } else if (tp.is_object() && tp.contains("per_r")) {
            p.T_policy.kind = TPolicy::Kind::PerR;
            p.T_policy.per_r = get<std::vector<double>>(tp.at("per_r"), tw + ".per_r");
        } else {
            config_error(tw, "expected per_row_rule, reference_rule, {fixed: T} or {per_r: [...]}");
        }
    }
    if (j.contains("reference")) {
        const Json& r = j.at("reference");
        const std::string rw = w + ".reference";
        const std::string t = type_of(r, rw);
        if (r.is_object()) check_keys(r, rw, {"type", "R", "naive"});
        if (t == "closed_form") {
            p.reference.kind = ReferencePolicy::Kind::ClosedForm;
        } else if (t == "regularized_at_rmax") {
            p.reference.kind = ReferencePolicy::Kind::RegularizedAtRmax;
            if (r.is_object()) {
                p.reference.R = get_or<double>(r, "R", 0.0, rw);
                const auto naive = get_or<std::string>(r, "naive", "same", rw);
                if (naive == "closed_form") p.reference.naive_closed_form = true;
                else if (naive != "same") config_error(rw + ".naive", "must be 'same' or 'closed_form'");
            }
        } else {
            config_error(rw + ".type", "unknown reference '" + t + "'");
        }
    }
    if (j.contains("methods")) {
        p.methods.clear();
        for (const auto& m : get<std::vector<std::string>>(j.at("methods"), w + ".methods")) {
            if (m == "naive") p.methods.push_back(MethodKind::Naive);
            else if (m == "regularized") p.methods.push_back(MethodKind::Regularized);
            else if (m == "exact_dirichlet") p.methods.push_back(MethodKind::ExactDirichlet);
            else config_error(w + ".methods", "unknown method '" + m + "'");
        }
    }
    try {
        validate(p);
    } catch (const Error& e) {
        config_error(w, e.what());
    }
    return p;
}

ProbeConfig parse_probe(const Json& root)
{
    const Json& j = unwrap(root, "probe");
    const std::string w = "probe";
    check_keys(j, w, {"kind", "grid", "coefficient", "y", "t", "R_large", "r_min", "r_max", "solver", "expm"});
    ProbeConfig c;
    const auto kind = get_or<std::string>(j, "kind", "elliptic", w);
    if (kind == "elliptic") c.kind = ProbeConfig::Kind::Elliptic;
    else if (kind == "heat") c.kind = ProbeConfig::Kind::Heat;
    else if (kind == "ordering") c.kind = ProbeConfig::Kind::Ordering;
    else config_error(w + ".kind", "must be elliptic, heat or ordering");
    c.grid = parse_grid(require(j, "grid", w), w + ".grid");
    if (j.contains("coefficient")) c.coefficient = parse_coefficient(j.at("coefficient"), w + ".coefficient");
    c.y = j.contains("y") ? get<std::vector<double>>(j.at("y"), w + ".y")
                          : std::vector<double>(static_cast<std::size_t>(c.grid.dim), 0.0);
    if (static_cast<int>(c.y.size()) != c.grid.dim) config_error(w + ".y", "must have one coordinate per dimension");
    if (c.kind == ProbeConfig::Kind::Heat) {
        c.t = get<double>(require(j, "t", w), w + ".t");
        if (!(c.t > 0.0)) config_error(w + ".t", "must be positive");
    }
    if (c.kind == ProbeConfig::Kind::Ordering) {
        c.R_large = get<double>(require(j, "R_large", w), w + ".R_large");
        if (!(c.R_large >= c.grid.side)) config_error(w + ".R_large", "must be >= grid.side");
    }
    if (j.contains("r_min")) c.r_min = get<double>(j.at("r_min"), w + ".r_min");
    if (j.contains("r_max")) c.r_max = get<double>(j.at("r_max"), w + ".r_max");
    if (j.contains("solver")) c.solver = parse_solver(j.at("solver"), w + ".solver");
    c.expm = parse_expm(sub(j, "expm"), w + ".expm");
    return c;
}

RhsConfig parse_rhs(const Json& root, const fs::path& base_dir)
{
    const Json& j = unwrap(root, "rhs");
    const std::string w = "rhs";
    check_keys(j, w, {"grid", "coefficient", "solution", "source", "band_filter", "remove_moments"});
    RhsConfig c;
    c.grid = parse_grid(require(j, "grid", w), w + ".grid");
    if (j.contains("coefficient")) c.coefficient = parse_coefficient(j.at("coefficient"), w + ".coefficient");
    c.source = parse_source(require(j, "source", w), optional_solution(j, w), base_dir, w + ".source");
    if (j.contains("band_filter")) c.band_filter = get<double>(j.at("band_filter"), w + ".band_filter");
    if (j.contains("remove_moments")) c.remove_moments = get_int(j.at("remove_moments"), w + ".remove_moments");
    return c;
}

void apply_override(Json& root, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) config_error("--override", "expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        value = raw;
    }

    if (key.find('.') != std::string::npos) {
        Json* node = &root;
        std::stringstream ss(key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.')) {
            if (part.empty()) config_error("--override", "empty path segment in '" + key + "'");
            parts.push_back(part);
        }
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!node->is_object()) *node = Json::object();
            node = &(*node)[parts[i]];
        }
        if (!node->is_object()) *node = Json::object();
        (*node)[parts.back()] = value;
        return;
    }

    std::vector<Json*> hits;
    std::function<void(Json&)> walk = [&](Json& n) {
        if (n.is_object()) {
            for (auto& [k, v] : n.items()) {
                if (k == key) hits.push_back(&v);
                walk(v);
            }
        } else if (n.is_array()) {
            for (auto& v : n) walk(v);
        }
    };
    walk(root);
    if (hits.empty()) config_error("--override", "no field named '" + key + "'");
    if (hits.size() > 1) config_error("--override", "'" + key + "' is ambiguous; use a dotted path");
    *hits.front() = value;
}

} // namespace expreg
