// expreg command-line tool.
//
//   expreg solve        --config solve.json      --out DIR
//   expreg experiment   --config configs/X.json  --out DIR [--threads N]
//   expreg greens-probe --config probe.json      --out DIR
//   expreg make-rhs     --config rhs.json        --out DIR
//   expreg verify
//
// Exit codes: 0 success, 1 verification failure, 2 config error, 3 numeric failure.

#include "expreg/config.hpp"
#include "expreg/error.hpp"
#include "expreg/experiments.hpp"
#include "expreg/greens.hpp"
#include "expreg/io.hpp"
#include "expreg/regsolve.hpp"
#include "expreg/spectral.hpp"
#include "expreg/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace expreg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify = 1;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

struct Options {
    std::string config;
    std::string out = ".";
    std::vector<std::string> overrides;
    int threads = 1;
    std::string mutate;
};

Json load_config(const Options& o)
{
    if (o.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
    if (!fs::exists(o.config)) throw Error(ErrorCode::ConfigError, "config file not found: " + o.config);
    Json j = read_json(o.config);
    for (const auto& kv : o.overrides) apply_override(j, kv);
    return j;
}

fs::path base_dir(const Options& o)
{
    return fs::path(o.config).parent_path();
}

fs::path out_dir(const Options& o)
{
    const fs::path d(o.out);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + d.string());
    return d;
}

std::ofstream open_csv(const fs::path& p)
{
    std::ofstream os(p);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + p.string());
    return os;
}

std::string method_name(const Method& m)
{
    if (std::holds_alternative<method::Naive>(m)) return "naive";
    if (std::holds_alternative<method::Regularized>(m)) return "regularized";
    return "exact_dirichlet";
}

int cmd_solve(const Options& o)
{
    const Json j = load_config(o);
    const SolveConfig cfg = parse_solve(j, base_dir(o));
    const SolveResult res = solve(cfg.request);
    const fs::path dir = out_dir(o);

    Json extra;
    extra["method"] = method_name(cfg.request.method);
    if (res.T) {
        extra["T"] = *res.T;
        extra["T_source"] = cfg.T_from_rule ? "choose_T" : "config";
        extra["L"] = cfg.L;
    }
    extra["coefficient"] = cfg.request.coefficient.name();
    extra["source"] = cfg.request.source.name();
    write_field(dir / "u", res.u, extra);

    auto os = open_csv(dir / "stats.csv");
    os << "method,R,T,iterations,residual,seconds,expm_substeps,expm_matvecs\n";
    os << method_name(cfg.request.method) << ',' << format_double(res.u.grid.side()) << ','
       << (res.T ? format_double(*res.T) : "") << ',' << res.stats.iterations << ','
       << format_double(res.stats.final_relative_residual) << ',' << format_double(res.seconds) << ','
       << res.expm_stats.substeps << ',' << res.expm_stats.matvecs << '\n';
    std::cout << "solve: " << method_name(cfg.request.method) << " R=" << res.u.grid.side()
              << " iterations=" << res.stats.iterations;
    if (res.T) std::cout << " T=" << *res.T;
    std::cout << " -> " << (dir / "u.bin").string() << '\n';
    return exit_ok;
}

int cmd_experiment(const Options& o)
{
    const Json j = load_config(o);
    ExperimentPlan plan = parse_plan(j, base_dir(o));
    plan.threads = o.threads;
    const ErrorReport rep = run_experiment(plan);
    const fs::path dir = out_dir(o);
    write_report_csv(dir / (plan.id + "_report.csv"), rep);
    write_json(dir / (plan.id + "_fits.json"), fits_to_json(rep));

    for (const auto& r : rep.rows) {
        std::printf("%-12s R=%-6g %-16s error=%.4e iters=%lld  %.2fs\n", r.experiment_id.c_str(), r.R, r.method.c_str(),
                    r.error, static_cast<long long>(r.iterations), r.seconds);
    }
    for (const auto& f : rep.fits) {
        std::printf("fit %-16s %-11s vs %s: slope=%.4f r2=%.4f (%lld pts)\n", f.method.c_str(), to_string(f.model),
                    f.against.c_str(), f.fit.slope, f.fit.r2, static_cast<long long>(f.points));
    }
    if (rep.headline) {
        const Headline& h = *rep.headline;
        std::printf("headline R=%g: regularized %.4e, naive %.4e, ratio %.4f (%s)\n", h.R, h.regularized, h.naive,
                    h.naive > 0.0 ? h.regularized / h.naive : 0.0, h.reference.c_str());
    }
    return exit_ok;
}

int cmd_greens(const Options& o)
{
    const Json j = load_config(o);
    const ProbeConfig cfg = parse_probe(j);
    const fs::path dir = out_dir(o);
    const Grid grid = build_grid(cfg.grid);
    Json summary;
    summary["grid"] = grid_sidecar(grid);
    summary["y"] = cfg.y;

    if (cfg.kind == ProbeConfig::Kind::Ordering) {
        const OrderingReport rep =
            ordering_check(cfg.grid.dim, cfg.coefficient, cfg.y, grid.side(), cfg.R_large, cfg.grid.nodes_per_unit, cfg.solver);
        summary["kind"] = "ordering";
        summary["R_large"] = cfg.R_large;
        summary["max_violation"] = rep.max_violation;
        summary["tolerance"] = rep.tolerance;
        summary["pass"] = rep.pass;
        write_json(dir / "probe.json", summary);
        std::cout << "ordering: max violation " << rep.max_violation << (rep.pass ? " (pass)" : " (FAIL)") << '\n';
        return exit_ok;
    }

    const DiscreteOperator op = assemble(grid, cfg.coefficient);
    const std::int64_t y = interior_node_at(grid, cfg.y);
    GreensProbe probe = cfg.kind == ProbeConfig::Kind::Elliptic ? elliptic_green(op, y, cfg.solver)
                                                                : heat_kernel_probe(op, y, cfg.t, cfg.expm);
    auto os = open_csv(dir / "probe.csv");
    os << "r,G\n";
    for (const auto& [r, g] : radial_profile(probe)) os << format_double(r) << ',' << format_double(g) << '\n';

    summary["mass"] = probe_mass(probe);
    if (cfg.kind == ProbeConfig::Kind::Elliptic) {
        summary["kind"] = "elliptic";
        if (grid.dim() == 3) {
            const DecayFit f = cfg.r_min || cfg.r_max
                                   ? elliptic_decay_fit(probe, cfg.r_min.value_or(4.0 * grid.h()),
                                                        cfg.r_max.value_or(grid.side() / 8.0))
                                   : elliptic_decay_fit(probe);
            summary["decay_fit"] = {{"exponent", f.exponent}, {"r2", f.r2}, {"points", f.points}};
            std::cout << "elliptic decay exponent " << f.exponent << " (r2 " << f.r2 << ")\n";
        }
    } else {
        summary["kind"] = "heat";
        summary["t"] = cfg.t;
        const DecayFit f = heat_envelope_fit(probe);
        summary["envelope_fit"] = {{"slope", f.exponent}, {"r2", f.r2}, {"points", f.points}};
        std::cout << "heat mass " << probe_mass(probe) << ", envelope slope " << f.exponent << '\n';
    }
    write_json(dir / "probe.json", summary);
    return exit_ok;
}

int cmd_make_rhs(const Options& o)
{
    const Json j = load_config(o);
    const RhsConfig cfg = parse_rhs(j, base_dir(o));
    const Grid grid = build_grid(cfg.grid);
    GridFunction g = source_values(cfg.source, cfg.coefficient, grid);
    Json extra;
    extra["source"] = cfg.source.name();
    if (cfg.band_filter) {
        g = band_filter(g, *cfg.band_filter);
        extra["band_filter"] = *cfg.band_filter;
        extra["band_energy"] = band_energy(g, *cfg.band_filter);
    }
    if (cfg.remove_moments) {
        g = remove_moments(g, *cfg.remove_moments);
        Json m = Json::array();
        for (const auto& mo : moments(g, *cfg.remove_moments)) {
            m.push_back({{"gamma", std::vector<int>(mo.gamma.begin(), mo.gamma.begin() + grid.dim())}, {"value", mo.value}});
        }
        extra["remove_moments"] = *cfg.remove_moments;
        extra["moments"] = m;
    }
    extra["l2_norm"] = l2_norm(g);
    const fs::path dir = out_dir(o);
    write_field(dir / "rhs", g, extra);
    std::cout << "make-rhs: " << cfg.source.name() << " -> " << (dir / "rhs.bin").string() << '\n';
    return exit_ok;
}

int cmd_verify(const Options& o)
{
    VerifyOptions vo;
    if (!o.mutate.empty()) {
        if (o.mutate != "flip-offdiag") throw Error(ErrorCode::ConfigError, "unknown mutation '" + o.mutate + "'");
        vo.flip_offdiagonal = true;
    }
    const VerifyReport rep = run_verify(vo);
    for (const auto& c : rep.checks) {
        std::printf("%-4s %-32s value=%-12.4g tol=%-10.3g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance, c.detail.c_str());
    }
    std::printf("verify: %s in %.2fs\n", rep.all_pass() ? "all checks passed" : "FAILED", rep.seconds);
    return rep.all_pass() ? exit_ok : exit_verify;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exponentially regularized elliptic solves on truncated domains"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("-c,--config", o.config, "JSON config file");
        if (needs_config) c->required();
        sub->add_option("-o,--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--override", o.overrides, "key=value override (dotted path or unique key)");
        sub->add_option("-t,--threads", o.threads, "row worker cap")->capture_default_str()->check(CLI::PositiveNumber);
    };
    auto* solve_cmd = app.add_subcommand("solve", "solve one problem");
    auto* exp_cmd = app.add_subcommand("experiment", "run an experiment plan");
    auto* probe_cmd = app.add_subcommand("greens-probe", "discrete Green's function probe");
    auto* rhs_cmd = app.add_subcommand("make-rhs", "build a (filtered) right-hand side");
    auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite");
    add_common(solve_cmd, true);
    add_common(exp_cmd, true);
    add_common(probe_cmd, true);
    add_common(rhs_cmd, true);
    verify_cmd->add_option("--mutate", o.mutate)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(o);
        if (exp_cmd->parsed()) return cmd_experiment(o);
        if (probe_cmd->parsed()) return cmd_greens(o);
        if (rhs_cmd->parsed()) return cmd_make_rhs(o);
        return cmd_verify(o);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return is_numeric_failure(e.code()) ? exit_numeric : exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
