#include "expreg/io.hpp"

#include "expreg/error.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

namespace expreg {

namespace fs = std::filesystem;

namespace {

fs::path with_ext(fs::path p, const char* ext)
{
    if (p.extension() == ".bin" || p.extension() == ".json") p.replace_extension();
    p += ext;
    return p;
}

std::uint64_t to_le(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream os(path, mode);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    return os;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Json grid_sidecar(const Grid& grid)
{
    Json j;
    j["dim"] = grid.dim();
    j["dims"] = std::vector<std::int64_t>(static_cast<std::size_t>(grid.dim()), grid.n());
    j["R"] = grid.side();
    j["h"] = grid.h();
    j["nodes_per_unit"] = grid.nodes_per_unit();
    j["ordering"] = "row-major";
    j["dtype"] = "float64-le";
    return j;
}

void write_field(const fs::path& stem, const GridFunction& u, const Json& extra)
{
    {
        auto os = open_out(with_ext(stem, ".bin"), std::ios::out | std::ios::binary);
        for (double v : u.values) {
            const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
            os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
        if (!os) throw Error(ErrorCode::IoError, "short write to " + with_ext(stem, ".bin").string());
    }
    Json side = grid_sidecar(u.grid);
    if (extra.is_object()) side.update(extra);
    write_json(with_ext(stem, ".json"), side);
}

GridFunction read_field(const fs::path& path)
{
    const Json side = read_json(with_ext(path, ".json"));
    Grid grid = [&] {
        try {
            const int dim = side.at("dim").get<int>();
            const auto n = side.at("dims").at(0).get<std::int64_t>();
            return Grid::lattice(dim, n, side.at("h").get<double>(), side.at("nodes_per_unit").get<int>());
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::IoError, "malformed sidecar " + with_ext(path, ".json").string() + ": " + e.what());
        }
    }();
    const fs::path bin = with_ext(path, ".bin");
    std::ifstream is(bin, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoError, "cannot read " + bin.string());
    std::vector<double> values(static_cast<std::size_t>(grid.num_nodes()));
    for (double& v : values) {
        std::uint64_t bits = 0;
        is.read(reinterpret_cast<char*>(&bits), sizeof bits);
        if (!is) throw Error(ErrorCode::IoError, bin.string() + " is shorter than its sidecar declares");
        v = std::bit_cast<double>(to_le(bits));
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorCode::IoError, bin.string() + " is longer than its sidecar declares");
    }
    return GridFunction(std::move(grid), std::move(values));
}

void write_report_csv(const fs::path& path, const ErrorReport& report)
{
    auto os = open_out(path);
    os << report_csv_header << '\n';
    for (const auto& r : report.rows) {
        os << r.experiment_id << ',' << format_double(r.R) << ',' << format_double(r.L) << ','
           << (r.T ? format_double(*r.T) : std::string()) << ',' << r.method << ',' << format_double(r.error) << ','
           << r.iterations << ',' << format_double(r.residual) << ',' << format_double(r.seconds) << '\n';
    }
    if (!os) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Json fits_to_json(const ErrorReport& report)
{
    Json j;
    j["experiment_id"] = report.experiment_id;
    Json fits = Json::array();
    for (const auto& f : report.fits) {
        fits.push_back({{"method", f.method},
                        {"model", to_string(f.model)},
                        {"against", f.against},
                        {"slope", f.fit.slope},
                        {"intercept", f.fit.intercept},
                        {"r2", f.fit.r2},
                        {"points", f.points}});
    }
    j["fits"] = fits;
    Json excluded = Json::array();
    for (const auto& r : report.rows) {
        if (r.is_reference) excluded.push_back({{"R", r.R}, {"method", r.method}});
    }
    j["excluded_rows"] = excluded;
    if (report.headline) {
        const auto& h = *report.headline;
        j["headline"] = {{"R", h.R},
                         {"regularized_error", h.regularized},
                         {"naive_error", h.naive},
                         {"ratio", h.naive > 0.0 ? h.regularized / h.naive : 0.0},
                         {"reference", h.reference}};
    }
    return j;
}

void write_json(const fs::path& path, const Json& j)
{
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    if (!os) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Json read_json(const fs::path& path)
{
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    try {
        return Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
}

} // namespace expreg
