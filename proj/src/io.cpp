#include "lognls/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lognls/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian float64");

namespace lognls::io {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_file_atomic(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw validation_error("io: cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw validation_error("io: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("io: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_snapshot(const std::string& path, const WaveField& u, const pde::ModelParams& p) {
    std::string raw(u.size() * 2 * sizeof(double), '\0');
    std::memcpy(raw.data(), u.data.data(), raw.size());
    write_file_atomic(path, raw);

    nlohmann::json meta;
    meta["format_version"] = 1;
    meta["grid"] = {{"d", u.grid.d}, {"n", u.grid.n}, {"L", u.grid.L}};
    meta["t"] = u.t;
    meta["model"] = {{"lambda", p.lambda},
                     {"mu", p.mu},
                     {"sigma", p.sigma},
                     {"epsilon", p.epsilon}};
    write_file_atomic(path + ".json", meta.dump(2) + "\n");
}

std::pair<WaveField, pde::ModelParams> read_snapshot(const std::string& path) {
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(path + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("read_snapshot: bad sidecar: ") + e.what());
    }
    try {
        if (meta.at("format_version").get<int>() != 1)
            throw validation_error("read_snapshot: unsupported format version");
        Grid g(meta.at("grid").at("d").get<int>(), meta.at("grid").at("n").get<int>(),
               meta.at("grid").at("L").get<double>());
        WaveField u(g);
        u.t = meta.at("t").get<double>();
        pde::ModelParams p;
        p.lambda = meta.at("model").at("lambda").get<double>();
        p.mu = meta.at("model").at("mu").get<double>();
        p.sigma = meta.at("model").at("sigma").get<double>();
        p.epsilon = meta.at("model").at("epsilon").get<double>();

        const std::string raw = read_file(path);
        if (raw.size() != u.size() * 2 * sizeof(double))
            throw validation_error("read_snapshot: raw size does not match grid");
        std::memcpy(u.data.data(), raw.data(), raw.size());
        return {std::move(u), p};
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("read_snapshot: bad sidecar: ") + e.what());
    }
}

void write_diagnostics_csv(const std::vector<pde::DiagRow>& rows, int d, std::ostream& os) {
    if (d < 1 || d > 3) throw validation_error("write_diagnostics_csv: dimension must be 1, 2 or 3");
    os << "t,M";
    for (int ax = 0; ax < d; ++ax) os << ",J_" << ax;
    os << ",E,E_reg\n";
    for (const auto& r : rows) {
        os << fmt17(r.t) << ',' << fmt17(r.obs.mass);
        for (int ax = 0; ax < d; ++ax) os << ',' << fmt17(r.obs.momentum[ax]);
        os << ',' << fmt17(r.obs.energy) << ',' << fmt17(r.obs.energy_reg) << '\n';
    }
}

} // namespace lognls::io
