#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ctns/errors.hpp"
#include "ctns/harness.hpp"

namespace ctns {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'N', 'S', 'C', 'H', 'K', '1'};

void require_little_endian() {
    const std::uint32_t probe = 1;
    char byte;
    std::memcpy(&byte, &probe, 1);
    if (byte != 1)
        throw SolverError("checkpoint: container format requires a little-endian host");
}

void write_array(std::ofstream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_array(std::ifstream& in, std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw SolverError("checkpoint: truncated field data");
}

}  // namespace

void write_checkpoint(const std::string& path, const SystemState& state, double mass0) {
    require_little_endian();
    const Grid& g = state.n.grid;
    nlohmann::ordered_json header;
    header["version"] = 1;
    header["nx"] = g.nx;
    header["ny"] = g.ny;
    header["Lx"] = g.Lx;
    header["Ly"] = g.Ly;
    header["t"] = state.t;
    header["v0_sup"] = state.v0_sup;
    header["mass0"] = mass0;
    header["fields"] = {"n", "v", "w", "ux", "uy", "p"};
    const std::string htext = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverError("checkpoint: cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    write_array(out, state.n.values);
    write_array(out, state.v.values);
    write_array(out, state.w.values);
    write_array(out, state.u.x);
    write_array(out, state.u.y);
    write_array(out, state.p.values);
    if (!out) throw SolverError("checkpoint: write failed for '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
    require_little_endian();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SolverError("checkpoint: cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw SolverError("checkpoint: bad magic in '" + path + "'");
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (!in || hlen > (1u << 20)) throw SolverError("checkpoint: bad header length");
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw SolverError("checkpoint: truncated header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(htext);
    } catch (const std::exception& e) {
        throw SolverError(std::string("checkpoint: header parse error: ") + e.what());
    }

    Checkpoint ck;
    ck.nx = header.at("nx").get<int>();
    ck.ny = header.at("ny").get<int>();
    ck.Lx = header.at("Lx").get<double>();
    ck.Ly = header.at("Ly").get<double>();
    ck.mass0 = header.at("mass0").get<double>();
    const Grid g(ck.nx, ck.ny, ck.Lx, ck.Ly);
    ck.state.t = header.at("t").get<double>();
    ck.state.v0_sup = header.at("v0_sup").get<double>();
    ck.state.n = ScalarField(g);
    ck.state.v = ScalarField(g);
    ck.state.w = ScalarField(g);
    ck.state.u = VectorField(g);
    ck.state.p = ScalarField(g);
    read_array(in, ck.state.n.values);
    read_array(in, ck.state.v.values);
    read_array(in, ck.state.w.values);
    read_array(in, ck.state.u.x);
    read_array(in, ck.state.u.y);
    read_array(in, ck.state.p.values);
    return ck;
}

}  // namespace ctns
