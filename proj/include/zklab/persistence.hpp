#ifndef ZKLAB_PERSISTENCE_HPP
#define ZKLAB_PERSISTENCE_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zklab/diagnostics.hpp"
#include "zklab/grid.hpp"
#include "zklab/params.hpp"
#include "zklab/solver.hpp"

namespace zklab {
namespace persist {

struct SchemaError : std::runtime_error {
    std::string field;
    SchemaError(const std::string& f, const std::string& what)
        : std::runtime_error(f + ": " + what), field(f) {}
};

// ---- run configuration -----------------------------------------------------

enum class IcKind { gaussian, soliton, multisoliton, random };

struct RunConfig {
    EquationSpec eq{Equation::zk, 2};
    int dim = 2;
    std::array<int, 3> n{256, 256, 1};
    std::array<double, 3> box{64 * M_PI, 64 * M_PI, 0};
    double t_start = 2.0;
    double t_end = 7.0;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    int checkpoint_every = 0;  // steps; 0 writes only the final state
    int diag_every = 0;        // steps; 0 disables series output

    IcKind ic_kind = IcKind::gaussian;
    double ic_amplitude = 0.5;
    double ic_width = 4.0;
    double ic_speed = 1.0;
    double ic_keep_fraction = 0.5;
    std::vector<double> ic_speeds;   // multisoliton
    std::vector<double> ic_centers;  // multisoliton (x positions)

    params::RegionParams2D region{};         // 2D diagnostics
    params::ScaleLaws3D region3{1.0 / 3.0, 1.0 / 3.0 + 1e-3, 1.0 / 3.0, 1.0 / 3.0, 1.0};
    diag::WeightParams2D weights{};
    diag::WeightParams3D weights3{};
    params::FarRegionLaw far{1.0, 0.1};

    bool diag_xi = false;
    bool diag_local_mass = false;
    bool diag_weighted = false;
    bool diag_far = false;
    int far_axis = 0;
    int far_sign = 1;

    Grid grid() const { return Grid::make(dim, n, box); }
};

namespace detail {

inline std::vector<double> parse_doubles(const std::string& v, const std::string& field) {
    std::vector<double> out;
    std::istringstream is(v);
    double x;
    while (is >> x) out.push_back(x);
    if (out.empty()) throw SchemaError(field, "expected numeric value(s), got '" + v + "'");
    return out;
}

inline double parse_double(const std::string& v, const std::string& field) {
    const auto d = parse_doubles(v, field);
    if (d.size() != 1) throw SchemaError(field, "expected a single number");
    return d[0];
}

inline bool parse_bool(const std::string& v, const std::string& field) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw SchemaError(field, "expected on/off, got '" + v + "'");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    RunConfig c;
    bool have_n = false, have_box = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw SchemaError("line " + std::to_string(lineno), "expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        using detail::parse_bool;
        using detail::parse_double;
        using detail::parse_doubles;

        if (key == "equation") {
            if (val == "zk")
                c.eq.eq = Equation::zk;
            else if (val == "gkdv")
                c.eq.eq = Equation::gkdv;
            else
                throw SchemaError(key, "unknown equation '" + val + "'");
        } else if (key == "p") {
            c.eq.p = int(parse_double(val, key));
        } else if (key == "dim") {
            c.dim = int(parse_double(val, key));
        } else if (key == "n") {
            const auto v = parse_doubles(val, key);
            for (std::size_t i = 0; i < v.size() && i < 3; ++i) c.n[i] = int(v[i]);
            for (std::size_t i = v.size(); i < 3; ++i) c.n[i] = 1;
            have_n = true;
        } else if (key == "box") {
            const auto v = parse_doubles(val, key);
            for (std::size_t i = 0; i < v.size() && i < 3; ++i) c.box[i] = v[i];
            for (std::size_t i = v.size(); i < 3; ++i) c.box[i] = 0;
            have_box = true;
        } else if (key == "t_start") {
            c.t_start = parse_double(val, key);
        } else if (key == "t_end") {
            c.t_end = parse_double(val, key);
        } else if (key == "dt") {
            c.dt = parse_double(val, key);
        } else if (key == "seed") {
            c.seed = std::uint64_t(parse_double(val, key));
        } else if (key == "checkpoint_every") {
            c.checkpoint_every = int(parse_double(val, key));
        } else if (key == "diag_every") {
            c.diag_every = int(parse_double(val, key));
        } else if (key == "ic.kind") {
            if (val == "gaussian")
                c.ic_kind = IcKind::gaussian;
            else if (val == "soliton")
                c.ic_kind = IcKind::soliton;
            else if (val == "multisoliton")
                c.ic_kind = IcKind::multisoliton;
            else if (val == "random")
                c.ic_kind = IcKind::random;
            else
                throw SchemaError(key, "unknown initial condition '" + val + "'");
        } else if (key == "ic.amplitude") {
            c.ic_amplitude = parse_double(val, key);
        } else if (key == "ic.width") {
            c.ic_width = parse_double(val, key);
        } else if (key == "ic.speed") {
            c.ic_speed = parse_double(val, key);
        } else if (key == "ic.keep_fraction") {
            c.ic_keep_fraction = parse_double(val, key);
        } else if (key == "ic.speeds") {
            c.ic_speeds = parse_doubles(val, key);
        } else if (key == "ic.centers") {
            c.ic_centers = parse_doubles(val, key);
        } else if (key == "region.b") {
            c.region.b = parse_double(val, key);
        } else if (key == "region.r") {
            c.region.r = parse_double(val, key);
        } else if (key == "region.q") {
            c.region.q = parse_double(val, key);
        } else if (key == "region.centered") {
            c.region.centered = parse_bool(val, key);
        } else if (key == "region.m") {
            c.region.m = parse_double(val, key);
        } else if (key == "region.n") {
            c.region.n = parse_double(val, key);
        } else if (key == "region3.p1") {
            c.region3.p1 = parse_double(val, key);
        } else if (key == "region3.p2") {
            c.region3.p2 = parse_double(val, key);
        } else if (key == "region3.p3") {
            c.region3.p3 = parse_double(val, key);
        } else if (key == "region3.p4") {
            c.region3.p4 = parse_double(val, key);
        } else if (key == "region3.q1") {
            c.region3.q1 = parse_double(val, key);
        } else if (key == "weights.sigma") {
            c.weights.sigma = c.weights3.sigma = parse_double(val, key);
        } else if (key == "weights.delta1") {
            c.weights.delta1 = c.weights3.delta1 = parse_double(val, key);
        } else if (key == "weights.delta2") {
            c.weights.delta2 = c.weights3.delta2 = parse_double(val, key);
        } else if (key == "weights.delta3") {
            c.weights3.delta3 = parse_double(val, key);
        } else if (key == "far.p") {
            c.far.p_exp = parse_double(val, key);
        } else if (key == "far.eps") {
            c.far.eps = parse_double(val, key);
        } else if (key == "far.axis") {
            c.far_axis = int(parse_double(val, key));
        } else if (key == "far.sign") {
            c.far_sign = int(parse_double(val, key));
        } else if (key == "diag.xi") {
            c.diag_xi = parse_bool(val, key);
        } else if (key == "diag.local_mass") {
            c.diag_local_mass = parse_bool(val, key);
        } else if (key == "diag.weighted") {
            c.diag_weighted = parse_bool(val, key);
        } else if (key == "diag.far") {
            c.diag_far = parse_bool(val, key);
        } else {
            throw SchemaError(key, "unknown configuration key");
        }
    }
    if (!have_n || !have_box) throw SchemaError(have_n ? "box" : "n", "missing required key");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("config", "cannot open '" + path + "'");
    return parse_config(in);
}

inline void save_config(const RunConfig& c, std::ostream& out) {
    out << std::setprecision(17);
    out << "equation = " << (c.eq.eq == Equation::zk ? "zk" : "gkdv") << "\n";
    out << "p = " << c.eq.p << "\n";
    out << "dim = " << c.dim << "\n";
    out << "n =";
    for (int a = 0; a < c.dim; ++a) out << ' ' << c.n[a];
    out << "\nbox =";
    for (int a = 0; a < c.dim; ++a) out << ' ' << c.box[a];
    out << "\nt_start = " << c.t_start << "\n";
    out << "t_end = " << c.t_end << "\n";
    out << "dt = " << c.dt << "\n";
    out << "seed = " << c.seed << "\n";
    out << "checkpoint_every = " << c.checkpoint_every << "\n";
    out << "diag_every = " << c.diag_every << "\n";
    const char* kinds[] = {"gaussian", "soliton", "multisoliton", "random"};
    out << "ic.kind = " << kinds[int(c.ic_kind)] << "\n";
    out << "ic.amplitude = " << c.ic_amplitude << "\n";
    out << "ic.width = " << c.ic_width << "\n";
    out << "ic.speed = " << c.ic_speed << "\n";
    out << "ic.keep_fraction = " << c.ic_keep_fraction << "\n";
    if (!c.ic_speeds.empty()) {
        out << "ic.speeds =";
        for (double v : c.ic_speeds) out << ' ' << v;
        out << "\nic.centers =";
        for (double v : c.ic_centers) out << ' ' << v;
        out << "\n";
    }
    out << "region.b = " << c.region.b << "\n";
    out << "region.r = " << c.region.r << "\n";
    out << "region.q = " << c.region.q << "\n";
    out << "region.centered = " << (c.region.centered ? "on" : "off") << "\n";
    out << "region.m = " << c.region.m << "\n";
    out << "region.n = " << c.region.n << "\n";
    out << "region3.p1 = " << c.region3.p1 << "\n";
    out << "region3.p2 = " << c.region3.p2 << "\n";
    out << "region3.p3 = " << c.region3.p3 << "\n";
    out << "region3.p4 = " << c.region3.p4 << "\n";
    out << "region3.q1 = " << c.region3.q1 << "\n";
    out << "weights.sigma = " << c.weights.sigma << "\n";
    out << "weights.delta1 = " << c.weights.delta1 << "\n";
    out << "weights.delta2 = " << c.weights.delta2 << "\n";
    out << "weights.delta3 = " << c.weights3.delta3 << "\n";
    out << "far.p = " << c.far.p_exp << "\n";
    out << "far.eps = " << c.far.eps << "\n";
    out << "far.axis = " << c.far_axis << "\n";
    out << "far.sign = " << c.far_sign << "\n";
    out << "diag.xi = " << (c.diag_xi ? "on" : "off") << "\n";
    out << "diag.local_mass = " << (c.diag_local_mass ? "on" : "off") << "\n";
    out << "diag.weighted = " << (c.diag_weighted ? "on" : "off") << "\n";
    out << "diag.far = " << (c.diag_far ? "on" : "off") << "\n";
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
    auto key = [](const RunConfig& c) {
        std::ostringstream os;
        save_config(c, os);
        return os.str();
    };
    return key(a) == key(b);
}

// Full validation before any compute: grid constraints, strict region
// validators, and the geometric guarantees the paper's setup needs.
inline void validate_config(const RunConfig& c) {
    const Grid g = c.grid();  // throws on bad n / box
    check_equation_grid(c.eq, g);
    if (!(c.t_start >= 2.0)) throw SchemaError("t_start", "runs start at t >= 2");
    if (!(c.t_end > c.t_start)) throw SchemaError("t_end", "must exceed t_start");
    if (!(c.dt > 0)) throw SchemaError("dt", "must be positive");

    const bool any_region_diag = c.diag_xi || c.diag_local_mass || c.diag_weighted;
    if (any_region_diag && c.dim == 2) {
        const auto rep = params::validate_2d(c.region);
        if (!rep.valid)
            throw SchemaError("region." + rep.failing()->name, "region parameters rejected");
        const auto box = params::region_omega(std::max(c.t_end, 2.0), c.region);
        for (int a = 0; a < 2; ++a)
            if (std::abs(box.center[a]) + box.half[a] > 0.5 * g.half_len[a])
                throw SchemaError("region", "Omega(t_end) leaves the central half-box");
    }
    if (any_region_diag && c.dim == 3) {
        params::RegionParams3D p{c.region3.p1, c.region3.p2, c.region3.p3, c.region3.p4};
        if (!params::validate_3d_reduced(p))
            throw SchemaError("region3", "3D scale exponents rejected");
    }
    if (c.diag_far) {
        const double theta_end = c.far.theta1(c.t_end);
        if (2.0 * theta_end > g.half_len[c.far_axis])
            throw SchemaError("far", "far region at t_end leaves the box");
    }
    if (c.ic_kind == IcKind::multisoliton && c.ic_speeds.size() != c.ic_centers.size())
        throw SchemaError("ic.centers", "need one center per speed");
}

// ---- checkpoints -------------------------------------------------------------

// Fixed little-endian layout:
//   magic "ZKLABCK1" | u32 version | u32 kind | u32 dim | u32 p
//   u32 n[3] | u32 reserved | f64 L[3] | f64 t | f64 dt | f64 speed
//   u64 seed | u64 step | payload: n0*n1*n2 f64, row major
enum class CheckpointKind : std::uint32_t { zk = 0, gkdv = 1, elliptic_ground_state = 2 };

struct CheckpointHeader {
    std::uint32_t version = 1;
    CheckpointKind kind = CheckpointKind::zk;
    std::uint32_t dim = 2;
    std::uint32_t p = 2;
    std::array<std::uint32_t, 3> n{1, 1, 1};
    std::array<double, 3> box{0, 0, 0};
    double t = 2.0;
    double dt = 0.0;
    double speed = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
};

namespace detail {
inline void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& b, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    put_u64(b, u);
}
inline std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(p[i])) << (8 * i);
    return v;
}
inline std::uint64_t get_u64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(p[i])) << (8 * i);
    return v;
}
inline double get_f64(const char* p) {
    const std::uint64_t u = get_u64(p);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}
}  // namespace detail

inline constexpr char kMagic[9] = "ZKLABCK1";

inline void write_checkpoint(const std::string& path, const CheckpointHeader& h,
                             const std::vector<double>& samples) {
    std::string buf;
    buf.reserve(104 + samples.size() * 8);
    buf.append(kMagic, 8);
    detail::put_u32(buf, h.version);
    detail::put_u32(buf, std::uint32_t(h.kind));
    detail::put_u32(buf, h.dim);
    detail::put_u32(buf, h.p);
    for (auto v : h.n) detail::put_u32(buf, v);
    detail::put_u32(buf, 0);
    for (auto v : h.box) detail::put_f64(buf, v);
    detail::put_f64(buf, h.t);
    detail::put_f64(buf, h.dt);
    detail::put_f64(buf, h.speed);
    detail::put_u64(buf, h.seed);
    detail::put_u64(buf, h.step);
    for (double v : samples) detail::put_f64(buf, v);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("checkpoint", "cannot open '" + path + "' for writing");
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw SchemaError("checkpoint", "write failed for '" + path + "'");
}

inline std::pair<CheckpointHeader, std::vector<double>> read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("checkpoint", "cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 104 || buf.compare(0, 8, kMagic, 8) != 0)
        throw SchemaError("checkpoint.magic", "not a checkpoint file: '" + path + "'");
    CheckpointHeader h;
    const char* p = buf.data() + 8;
    h.version = detail::get_u32(p);
    p += 4;
    if (h.version != 1) throw SchemaError("checkpoint.version", "unsupported version");
    h.kind = CheckpointKind(detail::get_u32(p));
    p += 4;
    h.dim = detail::get_u32(p);
    p += 4;
    h.p = detail::get_u32(p);
    p += 4;
    for (auto& v : h.n) {
        v = detail::get_u32(p);
        p += 4;
    }
    p += 4;  // reserved
    for (auto& v : h.box) {
        v = detail::get_f64(p);
        p += 8;
    }
    h.t = detail::get_f64(p);
    p += 8;
    h.dt = detail::get_f64(p);
    p += 8;
    h.speed = detail::get_f64(p);
    p += 8;
    h.seed = detail::get_u64(p);
    p += 8;
    h.step = detail::get_u64(p);
    p += 8;
    const std::size_t count = std::size_t(h.n[0]) * h.n[1] * h.n[2];
    if (buf.size() != 104 + count * 8)
        throw SchemaError("checkpoint.payload", "size mismatch in '" + path + "'");
    std::vector<double> samples(count);
    for (std::size_t i = 0; i < count; ++i) samples[i] = detail::get_f64(p + 8 * i);
    return {h, std::move(samples)};
}

inline CheckpointHeader header_for(const RunConfig& c, double t, std::uint64_t step) {
    CheckpointHeader h;
    h.kind = c.eq.eq == Equation::zk ? CheckpointKind::zk : CheckpointKind::gkdv;
    h.dim = std::uint32_t(c.dim);
    h.p = std::uint32_t(c.eq.p);
    for (int a = 0; a < 3; ++a) {
        h.n[a] = std::uint32_t(c.n[a]);
        h.box[a] = c.box[a];
    }
    h.t = t;
    h.dt = c.dt;
    h.seed = c.seed;
    h.step = step;
    return h;
}

// Field + header consistency against a config, with field-path errors.
inline void check_header(const CheckpointHeader& h, const RunConfig& c) {
    auto fail = [](const std::string& f, auto a, auto b) {
        std::ostringstream os;
        os << "checkpoint " << a << " != config " << b;
        throw SchemaError(f, os.str());
    };
    const CheckpointKind want =
        c.eq.eq == Equation::zk ? CheckpointKind::zk : CheckpointKind::gkdv;
    if (h.kind != want) fail("equation", int(h.kind), int(want));
    if (int(h.dim) != c.dim) fail("dim", h.dim, c.dim);
    if (c.eq.eq == Equation::gkdv && int(h.p) != c.eq.p) fail("p", h.p, c.eq.p);
    for (int a = 0; a < c.dim; ++a) {
        if (int(h.n[a]) != c.n[a]) fail("n[" + std::to_string(a) + "]", h.n[a], c.n[a]);
        if (h.box[a] != c.box[a]) fail("box[" + std::to_string(a) + "]", h.box[a], c.box[a]);
    }
    if (h.dt != c.dt) fail("dt", h.dt, c.dt);
}

inline Solver::State restart(const std::string& checkpoint_path, const RunConfig& c, Solver& s) {
    auto [h, samples] = read_checkpoint(checkpoint_path);
    check_header(h, c);
    Field f(c.grid());
    f.values() = std::move(samples);
    Solver::State st = s.make_state(f, std::max(h.t, 2.0));
    st.t = h.t;
    st.steps = h.step;
    return st;
}

}  // namespace persist
}  // namespace zklab

#endif
