#include "kerrcat/io.hpp"

#include "kerrcat/errors.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

namespace kerrcat {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + file.string() + " for writing");
    out << std::setprecision(17);
    return out;
}

std::ifstream open_input(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + file.string());
    return in;
}

// "# kerrcat <kind> v<version> key=value ..." -> key/value map; checks kind and version.
std::map<std::string, std::string> parse_preamble(const std::string& line, const std::string& kind,
                                                  const fs::path& file) {
    std::istringstream ss(line);
    std::string hash, tool, got_kind, version;
    ss >> hash >> tool >> got_kind >> version;
    if (hash != "#" || tool != "kerrcat" || got_kind != kind) {
        throw ConfigError(file.string() + ":1: expected '# kerrcat " + kind + " v" + std::to_string(kFormatVersion) +
                          "'");
    }
    if (version != "v" + std::to_string(kFormatVersion)) {
        throw ConfigError(file.string() + ":1: unsupported format version " + version);
    }
    std::map<std::string, std::string> fields;
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) fields[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return fields;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected, const fs::path& file, int line_no) {
    std::vector<double> values;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
            if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) throw 0;
        } catch (...) {
            throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
        }
    }
    if (values.size() != expected) {
        throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                          " columns, got " + std::to_string(values.size()));
    }
    return values;
}

nlohmann::json complex_pair(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex pair_to_complex(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError("state." + where + ": expected [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

// Diverging blue-white-red map on [-1, 1].
std::array<unsigned char, 3> color_for(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const auto lerp = [](double a, double b, double t) {
        return static_cast<unsigned char>(std::lround(a + (b - a) * t));
    };
    if (v >= 0.0) return {255, lerp(255, 30, v), lerp(255, 30, v)};
    const double t = -v;
    return {lerp(255, 30, t), lerp(255, 60, t), 255};
}

}  // namespace

void write_path_csv(const fs::path& file, const ControlPath& path) {
    auto out = open_output(file);
    out << "# kerrcat path v" << kFormatVersion << " total_penalty=" << path.total_penalty << " ds=" << path.ds
        << " basis_dim=" << path.basis_dim << "\n";
    out << "s,delta,beta,Q,theta\n";
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        const auto& p = path.points[i];
        out << path.arc[i] << ',' << p.detuning << ',' << p.drive << ',' << p.penalty << ',' << p.theta << '\n';
    }
}

void write_schedule_csv(const fs::path& file, const Schedule& schedule) {
    auto out = open_output(file);
    out << "# kerrcat schedule v" << kFormatVersion << " source=" << to_string(schedule.source())
        << " ramp_time=" << schedule.ramp_time() << "\n";
    out << "t,delta,beta\n";
    for (const auto& s : schedule.samples()) out << s.t << ',' << s.detuning << ',' << s.drive << '\n';
}

Schedule read_schedule_csv(const fs::path& file) {
    auto in = open_input(file);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(file.string() + ": empty file");
    const auto fields = parse_preamble(line, "schedule", file);
    if (!std::getline(in, line) || line.rfind("t,delta,beta", 0) != 0) {
        throw ConfigError(file.string() + ":2: expected header 't,delta,beta'");
    }
    std::vector<ScheduleSample> samples;
    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto row = parse_row(line, 3, file, line_no);
        samples.push_back({row[0], row[1], row[2]});
    }
    ScheduleSource source = ScheduleSource::Custom;
    double ramp = 0.0;
    if (auto it = fields.find("source"); it != fields.end()) source = schedule_source_from_string(it->second);
    if (auto it = fields.find("ramp_time"); it != fields.end()) ramp = std::stod(it->second);
    try {
        return Schedule(std::move(samples), source, ramp);
    } catch (const ConfigError& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

void write_trajectory_csv(const fs::path& file, const Trajectory& traj) {
    auto out = open_output(file);
    out << "# kerrcat trajectory v" << kFormatVersion << " dt=" << traj.dt << " steps=" << traj.steps << "\n";
    out << "t,fidelity,parity,n,trace\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << traj.times[i] << ',' << traj.fidelity[i] << ',' << traj.parity[i] << ',' << traj.photon_number[i]
            << ',' << traj.trace[i] << '\n';
    }
}

void write_wigner_csv(const fs::path& file, const WignerMap& map) {
    auto out = open_output(file);
    out << "# kerrcat wigner v" << kFormatVersion << " resolution=" << map.grid.resolution() << "\n";
    out << "x,p,W\n";
    for (int i = 0; i < map.grid.resolution(); ++i) {
        for (int j = 0; j < map.grid.resolution(); ++j) {
            out << map.grid.x(i) << ',' << map.grid.p(j) << ',' << map.values(i, j) << '\n';
        }
    }
}

void write_report_csv(const fs::path& file, const ProtocolReport& report) {
    auto out = open_output(file);
    out << "# kerrcat compare v" << kFormatVersion << " eval_time=" << report.eval_time << "\n";
    out << "t,fidelity_tpc,fidelity_spc,delta_tpc,delta_spc\n";
    for (std::size_t i = 0; i < report.times.size(); ++i) {
        out << report.times[i] << ',' << report.fidelity_tpc[i] << ',' << report.fidelity_spc[i] << ','
            << report.volume_tpc[i] << ',' << report.volume_spc[i] << '\n';
    }
}

nlohmann::json state_to_json(const QuantumState& state) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["dim"] = state.dim();
    if (state.is_pure()) {
        j["kind"] = "pure";
        auto amps = nlohmann::json::array();
        for (Eigen::Index k = 0; k < state.amplitudes().size(); ++k) amps.push_back(complex_pair(state.amplitudes()[k]));
        j["amplitudes"] = std::move(amps);
    } else {
        j["kind"] = "density";
        const Matrix& rho = state.density_matrix();
        auto rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            auto row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < rho.cols(); ++c) row.push_back(complex_pair(rho(r, c)));
            rows.push_back(std::move(row));
        }
        j["matrix"] = std::move(rows);
    }
    return j;
}

QuantumState state_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("state: expected a JSON object");
    if (!j.contains("format_version") || j["format_version"] != kFormatVersion) {
        throw ConfigError("state.format_version: expected " + std::to_string(kFormatVersion));
    }
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ConfigError("state.dim: expected integer");
    const int dim = j["dim"].get<int>();
    if (dim < 2) throw ConfigError("state.dim: must be >= 2");
    const std::string kind = j.value("kind", "");
    if (kind == "pure") {
        const auto& amps = j.at("amplitudes");
        if (!amps.is_array() || static_cast<int>(amps.size()) != dim) {
            throw ConfigError("state.amplitudes: expected " + std::to_string(dim) + " entries");
        }
        Vector v(dim);
        for (int k = 0; k < dim; ++k) v[k] = pair_to_complex(amps[k], "amplitudes[" + std::to_string(k) + "]");
        return QuantumState::pure(std::move(v));
    }
    if (kind == "density") {
        const auto& rows = j.at("matrix");
        if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
            throw ConfigError("state.matrix: expected " + std::to_string(dim) + " rows");
        }
        Matrix rho(dim, dim);
        for (int r = 0; r < dim; ++r) {
            if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != dim) {
                throw ConfigError("state.matrix[" + std::to_string(r) + "]: expected " + std::to_string(dim) +
                                  " entries");
            }
            for (int c = 0; c < dim; ++c) {
                rho(r, c) = pair_to_complex(rows[r][c], "matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]");
            }
        }
        return QuantumState::density(std::move(rho));
    }
    throw ConfigError("state.kind: expected \"pure\" or \"density\"");
}

void write_state_json(const fs::path& file, const QuantumState& state) { write_json(file, state_to_json(state)); }

QuantumState read_state_json(const fs::path& file) {
    try {
        return state_from_json(read_json(file));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

void write_heatmap_png(const fs::path& file, const WignerMap& map, double scale) {
    if (!(scale > 0.0)) throw ConfigError("heatmap scale must be > 0");
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    const int n = map.grid.resolution();

    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(file.string().c_str(), "wb"), &std::fclose);
    if (!fp) throw ConfigError("cannot open " + file.string() + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw NumericalError("libpng initialization failed");
    }
    std::vector<png_byte> rows(static_cast<std::size_t>(n) * n * 3);
    for (int r = 0; r < n; ++r) {
        const int j = n - 1 - r;  // p increases upward
        for (int i = 0; i < n; ++i) {
            const auto c = color_for(map.values(i, j) / scale);
            std::copy(c.begin(), c.end(), rows.begin() + (static_cast<std::size_t>(r) * n + i) * 3);
        }
    }
    std::vector<png_bytep> row_ptrs(n);
    for (int r = 0; r < n; ++r) row_ptrs[r] = rows.data() + static_cast<std::size_t>(r) * n * 3;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw NumericalError("libpng failed writing " + file.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, n, n, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::string sha256_file(const fs::path& file) {
    auto in = open_input(file);
    std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw NumericalError("sha256: init failed");
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::ostringstream hex;
    for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
    return hex.str();
}

void write_json(const fs::path& file, const nlohmann::json& j) {
    auto out = open_output(file);
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& file) {
    auto in = open_input(file);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace kerrcat
