#include "enscade/manifest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "enscade/snapshot_io.hpp"
#include "enscade/version.hpp"

namespace enscade {

namespace {
using ordered_json = nlohmann::ordered_json;
}

void RunManifest::save(const std::filesystem::path& path) const {
    ordered_json j;
    j["version"] = version;
    j["config"] = config.to_text();
    j["times"] = times;
    ordered_json inv = ordered_json::array();
    for (std::size_t i = 0; i < files.size(); ++i)
        inv.push_back({{"path", files[i]}, {"checksum", checksums[i]}});
    j["files"] = inv;
    j["wall_seconds"] = wall_seconds;
    std::ofstream out(path);
    if (!out) throw FieldError("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FieldError("cannot open manifest: " + path.string());
    ordered_json j;
    in >> j;
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    {
        std::istringstream cfg(j.at("config").get<std::string>());
        std::string line;
        while (std::getline(cfg, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r\n");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t\r\n");
                return s.substr(b, e - b + 1);
            };
            m.config.apply_override(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    m.times = j.at("times").get<std::vector<double>>();
    for (const auto& f : j.at("files")) {
        m.files.push_back(f.at("path").get<std::string>());
        m.checksums.push_back(f.at("checksum").get<std::string>());
    }
    m.wall_seconds = j.value("wall_seconds", 0.0);
    return m;
}

Trajectory load_trajectory(const std::filesystem::path& manifest_path) {
    const RunManifest m = RunManifest::load(manifest_path);
    const std::filesystem::path dir = manifest_path.parent_path();
    Trajectory traj;
    traj.grid = Grid3::make(m.config.n, m.config.box_length);
    traj.config.viscosity = m.config.viscosity;
    traj.config.dt = m.config.dt;
    traj.config.dealias = m.config.dealias;
    traj.config.nonlinear = m.config.nonlinear;
    traj.T = m.config.total_time;
    if (m.files.size() != m.times.size())
        throw FieldError("manifest inventory does not match its time list");
    for (std::size_t i = 0; i < m.files.size(); ++i) {
        const std::filesystem::path p = dir / m.files[i];
        const std::string sum = file_checksum(p);
        if (sum != m.checksums[i])
            throw FieldError("checksum mismatch for " + p.string() + " (got " + sum +
                             ", manifest has " + m.checksums[i] + ")");
        double t = 0.0;
        VectorField3 snap = read_vector_snapshot(p, &t);
        require_same_grid(snap.grid, traj.grid, "trajectory snapshot");
        traj.times.push_back(m.times[i]);
        traj.snapshots.push_back(std::move(snap));
    }
    traj.validate();
    return traj;
}

}  // namespace enscade
