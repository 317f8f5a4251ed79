#include "trackflow/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trackflow::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&] {
        try {
            return std::stod(value);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad numeric value for " + key);
        }
    };
    if (key == "vmax") cfg.cost.v_max = num();
    else if (key == "fmax") cfg.cost.f_max = static_cast<int>(num());
    else if (key == "bj") cfg.cost.b_j = num();
    else if (key == "bbmin") cfg.cost.bb_min = num();
    else if (key == "alpha") cfg.social.alpha = num();
    else if (key == "iterations") cfg.social.max_iterations = static_cast<int>(num());
    else if (key == "batch") cfg.social.batch_frames = static_cast<int>(num());
    else if (key == "overlap") cfg.social.batch_overlap = static_cast<int>(num());
    else if (key == "neighborhood") cfg.social.neighborhood = num();
    else if (key == "group_dist_mean") cfg.social.group_dist_mean = num();
    else if (key == "group_dist_std") cfg.social.group_dist_std = num();
    else if (key == "group_speed_std") cfg.social.group_speed_std = num();
    else if (key == "indiv_dist_mean") cfg.social.indiv_dist_mean = num();
    else if (key == "indiv_dist_std") cfg.social.indiv_dist_std = num();
    else if (key == "indiv_speed_std") cfg.social.indiv_speed_std = num();
    else if (key == "fps") cfg.fps = num();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
    else if (key == "method") cfg.method = value;
    else if (key == "solver") cfg.solver = value;
    else if (key == "entry_point") {
        // "x y" or "x y z"
        std::istringstream is(value);
        Vec3 p;
        if (!(is >> p.x >> p.y)) throw std::invalid_argument("config: bad entry_point");
        is >> p.z;
        cfg.cost.entry_points.push_back(p);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key = value");
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    base.finalize();
    return base;
}

RunConfig read_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

}  // namespace trackflow::config
