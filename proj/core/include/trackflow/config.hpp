#ifndef TRACKFLOW_CONFIG_HPP
#define TRACKFLOW_CONFIG_HPP

#include <cstdint>
#include <string>

#include "trackflow/social.hpp"
#include "trackflow/trackgraph.hpp"

namespace trackflow::config {

/// Run configuration: tracker/solver choice plus every cost and social
/// tunable, initialized to the reference defaults (vmax 7, fmax 10, bj 0.3,
/// bbmin 1.5, alpha 0.5, 6 iterations, batch 100, overlap 10).
struct RunConfig {
    track::CostParams cost;
    social::SocialParams social;
    std::string method = "sfm_gr";  // dist | sfm | sfm_gr | mlh | hungarian
    std::string solver = "ssp";     // ssp | lp
    double fps = 2.5;
    std::uint64_t seed = 0;

    double v_thresh() const { return cost.v_max * cost.frame_period; }
    void finalize() { cost.frame_period = 1.0 / fps; }
};

/// Applies one `key = value` setting; throws std::invalid_argument on an
/// unknown key or malformed value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value file, '#' comments, blank lines ignored.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig read_config_file(const std::string& path, RunConfig base = {});

}  // namespace trackflow::config

#endif
