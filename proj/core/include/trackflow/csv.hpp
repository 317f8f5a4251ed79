#ifndef TRACKFLOW_CSV_HPP
#define TRACKFLOW_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "trackflow/trackgraph.hpp"

namespace trackflow::io {

/// Detection CSV: header frame,id,x,y,z,conf[,bb_left,bb_top,bb_w,bb_h].
std::vector<track::Detection> parse_detections_csv(std::istream& in);
std::vector<track::Detection> read_detections_csv(const std::string& path);
void format_detections_csv(std::ostream& os, const std::vector<track::Detection>& dets);
void write_detections_csv(const std::string& path, const std::vector<track::Detection>& dets);

/// Trajectory CSV: header track_id,frame,det_id,x,y,z. Ground-truth files use
/// the same schema.
std::vector<track::TrackedTrajectory> parse_trajectories_csv(std::istream& in);
std::vector<track::TrackedTrajectory> read_trajectories_csv(const std::string& path);
void format_trajectories_csv(std::ostream& os,
                             const std::vector<track::TrackedTrajectory>& trajectories);
void write_trajectories_csv(const std::string& path,
                            const std::vector<track::TrackedTrajectory>& trajectories);

}  // namespace trackflow::io

#endif
