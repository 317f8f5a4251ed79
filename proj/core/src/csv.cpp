#include "trackflow/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trackflow::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

std::ofstream create_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

}  // namespace

std::vector<track::Detection> parse_detections_csv(std::istream& in) {
    std::vector<track::Detection> dets;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (!f.empty() && f[0] == "frame") continue;  // header row
        }
        if (f.size() != 6 && f.size() != 10)
            throw std::runtime_error("detections csv: line " + std::to_string(lineno) +
                                     " has " + std::to_string(f.size()) + " fields");
        track::Detection d;
        d.frame = std::stoi(f[0]);
        if (d.frame < 0)
            throw std::runtime_error("detections csv: negative frame on line " +
                                     std::to_string(lineno));
        d.id = std::stoi(f[1]);
        d.pos = {std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
        d.confidence = std::stod(f[5]);
        if (f.size() == 10)
            d.bbox = BBox{std::stod(f[6]), std::stod(f[7]), std::stod(f[8]), std::stod(f[9])};
        dets.push_back(d);
    }
    return dets;
}

std::vector<track::Detection> read_detections_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_detections_csv(in);
}

void format_detections_csv(std::ostream& os, const std::vector<track::Detection>& dets) {
    const bool boxes = std::any_of(dets.begin(), dets.end(),
                                   [](const track::Detection& d) { return d.bbox.has_value(); });
    os << "frame,id,x,y,z,conf";
    if (boxes) os << ",bb_left,bb_top,bb_w,bb_h";
    os << "\n";
    for (const track::Detection& d : dets) {
        os << d.frame << ',' << d.id << ',' << fmt(d.pos.x) << ',' << fmt(d.pos.y) << ','
           << fmt(d.pos.z) << ',' << fmt(d.confidence);
        if (boxes) {
            const BBox b = d.bbox.value_or(BBox{});
            os << ',' << fmt(b.left) << ',' << fmt(b.top) << ',' << fmt(b.width) << ','
               << fmt(b.height);
        }
        os << "\n";
    }
}

void write_detections_csv(const std::string& path, const std::vector<track::Detection>& dets) {
    auto out = create_or_throw(path);
    format_detections_csv(out, dets);
}

std::vector<track::TrackedTrajectory> parse_trajectories_csv(std::istream& in) {
    std::vector<track::TrackedTrajectory> out;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (!f.empty() && f[0] == "track_id") continue;
        }
        if (f.size() != 6)
            throw std::runtime_error("trajectories csv: line " + std::to_string(lineno) +
                                     " has " + std::to_string(f.size()) + " fields");
        const int track_id = std::stoi(f[0]);
        track::Detection d;
        d.frame = std::stoi(f[1]);
        d.id = std::stoi(f[2]);
        d.pos = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5])};
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const track::TrackedTrajectory& t) { return t.id == track_id; });
        if (it == out.end()) {
            track::TrackedTrajectory t;
            t.id = track_id;
            out.push_back(t);
            it = out.end() - 1;
        }
        it->detections.push_back(d);
    }
    for (auto& t : out)
        std::sort(t.detections.begin(), t.detections.end(),
                  [](const track::Detection& a, const track::Detection& b) {
                      return a.frame < b.frame;
                  });
    return out;
}

std::vector<track::TrackedTrajectory> read_trajectories_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_trajectories_csv(in);
}

void format_trajectories_csv(std::ostream& os,
                             const std::vector<track::TrackedTrajectory>& trajectories) {
    os << "track_id,frame,det_id,x,y,z\n";
    for (const auto& t : trajectories)
        for (const auto& d : t.detections)
            os << t.id << ',' << d.frame << ',' << d.id << ',' << fmt(d.pos.x) << ','
               << fmt(d.pos.y) << ',' << fmt(d.pos.z) << "\n";
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<track::TrackedTrajectory>& trajectories) {
    auto out = create_or_throw(path);
    format_trajectories_csv(out, trajectories);
}

}  // namespace trackflow::io
