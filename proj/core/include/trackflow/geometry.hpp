#ifndef TRACKFLOW_GEOMETRY_HPP
#define TRACKFLOW_GEOMETRY_HPP

#include <cmath>

namespace trackflow {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// 2D axis-aligned box, used only for metric overlap when detections carry one.
struct BBox {
    double left = 0.0, top = 0.0, width = 0.0, height = 0.0;

    double area() const { return width > 0 && height > 0 ? width * height : 0.0; }
};

inline double iou(const BBox& a, const BBox& b) {
    const double x1 = std::max(a.left, b.left);
    const double y1 = std::max(a.top, b.top);
    const double x2 = std::min(a.left + a.width, b.left + b.width);
    const double y2 = std::min(a.top + a.height, b.top + b.height);
    const double inter = std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace trackflow

#endif
