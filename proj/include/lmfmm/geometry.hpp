#pragma once

#include <cmath>
#include <complex>

namespace lmfmm {

using complexd = std::complex<double>;

struct Point2 {
	double x = 0.0;
	double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }

struct Polar {
	double r;
	double theta;
};

inline Polar to_polar(Point2 v) { return {std::hypot(v.x, v.y), std::atan2(v.y, v.x)}; }

inline double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

} // namespace lmfmm
