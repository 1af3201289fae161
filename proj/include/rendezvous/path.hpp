#pragma once

#include <vector>

#include "rendezvous/errors.hpp"

// UGV path as piecewise-constant curvature versus arc length, with exact
// closed-form heading and position lookup (no numeric quadrature).

namespace rendezvous {

struct PathSegment {
  double length;     // [m], > 0
  double curvature;  // [1/m], constant over the segment
};

struct PathPose {
  double sigma;  // curvature at s
  double chi;    // heading at s [rad], continuous across joints
  double x;      // inertial position [m]
  double y;
};

// Curvature model consumed by the dynamics and the friction constraint: the
// piecewise-constant segment curvature with short linear blends across the
// joints, so the optimizer never sees a cost cliff when a node's arc length
// crosses a curvature change. The blend integrates to the exact heading
// change, so chi matches the geometric heading outside the blend windows.
struct PathCurvature {
  double sigma;      // blended curvature at s
  double dsigma_ds;  // slope of the blend (zero outside blend windows)
  double chi;        // heading consistent with the blended curvature
};

class Path {
 public:
  Path() = default;
  Path(std::vector<PathSegment> segments, double x0, double y0, double chi0);

  // Curvature, heading and position at arc length s in [0, total_length].
  // Throws RangeError outside that range.
  PathPose lookup(double s) const;

  double heading(double s) const { return lookup(s).chi; }
  double curvature(double s) const;

  // Blended curvature and matching heading (see PathCurvature).
  PathCurvature smooth_curvature(double s) const;

  double total_length() const { return total_length_; }
  const std::vector<PathSegment>& segments() const { return segments_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double chi0() const { return chi0_; }

  // Appends a straight segment so the path covers at least required_length.
  // Returns true if an extension was added.
  bool extend_to(double required_length);

 private:
  int segment_index(double s) const;
  void rebuild_blends();

  struct Blend {
    double s_lo;        // blend window [s_lo, s_hi] around a joint
    double s_hi;
    double sigma_lo;    // curvature entering the window
    double slope;       // d sigma / d s inside the window
    double chi_lo;      // exact heading at s_lo (equals the blended heading)
  };

  std::vector<PathSegment> segments_;
  std::vector<double> seg_start_s_;    // arc length at segment entry
  std::vector<double> seg_start_chi_;  // heading at segment entry
  std::vector<double> seg_start_x_;
  std::vector<double> seg_start_y_;
  std::vector<Blend> blends_;
  double x0_{0.0}, y0_{0.0}, chi0_{0.0};
  double total_length_{0.0};
};

inline PathPose path_lookup(const Path& path, double s) { return path.lookup(s); }

}  // namespace rendezvous
