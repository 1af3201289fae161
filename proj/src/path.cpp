#include "rendezvous/path.hpp"

#include <cmath>
#include <sstream>

namespace rendezvous {

namespace {

// Pose advanced by ds from (x, y, chi) along constant curvature sigma.
void advance(double sigma, double ds, double& x, double& y, double& chi) {
  if (sigma == 0.0) {
    x += ds * std::cos(chi);
    y += ds * std::sin(chi);
  } else {
    const double chi1 = chi + sigma * ds;
    x += (std::sin(chi1) - std::sin(chi)) / sigma;
    y += (std::cos(chi) - std::cos(chi1)) / sigma;
    chi = chi1;
  }
}

}  // namespace

Path::Path(std::vector<PathSegment> segments, double x0, double y0, double chi0)
    : segments_(std::move(segments)), x0_(x0), y0_(y0), chi0_(chi0) {
  double s = 0.0, chi = chi0_, x = x0_, y = y0_;
  seg_start_s_.reserve(segments_.size());
  seg_start_chi_.reserve(segments_.size());
  for (const PathSegment& seg : segments_) {
    if (!(seg.length > 0.0)) {
      throw ValidationError("path.segments.length: must be positive");
    }
    seg_start_s_.push_back(s);
    seg_start_chi_.push_back(chi);
    seg_start_x_.push_back(x);
    seg_start_y_.push_back(y);
    advance(seg.curvature, seg.length, x, y, chi);
    s += seg.length;
  }
  total_length_ = s;
  rebuild_blends();
}

void Path::rebuild_blends() {
  constexpr double kHalfWidth = 6.0;  // [m] per side of a joint
  blends_.clear();
  for (size_t i = 0; i + 1 < segments_.size(); ++i) {
    const double ds = segments_[i + 1].curvature - segments_[i].curvature;
    if (ds == 0.0) continue;
    const double w = std::min({kHalfWidth, 0.5 * segments_[i].length,
                               0.5 * segments_[i + 1].length});
    Blend b;
    b.s_lo = seg_start_s_[i + 1] - w;
    b.s_hi = seg_start_s_[i + 1] + w;
    b.sigma_lo = segments_[i].curvature;
    b.slope = ds / (2.0 * w);
    b.chi_lo = seg_start_chi_[i + 1] - segments_[i].curvature * w;
    blends_.push_back(b);
  }
}

int Path::segment_index(double s) const {
  if (segments_.empty() || s < 0.0 || s > total_length_) {
    std::ostringstream msg;
    msg << "path lookup at s = " << s << " outside [0, " << total_length_ << "]";
    throw RangeError(msg.str());
  }
  // The last joint belongs to the trailing segment.
  int lo = 0, hi = static_cast<int>(segments_.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (seg_start_s_[mid] <= s) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

PathPose Path::lookup(double s) const {
  const int i = segment_index(s);
  const double ds = s - seg_start_s_[i];
  double x = seg_start_x_[i];
  double y = seg_start_y_[i];
  double chi = seg_start_chi_[i];
  advance(segments_[i].curvature, ds, x, y, chi);
  return {segments_[i].curvature, chi, x, y};
}

double Path::curvature(double s) const { return segments_[segment_index(s)].curvature; }

PathCurvature Path::smooth_curvature(double s) const {
  const int i = segment_index(s);
  for (const Blend& b : blends_) {
    if (s >= b.s_lo && s <= b.s_hi) {
      const double d = s - b.s_lo;
      return {b.sigma_lo + b.slope * d, b.slope,
              b.chi_lo + b.sigma_lo * d + 0.5 * b.slope * d * d};
    }
  }
  // Outside every blend window the blended heading equals the exact one
  // (each blend integrates to the exact heading change).
  return {segments_[i].curvature, 0.0,
          seg_start_chi_[i] + segments_[i].curvature * (s - seg_start_s_[i])};
}

bool Path::extend_to(double required_length) {
  if (required_length <= total_length_) return false;
  const double extra = required_length - total_length_;
  const PathPose end = lookup(total_length_);
  seg_start_s_.push_back(total_length_);
  seg_start_chi_.push_back(end.chi);
  seg_start_x_.push_back(end.x);
  seg_start_y_.push_back(end.y);
  segments_.push_back({extra, 0.0});
  total_length_ += extra;
  rebuild_blends();
  return true;
}

}  // namespace rendezvous
