#include "ncv/hull.hpp"

#include "ncv/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace ncv {

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

class IncrementalHull {
 public:
  IncrementalHull(std::span<const Eigen::Vector3d> pts, double eps) : p_(pts), eps_(eps) {}

  bool build();
  std::vector<std::array<std::size_t, 3>> lower_facets() const;
  // Plane through the seed triangle when all points are coplanar.
  Eigen::Vector3d seed_normal() const { return seed_normal_; }

 private:
  struct Facet {
    std::array<std::size_t, 3> v;
    Eigen::Vector3d n;
    double d;
    bool alive;
  };

  static std::uint64_t key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  double dist(const Facet& f, std::size_t i) const { return f.n.dot(p_[i]) - f.d; }
  void add_facet(std::size_t a, std::size_t b, std::size_t c);
  void add_oriented(std::size_t a, std::size_t b, std::size_t c, const Eigen::Vector3d& inside);
  bool insert(std::size_t i);

  std::span<const Eigen::Vector3d> p_;
  double eps_;
  std::vector<Facet> facets_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
  Eigen::Vector3d seed_normal_ = Eigen::Vector3d::Zero();
};

void IncrementalHull::add_facet(std::size_t a, std::size_t b, std::size_t c) {
  Eigen::Vector3d n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
  const double len = n.norm();
  if (len > 0.0) n /= len;
  const std::size_t id = facets_.size();
  facets_.push_back(Facet{{a, b, c}, n, n.dot(p_[a]), true});
  edges_[key(a, b)] = id;
  edges_[key(b, c)] = id;
  edges_[key(c, a)] = id;
}

void IncrementalHull::add_oriented(std::size_t a, std::size_t b, std::size_t c,
                                   const Eigen::Vector3d& inside) {
  const Eigen::Vector3d n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
  if (n.dot(inside - p_[a]) > 0.0) std::swap(b, c);
  add_facet(a, b, c);
}

bool IncrementalHull::build() {
  const std::size_t n = p_.size();
  if (n < 4) return false;
  // Seed simplex from extreme points.
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (p_[i].x() < p_[i0].x() || (p_[i].x() == p_[i0].x() && p_[i].y() < p_[i0].y())) i0 = i;
  }
  std::size_t i1 = i0;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (p_[i] - p_[i0]).squaredNorm();
    if (d > best) best = d, i1 = i;
  }
  if (i1 == i0) return false;
  const Eigen::Vector3d dir = (p_[i1] - p_[i0]).normalized();
  std::size_t i2 = i0;
  best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (p_[i] - p_[i0]).cross(dir).norm();
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps_) return false;
  seed_normal_ = (p_[i1] - p_[i0]).cross(p_[i2] - p_[i0]).normalized();
  std::size_t i3 = i0;
  best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(seed_normal_.dot(p_[i] - p_[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps_) return false;

  const Eigen::Vector3d centroid = (p_[i0] + p_[i1] + p_[i2] + p_[i3]) / 4.0;
  add_oriented(i0, i1, i2, centroid);
  add_oriented(i0, i1, i3, centroid);
  add_oriented(i0, i2, i3, centroid);
  add_oriented(i1, i2, i3, centroid);

  // Fixed-seed insertion order; keeps expected work low on structured grids.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (std::size_t k = n; k > 1; --k) {
    state ^= state << 13, state ^= state >> 7, state ^= state << 17;
    std::swap(order[k - 1], order[state % k]);
  }
  for (std::size_t i : order) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    if (!insert(i)) {
      throw Error(ErrorKind::kDegenerateInput, "convex hull lost consistency (near-degenerate input)");
    }
  }
  return true;
}

bool IncrementalHull::insert(std::size_t i) {
  std::vector<std::size_t> visible;
  std::vector<char> is_visible(facets_.size(), 0);
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    if (facets_[f].alive && dist(facets_[f], i) > eps_) {
      visible.push_back(f);
      is_visible[f] = 1;
    }
  }
  if (visible.empty()) return true;

  std::vector<std::array<std::size_t, 2>> horizon;
  for (std::size_t f : visible) {
    const auto& v = facets_[f].v;
    for (int e = 0; e < 3; ++e) {
      const std::size_t a = v[static_cast<std::size_t>(e)];
      const std::size_t b = v[static_cast<std::size_t>((e + 1) % 3)];
      auto it = edges_.find(key(b, a));
      if (it == edges_.end()) return false;
      if (!is_visible[it->second]) horizon.push_back({a, b});
    }
  }
  for (std::size_t f : visible) {
    facets_[f].alive = false;
    const auto& v = facets_[f].v;
    for (int e = 0; e < 3; ++e) {
      edges_.erase(key(v[static_cast<std::size_t>(e)], v[static_cast<std::size_t>((e + 1) % 3)]));
    }
  }
  for (const auto& h : horizon) {
    if (edges_.count(key(h[1], i)) || edges_.count(key(i, h[0]))) return false;
    add_facet(h[0], h[1], i);
  }
  return true;
}

std::vector<std::array<std::size_t, 3>> IncrementalHull::lower_facets() const {
  std::vector<std::array<std::size_t, 3>> out;
  for (const auto& f : facets_) {
    if (!f.alive || f.n.z() >= -1e-9) continue;
    // Outward normal points down, so the xy projection is clockwise; flip it.
    out.push_back({f.v[0], f.v[2], f.v[1]});
  }
  return out;
}

}  // namespace

std::vector<std::size_t> lower_chain(std::span<const Eigen::Vector2d> sorted) {
  std::vector<std::size_t> h;
  h.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    while (h.size() >= 2 && cross(sorted[h[h.size() - 2]], sorted[h.back()], sorted[i]) <= 0.0) {
      h.pop_back();
    }
    h.push_back(i);
  }
  return h;
}

std::vector<std::size_t> convex_hull_2d(std::span<const Eigen::Vector2d> pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](std::size_t a, std::size_t b) { return pts[a] == pts[b]; }),
            idx.end());
  if (idx.size() < 3) return idx;
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= 0.0) --k;
    h[k++] = i;
  }
  const std::size_t lower = k + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (k >= lower && cross(pts[h[k - 2]], pts[h[k - 1]], pts[*it]) <= 0.0) --k;
    h[k++] = *it;
  }
  h.resize(k - 1);
  return h;
}

std::vector<std::array<std::size_t, 3>> lower_hull_3d(std::span<const Eigen::Vector3d> pts) {
  std::vector<Eigen::Vector2d> xy;
  xy.reserve(pts.size());
  double scale = 1.0;
  for (const auto& p : pts) {
    xy.emplace_back(p.x(), p.y());
    scale = std::max({scale, std::abs(p.x()), std::abs(p.y()), std::abs(p.z())});
  }
  const std::vector<std::size_t> outline = convex_hull_2d(xy);
  if (outline.size() < 3) {
    throw Error(ErrorKind::kDegenerateInput, "finite samples are collinear in the plane");
  }

  IncrementalHull hull(pts, 1e-11 * scale);
  if (hull.build()) return hull.lower_facets();

  // All lifted points are coplanar: one affine piece over the planar outline.
  std::vector<std::array<std::size_t, 3>> fan;
  for (std::size_t k = 1; k + 1 < outline.size(); ++k) {
    fan.push_back({outline[0], outline[k], outline[k + 1]});
  }
  return fan;
}

}  // namespace ncv
