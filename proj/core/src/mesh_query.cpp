#include "tryon/recon/mesh_query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tryon {

namespace {

constexpr int kLeafSize = 8;

struct DVec {
  double x, y, z;
};

bool ray_hits_triangle(const DVec& o, const DVec& d, const Vec3& a, const Vec3& b,
                       const Vec3& c) {
  constexpr double eps = 1e-12;
  const DVec e1{b.x - a.x, b.y - a.y, b.z - a.z};
  const DVec e2{c.x - a.x, c.y - a.y, c.z - a.z};
  const DVec p{d.y * e2.z - d.z * e2.y, d.z * e2.x - d.x * e2.z,
               d.x * e2.y - d.y * e2.x};
  const double det = e1.x * p.x + e1.y * p.y + e1.z * p.z;
  if (std::fabs(det) < eps) return false;
  const double inv = 1.0 / det;
  const DVec tv{o.x - a.x, o.y - a.y, o.z - a.z};
  const double u = (tv.x * p.x + tv.y * p.y + tv.z * p.z) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const DVec q{tv.y * e1.z - tv.z * e1.y, tv.z * e1.x - tv.x * e1.z,
               tv.x * e1.y - tv.y * e1.x};
  const double v = (d.x * q.x + d.y * q.y + d.z * q.z) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  const double t = (e2.x * q.x + e2.y * q.y + e2.z * q.z) * inv;
  return t > eps;
}

bool ray_intersects_box(const Vec3& o, const Vec3& inv_dir, const Vec3& lo,
                        const Vec3& hi) {
  // Slab test; only forward hits matter (tmax >= max(tmin, 0)).
  float t0 = (lo.x - o.x) * inv_dir.x, t1 = (hi.x - o.x) * inv_dir.x;
  float tmin = std::min(t0, t1), tmax = std::max(t0, t1);
  t0 = (lo.y - o.y) * inv_dir.y;
  t1 = (hi.y - o.y) * inv_dir.y;
  tmin = std::max(tmin, std::min(t0, t1));
  tmax = std::min(tmax, std::max(t0, t1));
  t0 = (lo.z - o.z) * inv_dir.z;
  t1 = (hi.z - o.z) * inv_dir.z;
  tmin = std::max(tmin, std::min(t0, t1));
  tmax = std::min(tmax, std::max(t0, t1));
  return tmax >= std::max(tmin, 0.0f);
}

float box_distance_sq(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  auto axis = [](float v, float l, float h) {
    const float d = v < l ? l - v : (v > h ? v - h : 0.0f);
    return d * d;
  };
  return axis(p.x, lo.x, hi.x) + axis(p.y, lo.y, hi.y) + axis(p.z, lo.z, hi.z);
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const float d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const float d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const float vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const float d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const float vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const float va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const float denom = 1.0f / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

MeshQuery::MeshQuery(const TexturedMesh& mesh) : mesh_(&mesh) {
  const size_t n = mesh.triangles.size();
  tri_order_.resize(n);
  centroids_.resize(n);
  for (size_t t = 0; t < n; ++t) {
    tri_order_[t] = static_cast<std::uint32_t>(t);
    const auto& tri = mesh.triangles[t];
    centroids_[t] = (mesh.vertices[tri.a] + mesh.vertices[tri.b] + mesh.vertices[tri.c]) *
                    (1.0f / 3.0f);
  }
  nodes_.reserve(2 * n / kLeafSize + 2);
  if (n > 0) build(0, static_cast<int>(n), 0);
}

int MeshQuery::build(int first, int count, int depth) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  constexpr float inf = std::numeric_limits<float>::infinity();
  Vec3 lo{inf, inf, inf}, hi{-inf, -inf, -inf};
  for (int i = first; i < first + count; ++i) {
    const auto& tri = mesh_->triangles[tri_order_[static_cast<size_t>(i)]];
    for (std::uint32_t vi : {tri.a, tri.b, tri.c}) {
      const Vec3& v = mesh_->vertices[vi];
      lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y); lo.z = std::min(lo.z, v.z);
      hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y); hi.z = std::max(hi.z, v.z);
    }
  }
  nodes_[static_cast<size_t>(node_id)].lo = lo;
  nodes_[static_cast<size_t>(node_id)].hi = hi;

  if (count <= kLeafSize || depth > 40) {
    nodes_[static_cast<size_t>(node_id)].first = first;
    nodes_[static_cast<size_t>(node_id)].count = count;
    return node_id;
  }

  const Vec3 ext = hi - lo;
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  auto begin = tri_order_.begin() + first;
  std::nth_element(begin, begin + count / 2, begin + count,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const Vec3& ca = centroids_[a];
                     const Vec3& cb = centroids_[b];
                     return axis == 0 ? ca.x < cb.x : (axis == 1 ? ca.y < cb.y : ca.z < cb.z);
                   });
  const int mid = count / 2;
  const int l = build(first, mid, depth + 1);
  const int r = build(first + mid, count - mid, depth + 1);
  nodes_[static_cast<size_t>(node_id)].left = l;
  nodes_[static_cast<size_t>(node_id)].right = r;
  return node_id;
}

int MeshQuery::parity(const Vec3& origin, const Vec3& dir) const {
  if (nodes_.empty()) return 0;
  const Vec3 inv{1.0f / dir.x, 1.0f / dir.y, 1.0f / dir.z};
  const DVec o{origin.x, origin.y, origin.z};
  const DVec d{dir.x, dir.y, dir.z};
  int crossings = 0;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes_[static_cast<size_t>(stack[--top])];
    if (!ray_intersects_box(origin, inv, node.lo, node.hi)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& tri = mesh_->triangles[tri_order_[static_cast<size_t>(i)]];
        if (ray_hits_triangle(o, d, mesh_->vertices[tri.a], mesh_->vertices[tri.b],
                              mesh_->vertices[tri.c]))
          ++crossings;
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return crossings & 1;
}

bool MeshQuery::inside(const Vec3& p) const {
  // Fixed irrational-slope directions; a ray grazing an edge cannot flip the
  // majority on all three at once.
  static const Vec3 dirs[3] = {
      {0.5122630342f, 0.3077421566f, 0.8019728204f},
      {-0.7071812551f, 0.6098357202f, 0.3580981322f},
      {0.1893012997f, -0.8253731356f, 0.5319290271f},
  };
  int votes = 0;
  for (const auto& d : dirs) votes += parity(p, d);
  return votes >= 2;
}

MeshQuery::Nearest MeshQuery::nearest(const Vec3& p) const {
  Nearest best;
  best.distance = std::numeric_limits<float>::infinity();
  if (nodes_.empty()) return best;
  float best_sq = std::numeric_limits<float>::infinity();
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes_[static_cast<size_t>(stack[--top])];
    if (box_distance_sq(p, node.lo, node.hi) >= best_sq) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t t = tri_order_[static_cast<size_t>(i)];
        const auto& tri = mesh_->triangles[t];
        const Vec3 q = closest_point_on_triangle(p, mesh_->vertices[tri.a],
                                                 mesh_->vertices[tri.b],
                                                 mesh_->vertices[tri.c]);
        const float dsq = (p - q).dot(p - q);
        if (dsq < best_sq) {
          best_sq = dsq;
          best.triangle = t;
          best.point = q;
        }
      }
    } else {
      // Visit the nearer child first for earlier pruning.
      const float dl = box_distance_sq(p, nodes_[static_cast<size_t>(node.left)].lo,
                                       nodes_[static_cast<size_t>(node.left)].hi);
      const float dr = box_distance_sq(p, nodes_[static_cast<size_t>(node.right)].lo,
                                       nodes_[static_cast<size_t>(node.right)].hi);
      if (dl < dr) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

}  // namespace tryon
