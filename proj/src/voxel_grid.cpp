#include "asg/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asg {

VoxelGrid::VoxelGrid(const Vec3& origin, double resolution, int nx, int ny, int nz)
    : origin_(origin), resolution_(resolution), nx_(nx), ny_(ny), nz_(nz) {
  if (!(resolution > 0.0) || nx <= 0 || ny <= 0 || nz <= 0)
    throw std::invalid_argument("VoxelGrid: invalid dimensions");
  cells_.assign(static_cast<std::size_t>(cell_count()),
                static_cast<std::uint8_t>(CellState::unknown));
}

VoxelGrid VoxelGrid::covering(const Vec3& lo, const Vec3& hi, double resolution) {
  const auto span_cells = [resolution](double lo_v, double hi_v) {
    return std::max(1, static_cast<int>(std::ceil((hi_v - lo_v) / resolution - 1e-9)));
  };
  return VoxelGrid(lo, resolution, span_cells(lo.x, hi.x), span_cells(lo.y, hi.y),
                   span_cells(lo.z, hi.z));
}

void VoxelGrid::unpack_index(std::int32_t lin, int& ix, int& iy, int& iz) const {
  ix = static_cast<int>(lin % nx_);
  iy = static_cast<int>((lin / nx_) % ny_);
  iz = static_cast<int>(lin / (static_cast<std::int64_t>(nx_) * ny_));
}

bool VoxelGrid::point_in_bounds(const Vec3& p) const {
  return p.x >= origin_.x && p.y >= origin_.y && p.z >= origin_.z &&
         p.x <= origin_.x + nx_ * resolution_ && p.y <= origin_.y + ny_ * resolution_ &&
         p.z <= origin_.z + nz_ * resolution_;
}

void VoxelGrid::voxel_of(const Vec3& p, int& ix, int& iy, int& iz) const {
  ix = std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / resolution_)), 0, nx_ - 1);
  iy = std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / resolution_)), 0, ny_ - 1);
  iz = std::clamp(static_cast<int>(std::floor((p.z - origin_.z) / resolution_)), 0, nz_ - 1);
}

Vec3 VoxelGrid::voxel_center(std::int32_t lin) const {
  int ix, iy, iz;
  unpack_index(lin, ix, iy, iz);
  return {origin_.x + (ix + 0.5) * resolution_, origin_.y + (iy + 0.5) * resolution_,
          origin_.z + (iz + 0.5) * resolution_};
}

std::int64_t VoxelGrid::count(CellState s) const {
  return std::count(cells_.begin(), cells_.end(), static_cast<std::uint8_t>(s));
}

namespace {

struct DdaState {
  int ix, iy, iz;
  int step_x, step_y, step_z;
  double t_max_x, t_max_y, t_max_z;
  double t_delta_x, t_delta_y, t_delta_z;
};

constexpr double kInf = 1e300;

DdaState dda_init(const VoxelGrid& grid, const Vec3& p0, const Vec3& dir) {
  DdaState st;
  grid.voxel_of(p0, st.ix, st.iy, st.iz);
  const double res = grid.resolution();
  const Vec3 org = grid.origin();

  auto axis_init = [&](double p, double d, int idx, double o, int& step, double& t_max,
                       double& t_delta) {
    if (d > 0.0) {
      step = 1;
      t_max = (o + (idx + 1) * res - p) / d;
      t_delta = res / d;
    } else if (d < 0.0) {
      step = -1;
      t_max = (o + idx * res - p) / d;
      t_delta = -res / d;
    } else {
      step = 0;
      t_max = kInf;
      t_delta = kInf;
    }
  };
  axis_init(p0.x, dir.x, st.ix, org.x, st.step_x, st.t_max_x, st.t_delta_x);
  axis_init(p0.y, dir.y, st.iy, org.y, st.step_y, st.t_max_y, st.t_delta_y);
  axis_init(p0.z, dir.z, st.iz, org.z, st.step_z, st.t_max_z, st.t_delta_z);
  return st;
}

// Advances to the next voxel; returns the crossing parameter.
double dda_step(DdaState& st) {
  if (st.t_max_x < st.t_max_y) {
    if (st.t_max_x < st.t_max_z) {
      const double t = st.t_max_x;
      st.ix += st.step_x;
      st.t_max_x += st.t_delta_x;
      return t;
    }
  } else if (st.t_max_y < st.t_max_z) {
    const double t = st.t_max_y;
    st.iy += st.step_y;
    st.t_max_y += st.t_delta_y;
    return t;
  }
  const double t = st.t_max_z;
  st.iz += st.step_z;
  st.t_max_z += st.t_delta_z;
  return t;
}

}  // namespace

void integrate_scan(VoxelGrid& grid, const Vec3& sensor_origin,
                    std::span<const Vec3> points) {
  if (!grid.point_in_bounds(sensor_origin))
    throw std::invalid_argument("integrate_scan: sensor origin outside grid");

  int ox, oy, oz;
  grid.voxel_of(sensor_origin, ox, oy, oz);
  const std::int32_t origin_lin = grid.linear_index(ox, oy, oz);

  for (const Vec3& raw : points) {
    // Clip the segment to the grid volume; clipped rays carve free space only.
    Vec3 p = raw;
    bool endpoint_inside = true;
    Vec3 d = p - sensor_origin;
    const double full_len = d.norm();
    if (full_len == 0.0) {
      grid.mark_occupied(origin_lin);
      continue;
    }
    if (!grid.point_in_bounds(p)) {
      endpoint_inside = false;
      double t_exit = 1.0;
      const Vec3 lo = grid.origin();
      const Vec3 hi = {lo.x + grid.nx() * grid.resolution(),
                       lo.y + grid.ny() * grid.resolution(),
                       lo.z + grid.nz() * grid.resolution()};
      auto clip_axis = [&](double o, double dd, double lo_v, double hi_v) {
        if (dd > 0.0)
          t_exit = std::min(t_exit, (hi_v - o) / dd);
        else if (dd < 0.0)
          t_exit = std::min(t_exit, (lo_v - o) / dd);
      };
      clip_axis(sensor_origin.x, d.x, lo.x, hi.x);
      clip_axis(sensor_origin.y, d.y, lo.y, hi.y);
      clip_axis(sensor_origin.z, d.z, lo.z, hi.z);
      t_exit = std::max(t_exit, 0.0);
      p = sensor_origin + d * t_exit;
    }

    int ex, ey, ez;
    grid.voxel_of(p, ex, ey, ez);
    const std::int32_t end_lin = grid.linear_index(ex, ey, ez);
    if (end_lin == origin_lin) {
      if (endpoint_inside) grid.mark_occupied(end_lin);
      continue;
    }

    const Vec3 dir = d * (1.0 / full_len);
    const double clipped_len = (p - sensor_origin).norm();
    DdaState st = dda_init(grid, sensor_origin, dir);
    // Free every voxel strictly between the origin voxel and the endpoint voxel.
    for (int guard = 0; guard < 4 * (grid.nx() + grid.ny() + grid.nz()); ++guard) {
      const double t_cross = dda_step(st);
      if (t_cross >= clipped_len - 1e-12) break;
      if (!grid.index_in_bounds(st.ix, st.iy, st.iz)) break;
      const std::int32_t lin = grid.linear_index(st.ix, st.iy, st.iz);
      if (lin == end_lin) break;
      grid.mark_free(lin);
    }
    // Clipped rays traverse their boundary voxel instead of ending on a surface.
    if (endpoint_inside)
      grid.mark_occupied(end_lin);
    else
      grid.mark_free(end_lin);
  }
}

namespace {

// Reusable visit stamps so repeated traversals do not re-zero a full grid.
struct VisitScratch {
  std::vector<std::int32_t> stamp;
  std::int32_t epoch = 0;
};
thread_local VisitScratch g_scratch;

}  // namespace

void traverse_frustum(const VoxelGrid& grid, const Pose& pose,
                      const CameraModel& camera, const std::uint8_t* occupancy_override,
                      const std::function<void(std::int32_t, CellState)>& visit) {
  camera.validate();
  if (!grid.point_in_bounds(pose.translation))
    throw std::invalid_argument("traverse_frustum: pose outside grid bounds");

  VisitScratch& scratch = g_scratch;
  if (scratch.stamp.size() != static_cast<std::size_t>(grid.cell_count())) {
    scratch.stamp.assign(static_cast<std::size_t>(grid.cell_count()), 0);
    scratch.epoch = 0;
  }
  ++scratch.epoch;
  const std::int32_t epoch = scratch.epoch;

  const auto effective_state = [&](std::int32_t lin) {
    return occupancy_override != nullptr
               ? static_cast<CellState>(occupancy_override[static_cast<std::size_t>(lin)])
               : grid.state(lin);
  };

  const std::vector<Vec3> rays = camera.pixel_rays();
  for (const Vec3& ray_cam : rays) {
    const Vec3 dir = pose.rotation.apply(ray_cam);
    DdaState st = dda_init(grid, pose.translation, dir);
    double t_entry = 0.0;
    while (true) {
      if (!grid.index_in_bounds(st.ix, st.iy, st.iz)) break;
      if (t_entry > camera.max_range) break;
      const std::int32_t lin = grid.linear_index(st.ix, st.iy, st.iz);
      const CellState s = effective_state(lin);
      if (scratch.stamp[static_cast<std::size_t>(lin)] != epoch) {
        scratch.stamp[static_cast<std::size_t>(lin)] = epoch;
        visit(lin, s);
      }
      if (s == CellState::occupied) break;
      t_entry = dda_step(st);
    }
  }
}

std::vector<VisibleCell> visible_cells(const VoxelGrid& grid, const Pose& pose,
                                       const CameraModel& camera,
                                       const std::uint8_t* occupancy_override) {
  std::vector<VisibleCell> out;
  traverse_frustum(grid, pose, camera, occupancy_override,
                   [&](std::int32_t lin, CellState s) { out.push_back({lin, s}); });
  std::sort(out.begin(), out.end(),
            [](const VisibleCell& a, const VisibleCell& b) { return a.index < b.index; });
  return out;
}

}  // namespace asg
