#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "asg/geometry.hpp"

namespace asg {

enum class CellState : std::uint8_t { unknown = 0, free = 1, occupied = 2 };

// Dense occupancy grid over an axis-aligned volume. Cells start unknown;
// transitions are unknown->free, unknown->occupied and free->occupied only.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, double resolution, int nx, int ny, int nz);
  static VoxelGrid covering(const Vec3& lo, const Vec3& hi, double resolution);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::int64_t cell_count() const {
    return static_cast<std::int64_t>(nx_) * ny_ * nz_;
  }

  std::int32_t linear_index(int ix, int iy, int iz) const {
    return static_cast<std::int32_t>((static_cast<std::int64_t>(iz) * ny_ + iy) * nx_ + ix);
  }
  void unpack_index(std::int32_t lin, int& ix, int& iy, int& iz) const;
  bool index_in_bounds(int ix, int iy, int iz) const {
    return ix >= 0 && iy >= 0 && iz >= 0 && ix < nx_ && iy < ny_ && iz < nz_;
  }
  bool point_in_bounds(const Vec3& p) const;
  // Voxel containing p; indices clamped into range for boundary points.
  void voxel_of(const Vec3& p, int& ix, int& iy, int& iz) const;
  Vec3 voxel_center(std::int32_t lin) const;

  CellState state(std::int32_t lin) const { return static_cast<CellState>(cells_[static_cast<std::size_t>(lin)]); }
  void mark_free(std::int32_t lin) {
    auto& c = cells_[static_cast<std::size_t>(lin)];
    if (c != static_cast<std::uint8_t>(CellState::occupied))
      c = static_cast<std::uint8_t>(CellState::free);
  }
  void mark_occupied(std::int32_t lin) {
    cells_[static_cast<std::size_t>(lin)] = static_cast<std::uint8_t>(CellState::occupied);
  }

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::int64_t count(CellState s) const;

 private:
  Vec3 origin_;
  double resolution_ = 0.10;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Carves free space along each sensor ray and marks endpoint voxels occupied.
// Rays to points outside the grid are clipped at the boundary and carve free
// space only. Single-writer operation.
void integrate_scan(VoxelGrid& grid, const Vec3& sensor_origin,
                    std::span<const Vec3> points);

struct VisibleCell {
  std::int32_t index;
  CellState state;
};

// Per-pixel ray traversal from the camera pose: each ray reports voxels until
// the first occupied cell (inclusive) under the effective occupancy, within
// max_range. Unknown cells do not block. The result is deduplicated and sorted
// by linear index. `occupancy_override`, when non-null, must have cell_count()
// entries and replaces the grid's own states.
std::vector<VisibleCell> visible_cells(const VoxelGrid& grid, const Pose& pose,
                                       const CameraModel& camera,
                                       const std::uint8_t* occupancy_override = nullptr);

// Callback form used by the planners; `visit` is invoked once per distinct
// voxel in first-visit order. Scratch buffers are reused per thread.
void traverse_frustum(const VoxelGrid& grid, const Pose& pose,
                      const CameraModel& camera, const std::uint8_t* occupancy_override,
                      const std::function<void(std::int32_t, CellState)>& visit);

}  // namespace asg
