#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stig/geo.hpp"
#include "stig/trail.hpp"

namespace stig {

/// Relative threshold: a cell is hot when its trail strictly exceeds
/// tau * max(trail) of the same snapshot. Regions smaller than min_area
/// cells are discarded.
struct ThresholdSpec {
  double tau{};
  int min_area{1};

  void validate() const;
};

/// Dense binary cell mask over a grid of fixed shape.
class CellMask {
 public:
  CellMask() = default;
  CellMask(int n_rows, int n_cols);

  int n_rows() const { return rows_; }
  int n_cols() const { return cols_; }

  bool test(int row, int col) const { return bits_[index(row, col)] != 0; }
  bool test(CellIndex c) const { return test(c.row, c.col); }
  void set(int row, int col, bool value = true) { bits_[index(row, col)] = value ? 1 : 0; }
  void set(CellIndex c, bool value = true) { set(c.row, c.col, value); }

  std::int64_t count() const;
  bool empty() const { return count() == 0; }
  bool same_shape(const CellMask& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// All set cells in row-major order.
  std::vector<CellIndex> cells() const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool operator==(const CellMask& other) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  int rows_{0};
  int cols_{0};
  std::vector<std::uint8_t> bits_;
};

/// One 8-connected component of a mask.
struct Region {
  int label{};
  std::vector<CellIndex> cells;  // row-major order

  int area() const { return static_cast<int>(cells.size()); }
};

/// Thresholded snapshot: mask plus its labeled regions. Every set mask cell
/// belongs to exactly one region.
struct HotspotSet {
  CellMask mask;
  std::vector<Region> regions;
};

/// 8-connected components with area >= min_area, labeled 1..n in row-major
/// discovery order.
std::vector<Region> label_regions(const CellMask& mask, int min_area = 1);

/// Relative thresholding of a trail snapshot, then labeling. Components below
/// min_area are dropped from the mask as well. An all-zero trail yields an
/// empty set.
HotspotSet extract(const TrailField& trail, const ThresholdSpec& th);

/// |A n B| / |A u B| over mask cells. Two empty masks are identical, so the
/// ratio is defined as 1. Throws std::invalid_argument on shape mismatch.
double jaccard(const CellMask& a, const CellMask& b);
double jaccard(const HotspotSet& a, const HotspotSet& b);

/// Cell-wise AND. Throws std::invalid_argument on an empty list or mixed shapes.
CellMask intersect_masks(std::span<const CellMask> masks);

/// Cell-wise OR. Same preconditions as intersect_masks.
CellMask union_masks(std::span<const CellMask> masks);

/// Rebuilds a mask from region cell lists.
CellMask mask_from_regions(std::span<const Region> regions, int n_rows, int n_cols);

}  // namespace stig
