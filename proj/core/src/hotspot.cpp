#include "stig/hotspot.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace stig {

void ThresholdSpec::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0,1]");
  if (min_area < 1) throw std::invalid_argument("min_area must be >= 1");
}

CellMask::CellMask(int n_rows, int n_cols)
    : rows_(n_rows), cols_(n_cols),
      bits_(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols), 0) {
  if (n_rows < 0 || n_cols < 0) throw std::invalid_argument("negative mask shape");
}

std::int64_t CellMask::count() const {
  return std::accumulate(bits_.begin(), bits_.end(), std::int64_t{0});
}

std::vector<CellIndex> CellMask::cells() const {
  std::vector<CellIndex> out;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (test(r, c)) out.push_back({r, c});
    }
  }
  return out;
}

std::vector<Region> label_regions(const CellMask& mask, int min_area) {
  if (min_area < 1) throw std::invalid_argument("min_area must be >= 1");
  const int rows = mask.n_rows();
  const int cols = mask.n_cols();
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(rows) * cols, 0);
  std::vector<Region> regions;
  std::vector<CellIndex> stack;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
      if (!mask.test(r, c) || visited[idx]) continue;

      Region region;
      stack.assign(1, CellIndex{r, c});
      visited[idx] = 1;
      while (!stack.empty()) {
        const CellIndex cur = stack.back();
        stack.pop_back();
        region.cells.push_back(cur);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = cur.row + dr;
            const int nc = cur.col + dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            const std::size_t nidx = static_cast<std::size_t>(nr) * cols + nc;
            if (!mask.test(nr, nc) || visited[nidx]) continue;
            visited[nidx] = 1;
            stack.push_back({nr, nc});
          }
        }
      }
      if (region.area() >= min_area) {
        region.label = static_cast<int>(regions.size()) + 1;
        std::sort(region.cells.begin(), region.cells.end());
        regions.push_back(std::move(region));
      }
    }
  }
  return regions;
}

HotspotSet extract(const TrailField& trail, const ThresholdSpec& th) {
  th.validate();
  const GridSpec& spec = trail.spec();
  CellMask raw(spec.n_rows, spec.n_cols);

  const TrailUnit max = trail.max_value();
  if (max > 0) {
    // Strict inequality: at tau == 1 the mask is always empty.
    const double cutoff = th.tau * static_cast<double>(max);
    for (int r = 0; r < spec.n_rows; ++r) {
      for (int c = 0; c < spec.n_cols; ++c) {
        if (static_cast<double>(trail.at(r, c)) > cutoff) raw.set(r, c);
      }
    }
  }

  HotspotSet out;
  out.regions = label_regions(raw, th.min_area);
  out.mask = mask_from_regions(out.regions, spec.n_rows, spec.n_cols);
  return out;
}

double jaccard(const CellMask& a, const CellMask& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("jaccard: mask shapes differ");
  std::int64_t inter = 0;
  std::int64_t uni = 0;
  const auto& ba = a.bits();
  const auto& bb = b.bits();
  for (std::size_t i = 0; i < ba.size(); ++i) {
    inter += (ba[i] & bb[i]);
    uni += (ba[i] | bb[i]);
  }
  if (uni == 0) return 1.0;  // two empty hotspot sets are identical
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard(const HotspotSet& a, const HotspotSet& b) { return jaccard(a.mask, b.mask); }

CellMask intersect_masks(std::span<const CellMask> masks) {
  if (masks.empty()) throw std::invalid_argument("intersect_masks: empty mask list");
  CellMask out = masks.front();
  for (std::size_t m = 1; m < masks.size(); ++m) {
    if (!out.same_shape(masks[m])) throw std::invalid_argument("intersect_masks: shape mismatch");
    for (int r = 0; r < out.n_rows(); ++r) {
      for (int c = 0; c < out.n_cols(); ++c) {
        if (out.test(r, c) && !masks[m].test(r, c)) out.set(r, c, false);
      }
    }
  }
  return out;
}

CellMask union_masks(std::span<const CellMask> masks) {
  if (masks.empty()) throw std::invalid_argument("union_masks: empty mask list");
  CellMask out = masks.front();
  for (std::size_t m = 1; m < masks.size(); ++m) {
    if (!out.same_shape(masks[m])) throw std::invalid_argument("union_masks: shape mismatch");
    for (int r = 0; r < out.n_rows(); ++r) {
      for (int c = 0; c < out.n_cols(); ++c) {
        if (masks[m].test(r, c)) out.set(r, c);
      }
    }
  }
  return out;
}

CellMask mask_from_regions(std::span<const Region> regions, int n_rows, int n_cols) {
  CellMask mask(n_rows, n_cols);
  for (const Region& region : regions) {
    for (const CellIndex& cell : region.cells) mask.set(cell);
  }
  return mask;
}

}  // namespace stig
