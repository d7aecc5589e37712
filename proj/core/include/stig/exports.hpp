#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stig/behavior.hpp"
#include "stig/geo.hpp"
#include "stig/hotspot.hpp"
#include "stig/pipeline.hpp"
#include "stig/trail.hpp"

namespace stig {

/// Sparse triplets (row,col,value), nonzero cells only, exact decimal values.
void write_heatmap_csv(std::ostream& out, const TrailField& field);

/// Binary P5, 16-bit big-endian samples, linearly scaled so the snapshot
/// maximum maps to 65535. Row 0 of the image is the northernmost grid row.
void write_heatmap_pgm(std::ostream& out, const TrailField& field);

/// One line per cell: region label, row, col.
void write_mask_csv(std::ostream& out, const std::vector<Region>& regions);

/// FeatureCollection with one feature per region. Cell outlines are merged
/// into rings (exterior counterclockwise, holes clockwise) and corners are
/// back-projected to lon/lat. Cells meeting only at a corner become separate
/// polygons of a MultiPolygon, keeping every ring simple.
void write_mask_geojson(std::ostream& out, const std::vector<Region>& regions,
                        const GridSpec& grid);

/// Square matrix with "YYYY-MM-DD#slot" labels on both axes; values use the
/// shortest decimal form that round-trips exactly.
void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix);
SimilarityMatrix read_matrix_csv(std::istream& in);

std::string occurrence_label(const OccurrenceKey& key);
OccurrenceKey parse_occurrence_label(const std::string& label);

void write_population_report_json(std::ostream& out, const PopulationReport& report);

}  // namespace stig
