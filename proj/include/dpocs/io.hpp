#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dpocs/convex_sets.hpp"
#include "dpocs/dilation_search.hpp"
#include "dpocs/pocs.hpp"
#include "dpocs/sparse_matrix.hpp"
#include "dpocs/tomography.hpp"
#include "dpocs/vector.hpp"

namespace dpocs::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// ----------------------------------------------------------------------------
// CSV: one matrix row per line, comma separated, '.' decimal separator.

struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major
};

DenseMatrix read_csv_matrix(const fs::path& path);
void write_csv_matrix(const fs::path& path, const DenseMatrix& m);

/// A single row or a single column.
Vector read_csv_vector(const fs::path& path);
/// One value per line.
void write_csv_vector(const fs::path& path, std::span<const double> v);

/// Triplet CSV: "rows,cols" line, "nnz" line, then one "row,col,value" per entry.
SparseMatrix read_sparse_csv(const fs::path& path);
void write_sparse_csv(const fs::path& path, const SparseMatrix& A);

/// Reads either a triplet CSV (recognized by its two header lines) or a dense CSV.
SparseMatrix read_matrix(const fs::path& path);

// ----------------------------------------------------------------------------
// Images and sinograms

/// 16-bit binary PGM (P5, big-endian), sample = round(clamp(v, 0, 1) * 65535).
void write_pgm(const fs::path& path, const Image& img);
/// Reads P2 or P5 greyscale; samples are divided by maxval. Image must be square.
Image read_pgm(const fs::path& path);

void write_image_csv(const fs::path& path, const Image& img);
Image read_image_csv(const fs::path& path);

/// Values as CSV (one view angle per line) plus a JSON sidecar with the
/// geometry at the same path with extension ".json".
void write_sinogram(const fs::path& csv_path, const Sinogram& sino);
Sinogram read_sinogram(const fs::path& csv_path);
fs::path sidecar_path(const fs::path& csv_path);

json geometry_to_json(const Geometry& g);
Geometry geometry_from_json(const json& j, const std::string& path = "");

// ----------------------------------------------------------------------------
// Experiment configuration

struct ExperimentConfig {
    Geometry geometry;
    struct Corruption {
        double gaussian_sigma = 0.0;
        double uniform_amplitude = 0.0;
        std::size_t max_shift = 0;
        std::uint64_t seed = 0;
    } corruption;
    struct Method {
        std::string name = "sart";
        std::size_t iterations = 200;
        double relax = 1.0;
        FbpFilter filter = FbpFilter::RamLak;
    } method;
    BoxDilationSpec dilation;
    DilatedOptions dilated;
    std::string output_dir = ".";
};

/// Validates against the schema; unknown keys are rejected. Errors are
/// SchemaError carrying the JSON pointer of the offending node.
ExperimentConfig parse_config(const json& j);
ExperimentConfig read_config(const fs::path& path);
json config_to_json(const ExperimentConfig& cfg);
void write_config(const fs::path& path, const ExperimentConfig& cfg);

// ----------------------------------------------------------------------------
// Convex set descriptions:
//   {"type": "affine", "normal": [...], "offset": y}
//   {"type": "slab", "normal": [...], "offset": y, "halfwidth": h}
//   {"type": "slab", "normal": [...], "lo": a, "hi": b}
//   {"type": "box", "lo": [...], "hi": [...]}            (null = unbounded)
//   {"type": "ball", "center": [...], "radius": r}
//   {"type": "point", "point": [...]}
//   {"type": "bandlimit", "length": N, "bandwidth": B, "bound": b}
// each with an optional "rate" (default 1). A collection is either an array
// of these or {"sets": [...]}.

SetPtr parse_set(const json& j, const std::string& path = "");
SetList parse_sets(const json& j);
SetList read_sets(const fs::path& path);
json set_to_json(const ConvexSet& set);

// ----------------------------------------------------------------------------
// Reports

/// Columns: iter,residual_max,displacement
void write_trace_csv(const fs::path& path, const PocsTrace& trace);
/// Columns: step,eps_lo,eps_hi
void write_bracket_csv(const fs::path& path, const std::vector<std::pair<double, double>>& history);

json read_json(const fs::path& path);
void write_report_json(const fs::path& path, const json& report);

}  // namespace dpocs::io
