#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dpocs/sparse_matrix.hpp"

namespace dpocs {

/// Square greyscale image, row-major, row 0 at the top.
struct Image {
    Image(std::size_t n, std::vector<double> pixels);
    explicit Image(std::size_t n, double fill = 0.0);

    std::size_t n;
    std::vector<double> pixels;

    double at(std::size_t row, std::size_t col) const { return pixels[row * n + col]; }
    void clamp_unit();
};

/// Parallel-beam geometry: `angles` views equally spaced over [0, 180) degrees,
/// `bins` detector bins of one pixel width centred on the rotation axis.
struct Geometry {
    std::size_t n = 0;
    std::size_t angles = 0;
    std::size_t bins = 0;

    /// bins = round(1.45 n), raised to ceil(n sqrt 2) if needed. For n = 100
    /// this gives 145 bins.
    static Geometry standard(std::size_t n, std::size_t angles = 180);

    void validate() const;
    std::size_t rays() const noexcept { return angles * bins; }
    double angle(std::size_t a) const noexcept;
    /// Signed offset of detector bin b from the rotation axis, in pixels.
    double bin_offset(std::size_t b) const noexcept;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Line integrals indexed by (angle, bin), stored angle-major.
struct Sinogram {
    Sinogram(Geometry geometry, std::vector<double> values);
    explicit Sinogram(Geometry geometry);

    Geometry geometry;
    std::vector<double> values;

    double at(std::size_t angle, std::size_t bin) const {
        return values[angle * geometry.bins + bin];
    }
};

// ----------------------------------------------------------------------------
// Phantom and forward model

/// Modified Shepp-Logan phantom value at normalized coordinates (x right,
/// y up, both in [-1, 1]); sum of the ten ellipse contributions, unclamped.
double shepp_logan_value(double x, double y);

/// n x n modified Shepp-Logan phantom sampled at pixel centres, clamped to [0, 1].
Image shepp_logan(std::size_t n);

/// Ray-pixel intersection lengths: one row per (angle, bin) ray, one column
/// per pixel. Each ray is the centre line of its detector bin. A ray running
/// exactly along a pixel edge splits its length equally between the two
/// pixels sharing that edge.
SparseMatrix build_path_matrix(const Geometry& geom);

Sinogram forward_project(const SparseMatrix& A, const Image& img, const Geometry& geom);

// ----------------------------------------------------------------------------
// Corruption models. Each draws from its own seeded stream.

Sinogram add_gaussian_noise(const Sinogram& sino, double sigma, std::uint64_t seed);
Sinogram add_uniform_noise(const Sinogram& sino, double amplitude, std::uint64_t seed);
/// Shifts every angle row by an integer drawn uniformly from
/// [-max_shift, max_shift]; bins shifted in from outside are zero.
Sinogram apply_lateral_shift(const Sinogram& sino, std::size_t max_shift, std::uint64_t seed);
/// Shifts one angle row by `shift` bins (positive moves values to higher bins).
void shift_angle_row(Sinogram& sino, std::size_t angle, long shift);

// ----------------------------------------------------------------------------
// Reconstruction

/// Called after each iteration with the (clamped) image.
using IterationObserver = std::function<void(std::size_t iteration, const Image& img)>;

/// Kaczmarz sweeps over all rays in order, clamping to [0, 1] after each sweep.
Image art(const SparseMatrix& A, const Sinogram& sino, std::size_t iters, double relax,
          const IterationObserver& observer = {});

/// Block-iterative SART, one block per view angle, with row-sum and
/// block-column-sum weighting; the image is clamped to [0, 1] after every
/// block. Views are visited in a fixed interleaved order.
Image sart(const SparseMatrix& A, const Sinogram& sino, std::size_t iters, double relax,
           const IterationObserver& observer = {});

/// The view order used by the block-iterative methods: a[k] = k * step mod
/// angles with step the integer nearest 0.618 * angles that is coprime to it.
std::vector<std::size_t> view_order(std::size_t angles);

enum class FbpFilter { RamLak, Hann };

/// Filtered back-projection: ramp filtering in the frequency domain (optional
/// raised-cosine apodization), linearly interpolated back-projection, scale
/// pi / (2 angles), clamp to [0, 1]. Needs at least two views.
Image fbp(const Sinogram& sino, FbpFilter filter = FbpFilter::RamLak);

struct BoxDilationSpec {
    /// Vertical dilation in sinogram value units.
    double epsilon_noise = 0.0;
    /// Horizontal dilation in detector bins.
    std::size_t max_shift = 0;
    /// Search for the smallest feasible epsilon_noise by interval halving.
    bool adaptive = false;

    void validate() const;
};

struct DilatedOptions {
    /// Sweeps per feasibility run.
    std::size_t max_iters = 500;
    double relax = 1.0;
    /// Largest slab violation accepted as feasible, in sinogram units.
    double residual_tol = 1e-2;
    /// Interval-halving stop width; 0 means 1e-4 times the initial bracket.
    double bracket_tol = 0.0;
    std::size_t stagnation_window = 10;
};

/// Per-ray bounds [lo, hi]: the extreme values of the sinogram over bins within
/// max_shift of the ray (zero outside the detector), widened by epsilon_noise.
struct SlabBounds {
    std::vector<double> lo;
    std::vector<double> hi;
};
SlabBounds box_dilated_bounds(const Sinogram& sino, double epsilon_noise, std::size_t max_shift);

/// Largest violation of lo_i <= r_i . x <= hi_i over all rays.
double max_slab_violation(const SparseMatrix& A, std::span<const double> x, const SlabBounds& b);

struct DilatedReconstruction {
    Image image;
    double epsilon_noise = 0.0;
    bool feasible = false;
    double max_violation = 0.0;
    std::size_t sweeps = 0;
    std::size_t probes = 0;
};

/// Reconstruction constrained to the box-dilated sinogram: each ray's
/// line integral must stay inside its dilated slab and every pixel inside
/// [0, 1] (a hard constraint). Solved by block-simultaneous projections onto
/// the slabs from a zero image. With `adaptive`, epsilon_noise is the smallest
/// value found feasible by interval halving while max_shift stays fixed.
DilatedReconstruction dilated_reconstruct(const SparseMatrix& A, const Sinogram& sino,
                                          const BoxDilationSpec& spec,
                                          const DilatedOptions& opts = {});

// ----------------------------------------------------------------------------
// Metrics

struct ImageMetrics {
    double rmse = 0.0;
    double max_abs = 0.0;
};
ImageMetrics image_metrics(const Image& img, const Image& reference);

struct SinogramMetrics {
    double l2 = 0.0;
    double linf = 0.0;
};
/// Distance between the sinogram of `img` and the given sinogram.
SinogramMetrics sino_metrics(const SparseMatrix& A, const Image& img, const Sinogram& sino);

}  // namespace dpocs
