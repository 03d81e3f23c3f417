#include "dpocs/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "dpocs/dilation_search.hpp"
#include "dpocs/error.hpp"
#include "dpocs/parallel.hpp"
#include "dpocs/rng.hpp"
#include "fft.hpp"

namespace dpocs {

namespace {

constexpr double kPi = std::numbers::pi;

// Stream ids keep the corruption models independent for a shared seed.
constexpr std::uint64_t kGaussianStream = 1;
constexpr std::uint64_t kUniformStream = 2;
constexpr std::uint64_t kShiftStream = 3;

void check_matches(const SparseMatrix& A, const Geometry& geom) {
    if (A.rows() != geom.rays() || A.cols() != geom.n * geom.n)
        throw InvalidArgument("path matrix " + std::to_string(A.rows()) + "x" +
                              std::to_string(A.cols()) + " does not match geometry (" +
                              std::to_string(geom.rays()) + " rays, " +
                              std::to_string(geom.n * geom.n) + " pixels)");
}

// ----------------------------------------------------------------------------
// Ray tracing

// Snap near-axis directions so axis-aligned rays take the exact path.
constexpr double kAxisTol = 1e-12;
// Segments shorter than this come from grid-corner crossings and are dropped.
constexpr double kMinSegment = 1e-12;
// A ray within this distance of a grid line is treated as lying on it.
constexpr double kEdgeTol = 1e-9;

// Ray along a grid axis at position `p` (in pixel units from the low edge).
// `emit(line, cross, length)` receives line = index along p, cross = index of
// the traversed pixel along the other axis.
template <typename Emit>
void trace_axis_ray(std::size_t n, double p, Emit&& emit) {
    const double dn = static_cast<double>(n);
    if (p < -kEdgeTol || p > dn + kEdgeTol) return;
    const double k = std::round(p);
    if (std::abs(p - k) <= kEdgeTol) {
        const auto ki = static_cast<long>(k);
        for (long line : {ki - 1, ki}) {
            if (line < 0 || line >= static_cast<long>(n)) continue;
            for (std::size_t c = 0; c < n; ++c) emit(static_cast<std::size_t>(line), c, 0.5);
        }
        return;
    }
    const auto line = static_cast<std::size_t>(std::floor(p));
    for (std::size_t c = 0; c < n; ++c) emit(line, c, 1.0);
}

void trace_ray(const Geometry& g, std::size_t a, std::size_t b, std::size_t ray,
               std::vector<Triplet>& out) {
    const std::size_t n = g.n;
    const double half = 0.5 * static_cast<double>(n);
    const double theta = g.angle(a);
    const double t = g.bin_offset(b);
    double cs = std::cos(theta);
    double sn = std::sin(theta);

    if (std::abs(sn) < kAxisTol) {
        // Vertical line x = t * sign(cos); columns fixed, runs over all rows.
        const double x = cs > 0 ? t : -t;
        trace_axis_ray(n, x + half, [&](std::size_t col, std::size_t row, double len) {
            out.push_back({ray, row * n + col, len});
        });
        return;
    }
    if (std::abs(cs) < kAxisTol) {
        // Horizontal line y = t * sign(sin); rows fixed, runs over all columns.
        const double y = sn > 0 ? t : -t;
        trace_axis_ray(n, half - y, [&](std::size_t row, std::size_t col, double len) {
            out.push_back({ray, row * n + col, len});
        });
        return;
    }

    // Point on the ray: (t cs - s sn, t sn + s cs), unit speed in s.
    const double x0 = t * cs;
    const double y0 = t * sn;
    auto s_at_x = [&](double x) { return (x0 - x) / sn; };
    auto s_at_y = [&](double y) { return (y - y0) / cs; };

    const double sx1 = s_at_x(-half), sx2 = s_at_x(half);
    const double sy1 = s_at_y(-half), sy2 = s_at_y(half);
    const double smin = std::max(std::min(sx1, sx2), std::min(sy1, sy2));
    const double smax = std::min(std::max(sx1, sx2), std::max(sy1, sy2));
    if (smax - smin <= kMinSegment) return;

    std::vector<double> s_list;
    s_list.reserve(2 * n + 4);
    s_list.push_back(smin);
    s_list.push_back(smax);
    for (std::size_t k = 0; k <= n; ++k) {
        const double line = -half + static_cast<double>(k);
        const double sx = s_at_x(line);
        if (sx > smin && sx < smax) s_list.push_back(sx);
        const double sy = s_at_y(line);
        if (sy > smin && sy < smax) s_list.push_back(sy);
    }
    std::sort(s_list.begin(), s_list.end());

    const auto last = static_cast<long>(n) - 1;
    for (std::size_t i = 0; i + 1 < s_list.size(); ++i) {
        const double len = s_list[i + 1] - s_list[i];
        if (len <= kMinSegment) continue;
        const double sm = 0.5 * (s_list[i] + s_list[i + 1]);
        const double xm = x0 - sm * sn;
        const double ym = y0 + sm * cs;
        const long col = std::clamp(static_cast<long>(std::floor(xm + half)), 0L, last);
        const long row = std::clamp(static_cast<long>(std::floor(half - ym)), 0L, last);
        out.push_back({ray, static_cast<std::size_t>(row) * n + static_cast<std::size_t>(col), len});
    }
}

// ----------------------------------------------------------------------------
// Block-iterative sweeps shared by SART and the dilated reconstruction.

class BlockSweeper {
public:
    BlockSweeper(const SparseMatrix& A, const Geometry& geom, double relax)
        : A_(A), geom_(geom), relax_(relax), order_(view_order(geom.angles)),
          row_sum_(A.rows(), 0.0), back_(A.cols()), col_sum_(A.cols()) {
        if (!(relax > 0.0 && relax < 2.0)) throw InvalidArgument("relaxation must lie in (0, 2)");
        for (std::size_t r = 0; r < A.rows(); ++r)
            for (double v : A.row(r).values) row_sum_[r] += v;
    }

    // One pass over all view blocks. `correction(ray, r.x)` returns the change
    // wanted in the ray's line integral.
    template <typename Correction>
    void sweep(std::vector<double>& x, Correction&& correction) {
        const std::size_t bins = geom_.bins;
        for (std::size_t a : order_) {
            std::fill(back_.begin(), back_.end(), 0.0);
            std::fill(col_sum_.begin(), col_sum_.end(), 0.0);
            bool touched = false;
            for (std::size_t ray = a * bins; ray < (a + 1) * bins; ++ray) {
                if (row_sum_[ray] == 0.0) continue;
                const auto row = A_.row(ray);
                const double delta = correction(ray, row_dot(row, x));
                for (std::size_t k = 0; k < row.cols.size(); ++k) col_sum_[row.cols[k]] += row.values[k];
                if (delta == 0.0) continue;
                touched = true;
                const double coef = delta / row_sum_[ray];
                for (std::size_t k = 0; k < row.cols.size(); ++k)
                    back_[row.cols[k]] += row.values[k] * coef;
            }
            if (!touched) continue;
            for (std::size_t j = 0; j < x.size(); ++j)
                if (col_sum_[j] > 0.0) x[j] = std::clamp(x[j] + relax_ * back_[j] / col_sum_[j], 0.0, 1.0);
        }
    }

private:
    const SparseMatrix& A_;
    const Geometry& geom_;
    double relax_;
    std::vector<std::size_t> order_;
    std::vector<double> row_sum_;
    std::vector<double> back_;
    std::vector<double> col_sum_;
};

struct SlabRun {
    std::vector<double> x;
    bool feasible = false;
    double violation = 0.0;
    std::size_t sweeps = 0;
};

// Drives block sweeps toward the slabs until every violation is within
// residual_tol, the violation stops improving, or the budget runs out.
SlabRun run_slabs(const SparseMatrix& A, const Geometry& geom, const SlabBounds& bounds,
                  std::vector<double> x, const DilatedOptions& opts) {
    SlabRun run;
    run.violation = max_slab_violation(A, x, bounds);
    if (run.violation <= opts.residual_tol) {
        run.x = std::move(x);
        run.feasible = true;
        return run;
    }
    BlockSweeper sweeper(A, geom, opts.relax);
    std::vector<double> history{run.violation};
    const auto correction = [&](std::size_t ray, double rx) {
        return slab_shortfall(rx, bounds.lo[ray], bounds.hi[ray]);
    };
    for (std::size_t q = 1; q <= opts.max_iters; ++q) {
        sweeper.sweep(x, correction);
        run.sweeps = q;
        run.violation = max_slab_violation(A, x, bounds);
        history.push_back(run.violation);
        if (run.violation <= opts.residual_tol) {
            run.feasible = true;
            break;
        }
        const std::size_t w = opts.stagnation_window;
        if (q >= w && run.violation >= (1.0 - 1e-3) * history[q - w] &&
            run.violation > 2.0 * opts.residual_tol)
            break;
    }
    run.x = std::move(x);
    return run;
}

// ----------------------------------------------------------------------------
// Modified Shepp-Logan ellipse table:
// intensity, semi-axis a, semi-axis b, centre x, centre y, rotation (degrees).
constexpr std::array<std::array<double, 6>, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

}  // namespace

// ----------------------------------------------------------------------------

Image::Image(std::size_t n_, std::vector<double> px) : n(n_), pixels(std::move(px)) {
    if (n == 0 || pixels.size() != n * n)
        throw InvalidArgument("Image: expected " + std::to_string(n * n) + " pixels, got " +
                              std::to_string(pixels.size()));
    for (double v : pixels)
        if (!std::isfinite(v)) throw InvalidArgument("Image: non-finite pixel");
}

Image::Image(std::size_t n_, double fill) : Image(n_, std::vector<double>(n_ * n_, fill)) {}

void Image::clamp_unit() {
    for (double& v : pixels) v = std::clamp(v, 0.0, 1.0);
}

Geometry Geometry::standard(std::size_t n, std::size_t angles) {
    const auto rounded = static_cast<std::size_t>(std::lround(1.45 * static_cast<double>(n)));
    const auto minimum = static_cast<std::size_t>(std::ceil(std::sqrt(2.0) * static_cast<double>(n)));
    Geometry g{n, angles, std::max(rounded, minimum)};
    g.validate();
    return g;
}

void Geometry::validate() const {
    if (n == 0) throw InvalidArgument("Geometry: n must be >= 1");
    if (angles < 1) throw InvalidArgument("Geometry: angles must be >= 1");
    const auto minimum = static_cast<std::size_t>(std::ceil(std::sqrt(2.0) * static_cast<double>(n)));
    if (bins < minimum)
        throw InvalidArgument("Geometry: bins must be >= ceil(n*sqrt(2)) = " + std::to_string(minimum));
}

double Geometry::angle(std::size_t a) const noexcept {
    return kPi * static_cast<double>(a) / static_cast<double>(angles);
}

double Geometry::bin_offset(std::size_t b) const noexcept {
    return static_cast<double>(b) - 0.5 * static_cast<double>(bins - 1);
}

Sinogram::Sinogram(Geometry g, std::vector<double> v) : geometry(g), values(std::move(v)) {
    geometry.validate();
    if (values.size() != geometry.rays())
        throw InvalidArgument("Sinogram: expected " + std::to_string(geometry.rays()) +
                              " values, got " + std::to_string(values.size()));
    for (double x : values)
        if (!std::isfinite(x)) throw InvalidArgument("Sinogram: non-finite value");
}

Sinogram::Sinogram(Geometry g) : Sinogram(g, std::vector<double>(g.rays(), 0.0)) {}

double shepp_logan_value(double x, double y) {
    double v = 0.0;
    for (const auto& e : kSheppLogan) {
        const double phi = e[5] * kPi / 180.0;
        const double dx = x - e[3];
        const double dy = y - e[4];
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = dy * std::cos(phi) - dx * std::sin(phi);
        if ((u * u) / (e[1] * e[1]) + (w * w) / (e[2] * e[2]) <= 1.0) v += e[0];
    }
    return v;
}

Image shepp_logan(std::size_t n) {
    if (n < 16) throw InvalidArgument("shepp_logan: n must be >= 16");
    Image img(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = (2.0 * static_cast<double>(j) + 1.0) / dn - 1.0;
            img.pixels[i * n + j] = std::clamp(shepp_logan_value(x, y), 0.0, 1.0);
        }
    }
    return img;
}

SparseMatrix build_path_matrix(const Geometry& geom) {
    geom.validate();
    const std::size_t rays = geom.rays();
    const std::size_t workers = std::min(thread_count(), rays);

    // Each worker traces a contiguous ray range; ranges are concatenated in
    // order so the result is independent of the worker count.
    std::vector<std::vector<Triplet>> parts(workers);
    auto trace_range = [&](std::size_t w) {
        const std::size_t begin = rays * w / workers;
        const std::size_t end = rays * (w + 1) / workers;
        auto& out = parts[w];
        out.reserve((end - begin) * geom.n * 2);
        for (std::size_t ray = begin; ray < end; ++ray)
            trace_ray(geom, ray / geom.bins, ray % geom.bins, ray, out);
    };
    if (workers == 1) {
        trace_range(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(trace_range, w);
        for (auto& t : pool) t.join();
    }

    std::vector<Triplet> all;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    all.reserve(total);
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return SparseMatrix::from_triplets(rays, geom.n * geom.n, std::move(all));
}

Sinogram forward_project(const SparseMatrix& A, const Image& img, const Geometry& geom) {
    check_matches(A, geom);
    if (img.n != geom.n) throw InvalidArgument("forward_project: image size does not match geometry");
    std::vector<double> out(A.rows());
    spmv(A, img.pixels, out);
    return Sinogram(geom, std::move(out));
}

Sinogram add_gaussian_noise(const Sinogram& sino, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw InvalidArgument("add_gaussian_noise: sigma must be >= 0");
    Sinogram out = sino;
    if (sigma == 0.0) return out;
    Rng rng(seed, kGaussianStream);
    for (double& v : out.values) v += sigma * rng.normal();
    return out;
}

Sinogram add_uniform_noise(const Sinogram& sino, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0)) throw InvalidArgument("add_uniform_noise: amplitude must be >= 0");
    Sinogram out = sino;
    if (amplitude == 0.0) return out;
    Rng rng(seed, kUniformStream);
    for (double& v : out.values) v += rng.uniform(-amplitude, amplitude);
    return out;
}

void shift_angle_row(Sinogram& sino, std::size_t angle, long shift) {
    const std::size_t bins = sino.geometry.bins;
    if (angle >= sino.geometry.angles) throw InvalidArgument("shift_angle_row: angle out of range");
    if (shift == 0) return;
    auto first = sino.values.begin() + static_cast<std::ptrdiff_t>(angle * bins);
    std::vector<double> row(first, first + static_cast<std::ptrdiff_t>(bins));
    for (std::size_t b = 0; b < bins; ++b) {
        const long src = static_cast<long>(b) - shift;
        first[static_cast<std::ptrdiff_t>(b)] =
            (src >= 0 && src < static_cast<long>(bins)) ? row[static_cast<std::size_t>(src)] : 0.0;
    }
}

Sinogram apply_lateral_shift(const Sinogram& sino, std::size_t max_shift, std::uint64_t seed) {
    Sinogram out = sino;
    if (max_shift == 0) return out;
    Rng rng(seed, kShiftStream);
    const auto m = static_cast<std::int64_t>(max_shift);
    for (std::size_t a = 0; a < out.geometry.angles; ++a)
        shift_angle_row(out, a, static_cast<long>(rng.uniform_int(-m, m)));
    return out;
}

std::vector<std::size_t> view_order(std::size_t angles) {
    std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.618 * static_cast<double>(angles))));
    while (std::gcd(step, angles) != 1) ++step;
    std::vector<std::size_t> order(angles);
    for (std::size_t k = 0; k < angles; ++k) order[k] = (k * step) % angles;
    return order;
}

Image art(const SparseMatrix& A, const Sinogram& sino, std::size_t iters, double relax,
          const IterationObserver& observer) {
    check_matches(A, sino.geometry);
    if (!(relax > 0.0 && relax < 2.0)) throw InvalidArgument("art: relaxation must lie in (0, 2)");
    const auto norms = A.row_norms_sq();
    Image img(sino.geometry.n);
    auto& x = img.pixels;
    for (std::size_t it = 1; it <= iters; ++it) {
        for (std::size_t r = 0; r < A.rows(); ++r) {
            if (norms[r] == 0.0) continue;
            const auto row = A.row(r);
            const double coef = relax * (sino.values[r] - row_dot(row, x)) / norms[r];
            for (std::size_t k = 0; k < row.cols.size(); ++k) x[row.cols[k]] += coef * row.values[k];
        }
        img.clamp_unit();
        if (observer) observer(it, img);
    }
    return img;
}

Image sart(const SparseMatrix& A, const Sinogram& sino, std::size_t iters, double relax,
           const IterationObserver& observer) {
    check_matches(A, sino.geometry);
    BlockSweeper sweeper(A, sino.geometry, relax);
    Image img(sino.geometry.n);
    const auto correction = [&](std::size_t ray, double rx) { return sino.values[ray] - rx; };
    for (std::size_t it = 1; it <= iters; ++it) {
        sweeper.sweep(img.pixels, correction);
        if (observer) observer(it, img);
    }
    return img;
}

Image fbp(const Sinogram& sino, FbpFilter filter) {
    const auto& g = sino.geometry;
    if (g.angles < 2) throw InvalidArgument("fbp: at least two view angles are required");

    std::size_t padded = 1;
    while (padded < 2 * g.bins) padded <<= 1;

    // Ram-Lak kernel sampled in space (h[0] = 1/4, h[odd k] = -1/(pi k)^2), so
    // its spectrum has no DC bias; doubled to pair with the pi/(2 angles) scale.
    std::vector<double> kernel(padded, 0.0);
    kernel[0] = 0.25;
    for (std::size_t k = 1; k < padded / 2; k += 2) {
        const double v = -1.0 / (kPi * kPi * static_cast<double>(k * k));
        kernel[k] = v;
        kernel[padded - k] = v;
    }
    auto response = detail::real_dft(kernel);
    for (std::size_t k = 0; k < response.size(); ++k) {
        double h = 2.0 * response[k].real();
        if (filter == FbpFilter::Hann) {
            const double f = static_cast<double>(k) / static_cast<double>(padded);
            h *= 0.5 * (1.0 + std::cos(2.0 * kPi * f));
        }
        response[k] = h;
    }

    std::vector<double> filtered(g.rays());
    std::vector<double> buf(padded);
    for (std::size_t a = 0; a < g.angles; ++a) {
        std::fill(buf.begin(), buf.end(), 0.0);
        std::copy_n(sino.values.begin() + static_cast<std::ptrdiff_t>(a * g.bins), g.bins, buf.begin());
        auto spec = detail::real_dft(buf);
        for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= response[k];
        const auto back = detail::inverse_real_dft(spec, padded);
        for (std::size_t b = 0; b < g.bins; ++b)
            filtered[a * g.bins + b] = back[b] / static_cast<double>(padded);
    }

    Image img(g.n);
    const double half = 0.5 * static_cast<double>(g.n);
    const double centre = 0.5 * static_cast<double>(g.bins - 1);
    const double scale = kPi / (2.0 * static_cast<double>(g.angles));
    for (std::size_t a = 0; a < g.angles; ++a) {
        const double cs = std::cos(g.angle(a));
        const double sn = std::sin(g.angle(a));
        const double* q = filtered.data() + a * g.bins;
        for (std::size_t i = 0; i < g.n; ++i) {
            const double y = half - static_cast<double>(i) - 0.5;
            for (std::size_t j = 0; j < g.n; ++j) {
                const double x = static_cast<double>(j) + 0.5 - half;
                const double p = x * cs + y * sn + centre;
                const double fl = std::floor(p);
                const auto b0 = static_cast<long>(fl);
                const double frac = p - fl;
                double v = 0.0;
                if (b0 >= 0 && b0 < static_cast<long>(g.bins)) v += (1.0 - frac) * q[b0];
                if (b0 + 1 >= 0 && b0 + 1 < static_cast<long>(g.bins)) v += frac * q[b0 + 1];
                img.pixels[i * g.n + j] += v;
            }
        }
    }
    for (double& v : img.pixels) v *= scale;
    img.clamp_unit();
    return img;
}

void BoxDilationSpec::validate() const {
    if (!(epsilon_noise >= 0.0) || !std::isfinite(epsilon_noise))
        throw InvalidArgument("BoxDilationSpec: epsilon_noise must be finite and >= 0");
}

SlabBounds box_dilated_bounds(const Sinogram& sino, double epsilon_noise, std::size_t max_shift) {
    const auto& g = sino.geometry;
    SlabBounds b{std::vector<double>(g.rays()), std::vector<double>(g.rays())};
    const auto m = static_cast<long>(max_shift);
    const auto bins = static_cast<long>(g.bins);
    for (std::size_t a = 0; a < g.angles; ++a) {
        for (long bin = 0; bin < bins; ++bin) {
            double lo = sino.at(a, static_cast<std::size_t>(bin));
            double hi = lo;
            for (long s = -m; s <= m; ++s) {
                const long src = bin + s;
                const double v = (src >= 0 && src < bins) ? sino.at(a, static_cast<std::size_t>(src)) : 0.0;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const std::size_t ray = a * g.bins + static_cast<std::size_t>(bin);
            b.lo[ray] = lo - epsilon_noise;
            b.hi[ray] = hi + epsilon_noise;
        }
    }
    return b;
}

double max_slab_violation(const SparseMatrix& A, std::span<const double> x, const SlabBounds& b) {
    double v = 0.0;
    for (std::size_t r = 0; r < A.rows(); ++r)
        v = std::max(v, std::abs(slab_shortfall(row_dot(A.row(r), x), b.lo[r], b.hi[r])));
    return v;
}

DilatedReconstruction dilated_reconstruct(const SparseMatrix& A, const Sinogram& sino,
                                          const BoxDilationSpec& spec,
                                          const DilatedOptions& opts) {
    spec.validate();
    check_matches(A, sino.geometry);
    if (!(opts.residual_tol > 0.0)) throw InvalidArgument("dilated_reconstruct: residual_tol must be > 0");
    const auto& g = sino.geometry;
    const std::vector<double> zero(g.n * g.n, 0.0);

    if (!spec.adaptive) {
        auto run = run_slabs(A, g, box_dilated_bounds(sino, spec.epsilon_noise, spec.max_shift), zero, opts);
        return {Image(g.n, std::move(run.x)), spec.epsilon_noise, run.feasible, run.violation, run.sweeps, 1};
    }

    // The zero image lies in every slab once eps covers the largest shortfall at zero.
    const auto base = box_dilated_bounds(sino, 0.0, spec.max_shift);
    double hi = 0.0;
    for (std::size_t r = 0; r < base.lo.size(); ++r)
        hi = std::max(hi, std::abs(slab_shortfall(0.0, base.lo[r], base.hi[r])));
    if (hi == 0.0) return {Image(g.n), 0.0, true, 0.0, 0, 0};

    std::size_t sweeps = 0;
    const FeasibilityOracle oracle = [&](double eps, const Vector& warm) -> std::optional<Vector> {
        auto run = run_slabs(A, g, box_dilated_bounds(sino, eps, spec.max_shift), warm.values(), opts);
        sweeps += run.sweeps;
        if (run.feasible) return Vector(std::move(run.x));
        return std::nullopt;
    };
    const double tol = opts.bracket_tol > 0.0 ? opts.bracket_tol : 1e-4 * hi;
    auto result = bisect_dilation(oracle, 0.0, hi, Vector(zero), tol);

    const auto bounds = box_dilated_bounds(sino, result.epsilon_star, spec.max_shift);
    const double violation = max_slab_violation(A, result.x_star.span(), bounds);
    return {Image(g.n, result.x_star.values()), result.epsilon_star, true, violation, sweeps,
            result.probes};
}

ImageMetrics image_metrics(const Image& img, const Image& reference) {
    if (img.n != reference.n) throw InvalidArgument("image_metrics: shape mismatch");
    ImageMetrics m;
    double sq = 0.0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const double d = img.pixels[i] - reference.pixels[i];
        sq += d * d;
        m.max_abs = std::max(m.max_abs, std::abs(d));
    }
    m.rmse = std::sqrt(sq / static_cast<double>(img.pixels.size()));
    return m;
}

SinogramMetrics sino_metrics(const SparseMatrix& A, const Image& img, const Sinogram& sino) {
    check_matches(A, sino.geometry);
    if (img.n != sino.geometry.n) throw InvalidArgument("sino_metrics: image size does not match geometry");
    std::vector<double> d(A.rows());
    spmv(A, img.pixels, d);
    for (std::size_t r = 0; r < d.size(); ++r) d[r] -= sino.values[r];
    return {norm2(d), norm_inf(d)};
}

}  // namespace dpocs
