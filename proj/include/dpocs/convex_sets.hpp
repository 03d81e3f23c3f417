#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dpocs/vector.hpp"

namespace dpocs {

enum class SetKind { Affine, Slab, Box, Ball, Point, Bandlimit };

const char* to_string(SetKind kind) noexcept;

class ConvexSet;
using SetPtr = std::shared_ptr<const ConvexSet>;
using SetList = std::vector<SetPtr>;

/// A closed convex constraint with an exact Euclidean projection.
///
/// Every set carries a dilation rate: dilating by a global amount `eps`
/// enlarges the set by `rate * eps` in the family's own parameter. A rate of
/// zero marks a hard constraint that is never relaxed.
///
/// Sets are immutable; all members are safe to call concurrently.
class ConvexSet {
public:
    virtual ~ConvexSet() = default;

    virtual SetKind kind() const noexcept = 0;
    virtual std::size_t dim() const noexcept = 0;
    double rate() const noexcept { return rate_; }

    Vector project(const Vector& w) const { return project_dilated(w, 0.0); }

    /// Projection onto the set dilated by `rate() * eps`.
    virtual Vector project_dilated(const Vector& w, double eps) const = 0;

    /// How far `w` lies outside the set dilated by `rate() * eps`, measured in
    /// the family's natural units: residual units for affine and slab sets,
    /// per-coordinate (L-infinity) excess for boxes, Euclidean distance for
    /// balls and points, and per-coefficient magnitude excess for bandlimit
    /// sets. Zero inside.
    virtual double violation(const Vector& w, double eps) const = 0;

    bool contains(const Vector& w, double eps, double tol) const;

    /// Parametric Minkowski dilation by `rate() * eps`. The result keeps the rate.
    virtual SetPtr dilate(double eps) const = 0;

    /// Parametric erosion by `rate() * eps`; inverse of dilate on the family
    /// parameter. Throws NumericalError when the eroded set would be empty.
    virtual SetPtr erode(double eps) const = 0;

    virtual SetPtr with_rate(double rate) const = 0;

protected:
    explicit ConvexSet(double rate);
    void check_dim(const Vector& w) const;
    /// rate * eps, after validating eps >= 0.
    double amount(double eps) const;

private:
    double rate_;
};

/// The hyperplane r . x = y.
class AffineSet final : public ConvexSet {
public:
    AffineSet(Vector normal, double offset, double rate = 1.0);

    SetKind kind() const noexcept override { return SetKind::Affine; }
    std::size_t dim() const noexcept override { return normal_.size(); }
    const Vector& normal() const noexcept { return normal_; }
    double offset() const noexcept { return offset_; }

    Vector project_dilated(const Vector& w, double eps) const override;
    double violation(const Vector& w, double eps) const override;
    SetPtr dilate(double eps) const override;
    SetPtr erode(double eps) const override;
    SetPtr with_rate(double rate) const override;

private:
    Vector normal_;
    double offset_;
    double normal_sq_;
};

/// The slab lo <= r . x <= hi. Bounds may be infinite, giving half-spaces.
/// Widths are in residual units of r . x, not Euclidean distance.
class SlabSet final : public ConvexSet {
public:
    /// Symmetric slab |r . x - y| <= halfwidth.
    SlabSet(Vector normal, double offset, double halfwidth, double rate = 1.0);

    static SlabSet between(Vector normal, double lo, double hi, double rate = 1.0);

    SetKind kind() const noexcept override { return SetKind::Slab; }
    std::size_t dim() const noexcept override { return normal_.size(); }
    const Vector& normal() const noexcept { return normal_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    Vector project_dilated(const Vector& w, double eps) const override;
    double violation(const Vector& w, double eps) const override;
    SetPtr dilate(double eps) const override;
    SetPtr erode(double eps) const override;
    SetPtr with_rate(double rate) const override;

private:
    SlabSet(Vector normal, double lo, double hi, double rate, int);

    Vector normal_;
    double lo_;
    double hi_;
    double normal_sq_;
};

/// Axis-aligned box lo <= x <= hi (componentwise, infinite bounds allowed).
/// Dilation uses a box kernel, so a dilated box is again a box.
class BoxSet final : public ConvexSet {
public:
    BoxSet(std::vector<double> lo, std::vector<double> hi, double rate = 1.0);

    SetKind kind() const noexcept override { return SetKind::Box; }
    std::size_t dim() const noexcept override { return lo_.size(); }
    const std::vector<double>& lo() const noexcept { return lo_; }
    const std::vector<double>& hi() const noexcept { return hi_; }

    Vector project_dilated(const Vector& w, double eps) const override;
    double violation(const Vector& w, double eps) const override;
    SetPtr dilate(double eps) const override;
    SetPtr erode(double eps) const override;
    SetPtr with_rate(double rate) const override;

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

class BallSet final : public ConvexSet {
public:
    BallSet(Vector center, double radius, double rate = 1.0);

    SetKind kind() const noexcept override { return SetKind::Ball; }
    std::size_t dim() const noexcept override { return center_.size(); }
    const Vector& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

    Vector project_dilated(const Vector& w, double eps) const override;
    double violation(const Vector& w, double eps) const override;
    SetPtr dilate(double eps) const override;
    SetPtr erode(double eps) const override;
    SetPtr with_rate(double rate) const override;

private:
    Vector center_;
    double radius_;
};

/// A single point. Dilation turns it into a ball.
class PointSet final : public ConvexSet {
public:
    explicit PointSet(Vector point, double rate = 1.0);

    SetKind kind() const noexcept override { return SetKind::Point; }
    std::size_t dim() const noexcept override { return point_.size(); }
    const Vector& point() const noexcept { return point_; }

    Vector project_dilated(const Vector& w, double eps) const override;
    double violation(const Vector& w, double eps) const override;
    SetPtr dilate(double eps) const override;
    SetPtr erode(double eps) const override;
    SetPtr with_rate(double rate) const override;

private:
    Vector point_;
};

/// Real signals of odd length N whose out-of-band DFT coefficients
/// (|k| > bandwidth) have magnitude at most `bound`.
///
/// The DFT is scaled by 1/sqrt(N) in both directions so coefficient clipping
/// is a Euclidean projection. A bound b here corresponds to b*sqrt(N) for the
/// unnormalized transform.
class BandlimitSet final : public ConvexSet {
public:
    BandlimitSet(std::size_t length, std::size_t bandwidth, double bound, double rate = 1.0);

    SetKind kind() const noexcept override { return SetKind::Bandlimit; }
    std::size_t dim() const noexcept override { return length_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t bandwidth() const noexcept { return bandwidth_; }
    double bound() const noexcept { return bound_; }

    Vector project_dilated(const Vector& w, double eps) const override;
    double violation(const Vector& w, double eps) const override;
    SetPtr dilate(double eps) const override;
    SetPtr erode(double eps) const override;
    SetPtr with_rate(double rate) const override;

private:
    std::size_t length_;
    std::size_t bandwidth_;
    double bound_;
};

/// Change needed in r . w to reach [lo, hi]; zero when already inside.
inline double slab_shortfall(double rw, double lo, double hi) noexcept {
    if (rw < lo) return lo - rw;
    if (rw > hi) return hi - rw;
    return 0.0;
}

Vector project_affine(const Vector& w, const AffineSet& set);
Vector project_dilated_affine(const Vector& w, const AffineSet& set, double eps);
Vector project_box(const Vector& w, const BoxSet& set);
Vector project_ball(const Vector& w, const BallSet& set);
Vector project_point(const Vector& w, const PointSet& set);
Vector project_bandlimit(const Vector& w, const BandlimitSet& set);

SetPtr dilate(const ConvexSet& set, double eps);
SetPtr erode(const ConvexSet& set, double eps);
bool contains(const ConvexSet& set, const Vector& w, double eps, double tol);

/// Largest violation over all sets at dilation eps.
double max_violation(const SetList& sets, const Vector& w, double eps);

}  // namespace dpocs
