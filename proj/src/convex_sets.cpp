#include "dpocs/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "dpocs/error.hpp"
#include "fft.hpp"

namespace dpocs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_normal_sq(const Vector& r, const char* who) {
    const double n = dot(r, r);
    if (!(n > 0.0)) throw InvalidArgument(std::string(who) + ": zero normal vector");
    return n;
}

Vector shift_along(const Vector& w, const Vector& r, double r_sq, double shortfall) {
    if (shortfall == 0.0) return w;
    return axpy(shortfall / r_sq, r, w);
}

}  // namespace

const char* to_string(SetKind kind) noexcept {
    switch (kind) {
        case SetKind::Affine: return "affine";
        case SetKind::Slab: return "slab";
        case SetKind::Box: return "box";
        case SetKind::Ball: return "ball";
        case SetKind::Point: return "point";
        case SetKind::Bandlimit: return "bandlimit";
    }
    return "unknown";
}

ConvexSet::ConvexSet(double rate) : rate_(rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw InvalidArgument("dilation rate must be finite and >= 0");
}

void ConvexSet::check_dim(const Vector& w) const {
    if (w.size() != dim())
        throw InvalidArgument(std::string(to_string(kind())) + " set: dimension mismatch (" +
                              std::to_string(w.size()) + " vs " + std::to_string(dim()) + ")");
}

double ConvexSet::amount(double eps) const {
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw InvalidArgument("dilation amount must be finite and >= 0");
    return rate_ * eps;
}

bool ConvexSet::contains(const Vector& w, double eps, double tol) const {
    return violation(w, eps) <= tol;
}

// ---------------------------------------------------------------------------
// Affine

AffineSet::AffineSet(Vector normal, double offset, double rate)
    : ConvexSet(rate), normal_(std::move(normal)), offset_(offset),
      normal_sq_(checked_normal_sq(normal_, "AffineSet")) {
    if (!std::isfinite(offset)) throw InvalidArgument("AffineSet: non-finite offset");
}

Vector AffineSet::project_dilated(const Vector& w, double eps) const {
    check_dim(w);
    const double half = amount(eps);
    return shift_along(w, normal_, normal_sq_,
                       slab_shortfall(dot(normal_, w), offset_ - half, offset_ + half));
}

double AffineSet::violation(const Vector& w, double eps) const {
    check_dim(w);
    return std::max(std::abs(dot(normal_, w) - offset_) - amount(eps), 0.0);
}

SetPtr AffineSet::dilate(double eps) const {
    return std::make_shared<SlabSet>(normal_, offset_, amount(eps), rate());
}

SetPtr AffineSet::erode(double eps) const {
    if (amount(eps) > 0.0) throw NumericalError("erosion of an affine set is empty");
    return std::make_shared<AffineSet>(*this);
}

SetPtr AffineSet::with_rate(double rate) const {
    return std::make_shared<AffineSet>(normal_, offset_, rate);
}

// ---------------------------------------------------------------------------
// Slab

SlabSet::SlabSet(Vector normal, double lo, double hi, double rate, int)
    : ConvexSet(rate), normal_(std::move(normal)), lo_(lo), hi_(hi),
      normal_sq_(checked_normal_sq(normal_, "SlabSet")) {
    if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf)
        throw InvalidArgument("SlabSet: invalid bounds");
    if (lo > hi) throw InvalidArgument("SlabSet: lo > hi");
}

SlabSet::SlabSet(Vector normal, double offset, double halfwidth, double rate)
    : SlabSet(std::move(normal), offset - halfwidth, offset + halfwidth, rate, 0) {
    if (!std::isfinite(offset)) throw InvalidArgument("SlabSet: non-finite offset");
    if (!(halfwidth >= 0.0)) throw InvalidArgument("SlabSet: negative halfwidth");
}

SlabSet SlabSet::between(Vector normal, double lo, double hi, double rate) {
    return SlabSet(std::move(normal), lo, hi, rate, 0);
}

Vector SlabSet::project_dilated(const Vector& w, double eps) const {
    check_dim(w);
    const double d = amount(eps);
    return shift_along(w, normal_, normal_sq_, slab_shortfall(dot(normal_, w), lo_ - d, hi_ + d));
}

double SlabSet::violation(const Vector& w, double eps) const {
    check_dim(w);
    const double d = amount(eps);
    return std::abs(slab_shortfall(dot(normal_, w), lo_ - d, hi_ + d));
}

SetPtr SlabSet::dilate(double eps) const {
    const double d = amount(eps);
    return std::make_shared<SlabSet>(SlabSet(normal_, lo_ - d, hi_ + d, rate(), 0));
}

SetPtr SlabSet::erode(double eps) const {
    const double d = amount(eps);
    const double lo = lo_ + d;
    const double hi = hi_ - d;
    if (lo > hi) throw NumericalError("erosion of slab would have negative width");
    return std::make_shared<SlabSet>(SlabSet(normal_, lo, hi, rate(), 0));
}

SetPtr SlabSet::with_rate(double rate) const {
    return std::make_shared<SlabSet>(SlabSet(normal_, lo_, hi_, rate, 0));
}

// ---------------------------------------------------------------------------
// Box

BoxSet::BoxSet(std::vector<double> lo, std::vector<double> hi, double rate)
    : ConvexSet(rate), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size())
        throw InvalidArgument("BoxSet: bounds must be non-empty and of equal length");
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (std::isnan(lo_[i]) || std::isnan(hi_[i]) || lo_[i] == kInf || hi_[i] == -kInf)
            throw InvalidArgument("BoxSet: invalid bound at index " + std::to_string(i));
        if (lo_[i] > hi_[i]) throw InvalidArgument("BoxSet: lo > hi at index " + std::to_string(i));
    }
}

Vector BoxSet::project_dilated(const Vector& w, double eps) const {
    check_dim(w);
    const double d = amount(eps);
    std::vector<double> out(w.begin(), w.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo_[i] - d, hi_[i] + d);
    return Vector(std::move(out));
}

double BoxSet::violation(const Vector& w, double eps) const {
    check_dim(w);
    const double d = amount(eps);
    double v = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i)
        v = std::max({v, lo_[i] - d - w[i], w[i] - hi_[i] - d});
    return v;
}

SetPtr BoxSet::dilate(double eps) const {
    const double d = amount(eps);
    auto lo = lo_;
    auto hi = hi_;
    for (auto& v : lo) v -= d;
    for (auto& v : hi) v += d;
    return std::make_shared<BoxSet>(std::move(lo), std::move(hi), rate());
}

SetPtr BoxSet::erode(double eps) const {
    const double d = amount(eps);
    auto lo = lo_;
    auto hi = hi_;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] += d;
        hi[i] -= d;
        if (lo[i] > hi[i]) throw NumericalError("erosion of box would have negative width");
    }
    return std::make_shared<BoxSet>(std::move(lo), std::move(hi), rate());
}

SetPtr BoxSet::with_rate(double rate) const { return std::make_shared<BoxSet>(lo_, hi_, rate); }

// ---------------------------------------------------------------------------
// Ball

BallSet::BallSet(Vector center, double radius, double rate)
    : ConvexSet(rate), center_(std::move(center)), radius_(radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw InvalidArgument("BallSet: radius must be finite and >= 0");
}

Vector BallSet::project_dilated(const Vector& w, double eps) const {
    check_dim(w);
    const double r = radius_ + amount(eps);
    const double d = distance(w, center_);
    if (d <= r) return w;
    return axpy(r / d, w - center_, center_);
}

double BallSet::violation(const Vector& w, double eps) const {
    check_dim(w);
    return std::max(distance(w, center_) - radius_ - amount(eps), 0.0);
}

SetPtr BallSet::dilate(double eps) const {
    return std::make_shared<BallSet>(center_, radius_ + amount(eps), rate());
}

SetPtr BallSet::erode(double eps) const {
    const double r = radius_ - amount(eps);
    if (r < 0.0) throw NumericalError("erosion of ball would have negative radius");
    return std::make_shared<BallSet>(center_, r, rate());
}

SetPtr BallSet::with_rate(double rate) const {
    return std::make_shared<BallSet>(center_, radius_, rate);
}

// ---------------------------------------------------------------------------
// Point

PointSet::PointSet(Vector point, double rate) : ConvexSet(rate), point_(std::move(point)) {}

Vector PointSet::project_dilated(const Vector& w, double eps) const {
    check_dim(w);
    const double r = amount(eps);
    if (r == 0.0) return point_;
    const double d = distance(w, point_);
    if (d <= r) return w;
    return axpy(r / d, w - point_, point_);
}

double PointSet::violation(const Vector& w, double eps) const {
    check_dim(w);
    return std::max(distance(w, point_) - amount(eps), 0.0);
}

SetPtr PointSet::dilate(double eps) const {
    return std::make_shared<BallSet>(point_, amount(eps), rate());
}

SetPtr PointSet::erode(double eps) const {
    if (amount(eps) > 0.0) throw NumericalError("erosion of a point is empty");
    return std::make_shared<PointSet>(*this);
}

SetPtr PointSet::with_rate(double rate) const { return std::make_shared<PointSet>(point_, rate); }

// ---------------------------------------------------------------------------
// Bandlimit

BandlimitSet::BandlimitSet(std::size_t length, std::size_t bandwidth, double bound, double rate)
    : ConvexSet(rate), length_(length), bandwidth_(bandwidth), bound_(bound) {
    if (length == 0 || length % 2 == 0) throw InvalidArgument("BandlimitSet: length must be odd");
    if (bandwidth > (length - 1) / 2)
        throw InvalidArgument("BandlimitSet: bandwidth exceeds (N-1)/2");
    if (!(bound >= 0.0) || !std::isfinite(bound))
        throw InvalidArgument("BandlimitSet: bound must be finite and >= 0");
}

Vector BandlimitSet::project_dilated(const Vector& w, double eps) const {
    check_dim(w);
    const double bound = bound_ + amount(eps);
    const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
    auto bins = detail::real_dft(w.span());
    bool changed = false;
    for (std::size_t k = bandwidth_ + 1; k < bins.size(); ++k) {
        const double mag = std::abs(bins[k]) * scale;
        if (mag > bound) {
            bins[k] *= bound / mag;
            changed = true;
        }
    }
    if (!changed) return w;
    auto out = detail::inverse_real_dft(bins, length_);
    const double inv_n = 1.0 / static_cast<double>(length_);
    for (double& v : out) v *= inv_n;
    return Vector(std::move(out));
}

double BandlimitSet::violation(const Vector& w, double eps) const {
    check_dim(w);
    const double bound = bound_ + amount(eps);
    const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
    const auto bins = detail::real_dft(w.span());
    double v = 0.0;
    for (std::size_t k = bandwidth_ + 1; k < bins.size(); ++k)
        v = std::max(v, std::abs(bins[k]) * scale - bound);
    return v;
}

SetPtr BandlimitSet::dilate(double eps) const {
    return std::make_shared<BandlimitSet>(length_, bandwidth_, bound_ + amount(eps), rate());
}

SetPtr BandlimitSet::erode(double eps) const {
    const double b = bound_ - amount(eps);
    if (b < 0.0) throw NumericalError("erosion of bandlimit set would have negative bound");
    return std::make_shared<BandlimitSet>(length_, bandwidth_, b, rate());
}

SetPtr BandlimitSet::with_rate(double rate) const {
    return std::make_shared<BandlimitSet>(length_, bandwidth_, bound_, rate);
}

// ---------------------------------------------------------------------------

Vector project_affine(const Vector& w, const AffineSet& set) { return set.project(w); }

Vector project_dilated_affine(const Vector& w, const AffineSet& set, double eps) {
    return set.project_dilated(w, eps);
}

Vector project_box(const Vector& w, const BoxSet& set) { return set.project(w); }
Vector project_ball(const Vector& w, const BallSet& set) { return set.project(w); }
Vector project_point(const Vector& w, const PointSet& set) { return set.project(w); }
Vector project_bandlimit(const Vector& w, const BandlimitSet& set) { return set.project(w); }

SetPtr dilate(const ConvexSet& set, double eps) { return set.dilate(eps); }
SetPtr erode(const ConvexSet& set, double eps) { return set.erode(eps); }

bool contains(const ConvexSet& set, const Vector& w, double eps, double tol) {
    return set.contains(w, eps, tol);
}

double max_violation(const SetList& sets, const Vector& w, double eps) {
    double v = 0.0;
    for (const auto& s : sets) v = std::max(v, s->violation(w, eps));
    return v;
}

}  // namespace dpocs
