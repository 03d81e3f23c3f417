#include "dpocs/vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpocs/error.hpp"

namespace dpocs {

namespace {

void check_entries(const std::vector<double>& data) {
    if (data.empty()) throw InvalidArgument("Vector: length must be > 0");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i]))
            throw InvalidArgument("Vector: non-finite entry at index " + std::to_string(i));
    }
}

void check_same_length(std::size_t a, std::size_t b, const char* op) {
    if (a != b)
        throw InvalidArgument(std::string(op) + ": length mismatch (" + std::to_string(a) +
                              " vs " + std::to_string(b) + ")");
}

}  // namespace

Vector::Vector(std::size_t n, double fill) : data_(n, fill) { check_entries(data_); }

Vector::Vector(std::vector<double> data) : data_(std::move(data)) { check_entries(data_); }

Vector::Vector(std::initializer_list<double> values) : data_(values) { check_entries(data_); }

Vector::Vector(std::span<const double> values) : data_(values.begin(), values.end()) {
    check_entries(data_);
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_same_length(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> v) {
    // Scaled accumulation keeps large CT residual vectors from overflowing.
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) {
        const double t = x / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vector axpy(double alpha, const Vector& x, const Vector& y) {
    check_same_length(x.size(), y.size(), "axpy");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + y[i];
    return Vector(std::move(out));
}

double distance(const Vector& a, const Vector& b) {
    check_same_length(a.size(), b.size(), "distance");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return norm2(d);
}

Vector operator+(const Vector& a, const Vector& b) { return axpy(1.0, a, b); }

Vector operator-(const Vector& a, const Vector& b) { return axpy(-1.0, b, a); }

Vector operator*(double s, const Vector& v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x *= s;
    return Vector(std::move(out));
}

}  // namespace dpocs
