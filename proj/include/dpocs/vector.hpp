#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dpocs {

/// Dense vector of finite doubles with at least one entry.
///
/// Constructors reject NaN/Inf and empty input. Element access through
/// `operator[]` is unchecked, so callers that write through it own the
/// finiteness invariant for what they write.
class Vector {
public:
    explicit Vector(std::size_t n, double fill = 0.0);
    explicit Vector(std::vector<double> data);
    Vector(std::initializer_list<double> values);
    explicit Vector(std::span<const double> values);

    std::size_t size() const noexcept { return data_.size(); }

    double operator[](std::size_t i) const noexcept { return data_[i]; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }

    std::span<const double> span() const noexcept { return data_; }
    std::span<double> span() noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

/// Euclidean inner product. Throws InvalidArgument on length mismatch.
double dot(std::span<const double> a, std::span<const double> b);
inline double dot(const Vector& a, const Vector& b) { return dot(a.span(), b.span()); }

double norm2(std::span<const double> v);
inline double norm2(const Vector& v) { return norm2(v.span()); }

double norm_inf(std::span<const double> v);
inline double norm_inf(const Vector& v) { return norm_inf(v.span()); }

/// alpha * x + y
Vector axpy(double alpha, const Vector& x, const Vector& y);

/// ||a - b||
double distance(const Vector& a, const Vector& b);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);

}  // namespace dpocs
