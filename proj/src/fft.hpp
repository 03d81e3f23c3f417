#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dpocs::detail {

/// Unnormalized forward real DFT; returns bins 0..n/2.
std::vector<std::complex<double>> real_dft(std::span<const double> x);

/// Unnormalized inverse of real_dft (result is n times the original signal).
std::vector<double> inverse_real_dft(std::span<const std::complex<double>> bins, std::size_t n);

}  // namespace dpocs::detail
