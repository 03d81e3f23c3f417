#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace dpocs::detail {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {}
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> real_dft(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(x.size() / 2 + 1);
    fftw_plan p;
    {
        std::lock_guard lock(planner_mutex());
        p = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                 FFTW_ESTIMATE);
    }
    Plan plan(p);
    plan.execute();
    return out;
}

std::vector<double> inverse_real_dft(std::span<const std::complex<double>> bins, std::size_t n) {
    // c2r destroys its input.
    std::vector<std::complex<double>> in(bins.begin(), bins.end());
    std::vector<double> out(n);
    fftw_plan p;
    {
        std::lock_guard lock(planner_mutex());
        p = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                 out.data(), FFTW_ESTIMATE);
    }
    Plan plan(p);
    plan.execute();
    return out;
}

}  // namespace dpocs::detail
