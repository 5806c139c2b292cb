#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace eistrib {

inline constexpr double pi = 3.14159265358979323846;

/// Vacuum permittivity, F/m (CODATA 2018).
inline constexpr double vacuum_permittivity = 8.8541878128e-12;

/// Absolute permittivity of a dielectric with relative permittivity eps_r.
inline double permittivity(double eps_r) {
    if (!(eps_r > 0.0)) throw std::invalid_argument("relative permittivity must be > 0");
    return eps_r * vacuum_permittivity;
}

/// Deterministic standard-normal sampler. Built on mt19937_64 raw output and
/// Box-Muller so that a given seed yields the same stream on every platform
/// and standard library (std::normal_distribution is not pinned by the
/// standard).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1)
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Ordinary least-squares line fit y = slope*x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line needs two equal-length samples of size >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

/// Root of a continuous monotone function on [lo, hi] by bisection.
/// `f(lo)` and `f(hi)` must bracket zero. Converges unconditionally; stops
/// when the bracket collapses to adjacent doubles or |f| <= f_tol.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_tol, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket exhausted at double resolution
        const double fmid = f(mid);
        if (std::abs(fmid) <= f_tol || fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace eistrib
