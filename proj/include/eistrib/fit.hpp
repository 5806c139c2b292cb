#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eistrib/circuit.hpp"
#include "eistrib/numeric.hpp"
#include "eistrib/spectrum.hpp"

namespace eistrib {

/// Candidate circuit topologies for spectrum identification.
enum class ModelKind {
    ParallelRC,         // R1 || C1
    ParallelRC_SeriesR, // (R1 || C1) + R2
    ParallelRC_Warburg, // (R1 || C1) + W(Aw)
};

inline int param_count(ModelKind kind) {
    return kind == ModelKind::ParallelRC ? 2 : 3;
}

inline std::string model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::ParallelRC: return "rc";
    case ModelKind::ParallelRC_SeriesR: return "rc+r";
    case ModelKind::ParallelRC_Warburg: return "rc+w";
    }
    return "?";
}

enum class Weighting { Modulus, Proportional, Unit };

struct FitConfig {
    Weighting weighting = Weighting::Modulus;
    int max_iterations = 200;
    double param_tol = 1e-10;  // relative step tolerance (log-space step size)
    double resid_tol = 1e-12;  // relative residual-change tolerance
    double damping_init = 1e-3;
    bool phase_screening = true; // down-weight isolated phase outliers x0.1

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("fit config: max_iterations >= 1");
        if (!(param_tol > 0.0) || !(resid_tol > 0.0) || !(damping_init > 0.0))
            throw std::invalid_argument("fit config: tolerances and damping must be > 0");
    }
};

enum class LubricationRegime { FullFilm, Mixed, Boundary };

inline std::string regime_name(LubricationRegime r) {
    switch (r) {
    case LubricationRegime::FullFilm: return "FullFilm";
    case LubricationRegime::Mixed: return "Mixed";
    case LubricationRegime::Boundary: return "Boundary";
    }
    return "?";
}

/// Identified circuit parameters. Standard errors come from the linearized
/// Jacobian at the solution (NaN when the normal matrix is singular there).
struct FitResult {
    ModelKind model = ModelKind::ParallelRC;
    double r1_ohm = 0.0;
    double c1_farad = 0.0;
    std::optional<double> r2_ohm;
    std::optional<double> aw;
    double r1_stderr = 0.0;
    double c1_stderr = 0.0;
    std::optional<double> r2_stderr;
    std::optional<double> aw_stderr;
    double residual_norm = 0.0; // weighted RMS per scalar residual
    int iterations = 0;
    bool converged = false;
};

/// Heuristic starting point for a parallel-RC fit: the DC plateau gives R,
/// the -45 degree phase crossing gives C.
struct InitialGuess {
    double r_ohm = 0.0;
    double c_farad = 0.0;
    bool low_confidence = false; // no capacitive phase observed; C is a placeholder
};

inline InitialGuess initial_guess_rc(const Spectrum& s) {
    if (s.size() < 5)
        throw std::invalid_argument("initial_guess_rc: need at least 5 samples");
    double f_min = s.samples.front().freq_hz, f_max = f_min;
    const SpectrumSample* lowest = &s.samples.front();
    for (const auto& sample : s.samples) {
        f_min = std::min(f_min, sample.freq_hz);
        f_max = std::max(f_max, sample.freq_hz);
        if (sample.freq_hz < lowest->freq_hz) lowest = &sample;
    }
    if (f_max / f_min < 100.0 * (1.0 - 1e-12))
        throw std::invalid_argument("initial_guess_rc: need samples spanning >= 2 decades");

    InitialGuess g;
    g.r_ohm = std::abs(lowest->z);
    if (!(g.r_ohm > 0.0)) throw std::invalid_argument("initial_guess_rc: |Z| at DC end is zero");

    double best_dist = std::numeric_limits<double>::infinity();
    double f45 = 0.0;
    bool any_capacitive = false;
    for (const auto& sample : s.samples) {
        const double phase = std::atan2(sample.z.imag(), sample.z.real()) * 180.0 / pi;
        if (phase < -10.0) any_capacitive = true;
        const double dist = std::abs(phase + 45.0);
        if (dist < best_dist) {
            best_dist = dist;
            f45 = sample.freq_hz;
        }
    }
    if (!any_capacitive) {
        g.c_farad = 1e-10;
        g.low_confidence = true;
    } else {
        g.c_farad = 1.0 / (2.0 * pi * f45 * g.r_ohm);
    }
    return g;
}

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

// Model impedance and its partials with respect to ln(param).
// Parameter order: R1, C1, then R2 or Aw.
inline Complex eval_model(ModelKind kind, const double* p, double omega, Complex* dz_dlog) {
    const double r1 = p[0], c1 = p[1];
    const Complex denom{1.0, omega * r1 * c1};
    const Complex z1 = r1 / denom;
    if (dz_dlog) {
        dz_dlog[0] = r1 / (denom * denom);
        dz_dlog[1] = Complex{0.0, -omega * r1 * r1 * c1} / (denom * denom);
    }
    switch (kind) {
    case ModelKind::ParallelRC:
        return z1;
    case ModelKind::ParallelRC_SeriesR:
        if (dz_dlog) dz_dlog[2] = {p[2], 0.0};
        return z1 + Complex{p[2], 0.0};
    case ModelKind::ParallelRC_Warburg: {
        const double m = p[2] / std::sqrt(omega);
        if (dz_dlog) dz_dlog[2] = {m, -m};
        return z1 + Complex{m, -m};
    }
    }
    throw std::logic_error("unreachable model kind");
}

// Per-sample weights for each residual component, including the optional
// phase-outlier screen.
struct SampleWeights {
    std::vector<double> w_re;
    std::vector<double> w_im;
};

inline SampleWeights build_weights(const Spectrum& s, const FitConfig& cfg) {
    const std::size_t n = s.size();
    SampleWeights w;
    w.w_re.assign(n, 1.0);
    w.w_im.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::abs(s.samples[i].z);
        if (!(mag > 0.0)) throw std::invalid_argument("fit: zero-magnitude impedance sample");
        switch (cfg.weighting) {
        case Weighting::Modulus:
            w.w_re[i] = w.w_im[i] = 1.0 / (mag * mag);
            break;
        case Weighting::Proportional: {
            // component-wise, floored at 1% of |Z| so noise-free quadratures
            // cannot acquire unbounded weight
            const double floor_v = 0.01 * mag;
            const double re = std::max(std::abs(s.samples[i].z.real()), floor_v);
            const double im = std::max(std::abs(s.samples[i].z.imag()), floor_v);
            w.w_re[i] = 1.0 / (re * re);
            w.w_im[i] = 1.0 / (im * im);
            break;
        }
        case Weighting::Unit:
            break;
        }
    }
    if (cfg.phase_screening && n >= 3) {
        std::vector<double> phase(n);
        for (std::size_t i = 0; i < n; ++i)
            phase[i] = std::atan2(s.samples[i].z.imag(), s.samples[i].z.real()) * 180.0 / pi;
        auto jump = [&](std::size_t a, std::size_t b) {
            double d = std::abs(phase[a] - phase[b]);
            return std::min(d, 360.0 - d);
        };
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (jump(i, i - 1) > 60.0 && jump(i, i + 1) > 60.0) {
                w.w_re[i] *= 0.1;
                w.w_im[i] *= 0.1;
            }
        }
    }
    return w;
}

// Weighted sum of squared residuals over both quadratures.
inline double fit_cost(ModelKind kind, const double* p, const Spectrum& s,
                       const SampleWeights& w) {
    double cost = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double omega = 2.0 * pi * s.samples[i].freq_hz;
        const Complex zm = eval_model(kind, p, omega, nullptr);
        const Complex dz = zm - s.samples[i].z;
        cost += w.w_re[i] * dz.real() * dz.real() + w.w_im[i] * dz.imag() * dz.imag();
    }
    return cost;
}

// Normal equations at theta: H = J^T J, g = J^T r in log-parameter space.
inline void normal_equations(ModelKind kind, const double* p, const Spectrum& s,
                             const SampleWeights& w, int np, double* H, double* g) {
    std::fill(H, H + np * np, 0.0);
    std::fill(g, g + np, 0.0);
    std::array<Complex, 3> dz_dlog{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double omega = 2.0 * pi * s.samples[i].freq_hz;
        const Complex zm = eval_model(kind, p, omega, dz_dlog.data());
        const Complex dz = zm - s.samples[i].z;
        for (int j = 0; j < np; ++j) {
            g[j] += w.w_re[i] * dz_dlog[j].real() * dz.real() +
                    w.w_im[i] * dz_dlog[j].imag() * dz.imag();
            for (int k = j; k < np; ++k) {
                H[j * np + k] += w.w_re[i] * dz_dlog[j].real() * dz_dlog[k].real() +
                                 w.w_im[i] * dz_dlog[j].imag() * dz_dlog[k].imag();
            }
        }
    }
    for (int j = 0; j < np; ++j)
        for (int k = 0; k < j; ++k) H[j * np + k] = H[k * np + j];
}

// Gaussian elimination with partial pivoting for the tiny normal systems.
inline bool solve_small(int n, double* a, double* b) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
        if (a[pivot * n + col] == 0.0 || !std::isfinite(a[pivot * n + col])) return false;
        if (pivot != col) {
            for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double factor = a[row * n + col] * inv;
            if (factor == 0.0) continue;
            for (int k = col; k < n; ++k) a[row * n + k] -= factor * a[col * n + k];
            b[row] -= factor * b[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double acc = b[row];
        for (int k = row + 1; k < n; ++k) acc -= a[row * n + k] * b[k];
        b[row] = acc / a[row * n + row];
        if (!std::isfinite(b[row])) return false;
    }
    return true;
}

// Starting parameters per model kind. Falls back to coarse heuristics when
// the spectrum is too short for the full RC guess.
inline std::array<double, 3> initial_params(ModelKind kind, const Spectrum& s) {
    const SpectrumSample* lo = &s.samples.front();
    const SpectrumSample* hi = &s.samples.front();
    for (const auto& sample : s.samples) {
        if (sample.freq_hz < lo->freq_hz) lo = &sample;
        if (sample.freq_hz > hi->freq_hz) hi = &sample;
    }
    InitialGuess rc;
    try {
        rc = initial_guess_rc(s);
    } catch (const std::invalid_argument&) {
        rc.r_ohm = std::max(std::abs(lo->z), 1e-12);
        rc.c_farad = 1.0 / (2.0 * pi * std::sqrt(lo->freq_hz * hi->freq_hz) * rc.r_ohm);
        rc.low_confidence = true;
    }

    std::array<double, 3> p{rc.r_ohm, rc.c_farad, 0.0};
    if (kind == ModelKind::ParallelRC_SeriesR) {
        const double r2 = std::max(std::abs(hi->z), 1e-9 * rc.r_ohm);
        p[2] = r2;
        p[0] = std::max(rc.r_ohm - r2, 0.1 * rc.r_ohm);
    } else if (kind == ModelKind::ParallelRC_Warburg) {
        // Warburg coefficient from the lowest decade, where |Z_W| ~ Aw*sqrt(2/omega)
        const double f_min = lo->freq_hz;
        std::vector<double> est;
        for (const auto& sample : s.samples) {
            if (sample.freq_hz <= 10.0 * f_min * (1.0 + 1e-12)) {
                est.push_back(std::abs(sample.z) *
                              std::sqrt(2.0 * pi * sample.freq_hz) / std::sqrt(2.0));
            }
        }
        const double aw = std::max(median(std::move(est)), 1e-12);
        p[2] = aw;
        // peel the Warburg off the DC-end sample to localize the RC section
        const Complex zw{aw / std::sqrt(2.0 * pi * lo->freq_hz),
                         -aw / std::sqrt(2.0 * pi * lo->freq_hz)};
        const double r1 = std::abs(lo->z - zw);
        p[0] = std::max(r1, 1e-3 * std::abs(lo->z));
        double best_dist = std::numeric_limits<double>::infinity();
        double f45 = std::sqrt(lo->freq_hz * hi->freq_hz);
        for (const auto& sample : s.samples) {
            const Complex zc = sample.z - Complex{aw / std::sqrt(2.0 * pi * sample.freq_hz),
                                                  -aw / std::sqrt(2.0 * pi * sample.freq_hz)};
            const double phase = std::atan2(zc.imag(), zc.real()) * 180.0 / pi;
            const double dist = std::abs(phase + 45.0);
            if (dist < best_dist) {
                best_dist = dist;
                f45 = sample.freq_hz;
            }
        }
        p[1] = 1.0 / (2.0 * pi * f45 * p[0]);
    }
    for (auto& v : p)
        if (v < 0.0 || !std::isfinite(v)) v = 1e-12;
    return p;
}

} // namespace detail

/// Complex nonlinear least squares by damped Gauss-Newton
/// (Levenberg-Marquardt) over log-parameterized values, which keeps every
/// parameter positive without constraint machinery. Deterministic for fixed
/// inputs. Never throws on non-convergence: the best parameters seen are
/// returned with converged = false.
inline FitResult fit_model(const Spectrum& s, ModelKind kind, const FitConfig& cfg = {}) {
    cfg.validate();
    const int np = param_count(kind);
    if (static_cast<int>(s.size()) < 2 * np)
        throw std::invalid_argument("fit_model: need at least 2 samples per parameter");

    const detail::SampleWeights weights = detail::build_weights(s, cfg);

    std::array<double, 3> p = detail::initial_params(kind, s);
    std::array<double, 3> theta{};
    for (int j = 0; j < np; ++j) theta[j] = std::log(p[j]);

    auto params_of = [&](const std::array<double, 3>& th) {
        std::array<double, 3> lin{};
        for (int j = 0; j < np; ++j) lin[j] = std::exp(th[j]);
        return lin;
    };

    double cost = detail::fit_cost(kind, p.data(), s, weights);
    std::array<double, 3> best_theta = theta;
    double best_cost = cost;

    double lambda = cfg.damping_init;
    constexpr double lambda_max = 1e14;
    bool converged = false;
    int iterations = 0;

    std::array<double, 9> H{}, A{};
    std::array<double, 3> g{}, step{};

    while (iterations < cfg.max_iterations && !converged) {
        ++iterations;
        detail::normal_equations(kind, p.data(), s, weights, np, H.data(), g.data());

        bool accepted = false;
        double last_step_norm = std::numeric_limits<double>::infinity();
        while (!accepted) {
            for (int j = 0; j < np * np; ++j) A[j] = H[j];
            double max_diag = 0.0;
            for (int j = 0; j < np; ++j) max_diag = std::max(max_diag, H[j * np + j]);
            for (int j = 0; j < np; ++j) {
                const double d = H[j * np + j];
                A[j * np + j] = d + lambda * (d > 0.0 ? d : std::max(max_diag, 1e-300));
            }
            for (int j = 0; j < np; ++j) step[j] = -g[j];
            const bool solved = detail::solve_small(np, A.data(), step.data());

            if (solved) {
                last_step_norm = 0.0;
                for (int j = 0; j < np; ++j)
                    last_step_norm = std::max(last_step_norm, std::abs(step[j]));
                std::array<double, 3> theta_try = theta;
                for (int j = 0; j < np; ++j) theta_try[j] += step[j];
                const auto p_try = params_of(theta_try);
                const double cost_try = detail::fit_cost(kind, p_try.data(), s, weights);
                if (std::isfinite(cost_try) && cost_try < cost) {
                    const double improvement = cost - cost_try;
                    theta = theta_try;
                    p = p_try;
                    cost = cost_try;
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_theta = theta;
                    }
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    if (last_step_norm <= cfg.param_tol &&
                        improvement <= cfg.resid_tol * std::max(cost, 1e-300))
                        converged = true;
                    break;
                }
            }
            lambda *= 10.0;
            if (lambda > lambda_max) break;
        }
        if (!accepted) {
            // no downhill step exists at any damping: we are at a minimum if
            // the last proposed step was already negligible
            if (last_step_norm <= cfg.param_tol) converged = true;
            break;
        }
    }

    theta = best_theta;
    p = params_of(theta);
    cost = best_cost;

    FitResult result;
    result.model = kind;
    result.converged = converged;
    result.iterations = iterations;
    result.r1_ohm = p[0];
    result.c1_farad = p[1];
    if (kind == ModelKind::ParallelRC_SeriesR) result.r2_ohm = p[2];
    if (kind == ModelKind::ParallelRC_Warburg) result.aw = p[2];

    const auto m = static_cast<double>(2 * s.size());
    result.residual_norm = std::sqrt(cost / m);

    // Gauss-Markov standard errors from the linearized normal matrix.
    std::array<double, 3> sigma_log;
    sigma_log.fill(std::numeric_limits<double>::quiet_NaN());
    detail::normal_equations(kind, p.data(), s, weights, np, H.data(), g.data());
    const double dof = m - np;
    if (dof > 0.0) {
        const double s2 = cost / dof;
        // invert H column by column
        std::array<double, 9> cov{};
        bool ok = true;
        for (int col = 0; col < np && ok; ++col) {
            for (int j = 0; j < np * np; ++j) A[j] = H[j];
            std::array<double, 3> e{};
            e[col] = 1.0;
            ok = detail::solve_small(np, A.data(), e.data());
            for (int j = 0; j < np; ++j) cov[j * np + col] = e[j];
        }
        if (ok) {
            for (int j = 0; j < np; ++j) {
                const double var = s2 * cov[j * np + j];
                sigma_log[j] = var > 0.0 ? std::sqrt(var) : 0.0;
            }
        }
    }
    result.r1_stderr = p[0] * sigma_log[0];
    result.c1_stderr = p[1] * sigma_log[1];
    if (kind == ModelKind::ParallelRC_SeriesR) result.r2_stderr = p[2] * sigma_log[2];
    if (kind == ModelKind::ParallelRC_Warburg) result.aw_stderr = p[2] * sigma_log[2];
    return result;
}

/// Diffusion-element screening over the lowest frequency decade of a
/// spectrum: slope of log|Z| against log(omega) plus the median phase.
struct WarburgDetection {
    bool determinate = false;
    bool present = false;
    double slope = 0.0;
    double median_phase_deg = 0.0;
};

inline WarburgDetection detect_warburg(const Spectrum& s) {
    if (s.empty()) throw std::invalid_argument("detect_warburg: spectrum must be non-empty");
    double f_min = s.samples.front().freq_hz;
    for (const auto& sample : s.samples) f_min = std::min(f_min, sample.freq_hz);

    std::vector<double> log_w, log_mag, phases;
    double decade_hi = f_min;
    for (const auto& sample : s.samples) {
        if (sample.freq_hz <= 10.0 * f_min * (1.0 + 1e-12)) {
            const double omega = 2.0 * pi * sample.freq_hz;
            log_w.push_back(std::log10(omega));
            log_mag.push_back(std::log10(std::abs(sample.z)));
            phases.push_back(std::atan2(sample.z.imag(), sample.z.real()) * 180.0 / pi);
            decade_hi = std::max(decade_hi, sample.freq_hz);
        }
    }

    WarburgDetection det;
    det.determinate = log_w.size() >= 4 && decade_hi / f_min >= 9.5;
    if (log_w.size() >= 2) {
        det.slope = fit_line(log_w, log_mag).slope;
        det.median_phase_deg = detail::median(phases);
    }
    det.present = det.determinate && det.slope >= -0.6 && det.slope <= -0.4 &&
                  det.median_phase_deg >= -55.0 && det.median_phase_deg <= -35.0;
    return det;
}

/// Regime gates relative to the stationary contact resistance R0.
struct RegimeThresholds {
    double boundary_factor = 10.0; // Boundary when R1 < boundary_factor * R0
    double open_factor = 1e4;      // FullFilm when R1 > open_factor * R0
};

inline LubricationRegime classify_regime(const FitResult& fit, double r0_ohm,
                                         const RegimeThresholds& thresholds = {}) {
    if (!(r0_ohm > 0.0)) throw std::invalid_argument("classify_regime: R0 must be > 0");
    if (fit.r1_ohm < thresholds.boundary_factor * r0_ohm) return LubricationRegime::Boundary;
    if (fit.r1_ohm > thresholds.open_factor * r0_ohm) return LubricationRegime::FullFilm;
    return LubricationRegime::Mixed;
}

} // namespace eistrib
