#pragma once

// Free-space diffusion Green's function, the voxel self-energy constant,
// and the analytic convergence bound for the Born series.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "diffborn/errors.hpp"

namespace diffborn {

inline constexpr double kPi = 3.14159265358979323846;

/// Background optical constants and the derived diffuse wave number.
/// The library works in nondimensional units alpha0 = d0 = 1, so kd = 1
/// and lambda_d = 2*pi; user-facing lengths in diffuse wavelengths are
/// converted on ingestion.
struct Medium {
    double alpha0 = 1.0; // background absorption rate
    double d0 = 1.0;     // background diffusion coefficient
    double kd = 1.0;     // sqrt(alpha0/d0)
    double lambda_d = 2.0 * kPi;

    Medium() = default;
    Medium(double alpha0_, double d0_)
        : alpha0(alpha0_), d0(d0_), kd(std::sqrt(alpha0_ / d0_)),
          lambda_d(2.0 * kPi / std::sqrt(alpha0_ / d0_)) {
        if (!(alpha0_ > 0.0) || !(d0_ > 0.0))
            throw Error("Medium: alpha0 and d0 must be positive");
    }
};

/// Free-space Green's function exp(-kd*|r-r'|) / (4*pi*D0*|r-r'|).
inline double g_free(const Eigen::Vector3d& r, const Eigen::Vector3d& rp,
                     const Medium& medium) {
    const double d = (r - rp).norm();
    if (d <= 1e-12 * medium.lambda_d)
        throw SingularArguments("g_free: coincident arguments");
    return std::exp(-medium.kd * d) / (4.0 * kPi * medium.d0 * d);
}

/// f(x) = 1 - (1+x)*exp(-x); increases from 0 to 1 on [0, inf).
inline double f_shape(double x) {
    if (x < 0.0)
        throw NegativeArgument("f_shape: negative argument");
    if (x < 1e-4) {
        // series, avoids cancellation near zero
        return x * x * (0.5 - x / 3.0 + x * x / 8.0);
    }
    return 1.0 - (1.0 + x) * std::exp(-x);
}

/// Integral of g_free over a ball of radius a, evaluated at radial
/// coordinate r from the ball center. Finite at r = 0.
inline double ball_integral(double r, double a, const Medium& medium) {
    if (r < 0.0)
        throw NegativeArgument("ball_integral: r must be nonnegative");
    if (!(a > 0.0))
        throw NegativeArgument("ball_integral: a must be positive");
    const double kd = medium.kd;
    const double x = kd * r;
    double sinhc; // sinh(x)/x, removable singularity at x = 0
    if (x < 1e-4)
        sinhc = 1.0 + x * x / 6.0 + x * x * x * x / 120.0;
    else
        sinhc = std::sinh(x) / x;
    const double ka = kd * a;
    return (1.0 - (1.0 + ka) * std::exp(-ka) * sinhc) / (medium.d0 * kd * kd);
}

/// Self-energy of a cubic voxel of pitch h: the Green's function integrated
/// over the sphere of equivalent volume, Q_F = f(kd*R_eq) / (kd^2 * D0).
inline double q_self(double h, const Medium& medium) {
    if (!(h > 0.0))
        throw NegativeArgument("q_self: h must be positive");
    const double r_eq = std::cbrt(3.0 / (4.0 * kPi)) * h;
    return f_shape(medium.kd * r_eq) / (medium.kd * medium.kd * medium.d0);
}

/// Equivalent-sphere radius for a cubic voxel of pitch h.
inline double r_equivalent(double h) {
    return std::cbrt(3.0 / (4.0 * kPi)) * h;
}

enum class BoundRegime { small_ka, large_ka, general };

/// Result of the analytic convergence bound for support of radius a:
/// the Born series converges when delta_alpha/alpha0 < threshold.
struct BoundVerdict {
    double a = 0.0;         // enclosing radius (nondimensional length)
    double threshold = 0.0; // max admissible delta_alpha/alpha0
    bool satisfied = true;  // for the contrast passed to born_bound
    BoundRegime regime = BoundRegime::general;
};

inline const char* to_string(BoundRegime r) {
    switch (r) {
    case BoundRegime::small_ka: return "small_ka";
    case BoundRegime::large_ka: return "large_ka";
    default: return "general";
    }
}

/// Convergence bound delta_alpha < alpha0 / f(kd*a) for an inhomogeneity
/// contained in a ball of radius a. `contrast` is delta_alpha/alpha0.
inline BoundVerdict born_bound(double a, const Medium& medium,
                               double contrast = 0.0) {
    if (!(a > 0.0))
        throw NegativeArgument("born_bound: a must be positive");
    const double ka = medium.kd * a;
    BoundVerdict v;
    v.a = a;
    v.threshold = 1.0 / f_shape(ka);
    v.satisfied = contrast < v.threshold;
    v.regime = ka < 0.1   ? BoundRegime::small_ka
               : ka > 10.0 ? BoundRegime::large_ka
                           : BoundRegime::general;
    return v;
}

} // namespace diffborn
