#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mfp {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double inf = std::numeric_limits<double>::infinity();

// Evaluations closer than this to [0,inf) or to the unit circle are rejected.
inline constexpr double boundary_margin = 1e-12;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MFP_ERROR(Name)                          \
    class Name : public Error {                  \
    public:                                      \
        explicit Name(const std::string& what)   \
            : Error(#Name ": " + what) {}        \
    }

MFP_ERROR(DomainError);
MFP_ERROR(QuadratureError);
MFP_ERROR(PoleError);
MFP_ERROR(ZeroEtaError);
MFP_ERROR(InversionError);
MFP_ERROR(WindingAmbiguity);
MFP_ERROR(BranchError);
MFP_ERROR(ExtrapolationError);
MFP_ERROR(RootIsolationError);
MFP_ERROR(BracketError);
MFP_ERROR(PhaseError);
MFP_ERROR(ModulusError);
MFP_ERROR(LocateError);
MFP_ERROR(ContinuationError);
MFP_ERROR(ParseError);
MFP_ERROR(MeasureError);

#undef MFP_ERROR

/// log(1 + w) for complex w, accurate when |w| is small.
inline Complex log1p(Complex w) {
    if (std::abs(w) < 1e-2) {
        // Alternating series; |w|^12 / 12 < 1e-24 so twelve terms suffice.
        Complex term = w;
        Complex sum = 0.0;
        for (int k = 1; k <= 12; ++k) {
            sum += (k % 2 ? 1.0 : -1.0) * term / double(k);
            term *= w;
        }
        return sum;
    }
    return std::log(1.0 + w);
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, two_pi);
    if (w <= -pi) w += two_pi;
    return w;
}

/// %.17g text of a double, with inf and nan spelled out.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace mfp
