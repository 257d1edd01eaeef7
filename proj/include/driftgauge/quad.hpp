#ifndef DRIFTGAUGE_QUAD_HPP
#define DRIFTGAUGE_QUAD_HPP

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "driftgauge/errors.hpp"

namespace driftgauge::quad {

using Fn = std::function<double(double)>;

struct QuadConfig {
    double tol = 1e-8;
    double window = 1.0; // length of the endpoint window analyzed
    int max_levels = 60;
    double exponent_margin = 0.05;
    double divergence_cap = 1e12;
};

enum class IntegralClass { Finite, Divergent, Inconclusive };

enum class Side { FromAbove, FromBelow };

// Outcome of classifying an improper integral at a singular endpoint.
struct IntegralVerdict {
    IntegralClass cls = IntegralClass::Inconclusive;
    double value = 0.0; // meaningful for Finite only
    double error_estimate = std::numeric_limits<double>::quiet_NaN();
    // local power p with f(x) ~ C (x-a)^p near the endpoint (for infinite
    // endpoints, the power is in the transformed variable u = 1/x)
    double exponent_estimate = std::numeric_limits<double>::quiet_NaN();
    int levels_used = 0;
    std::vector<double> partial_sums;
    std::string note;

    bool finite() const { return cls == IntegralClass::Finite; }
    bool divergent() const { return cls == IntegralClass::Divergent; }
    bool inconclusive() const { return cls == IntegralClass::Inconclusive; }
};

const char* to_string(IntegralClass c);

// Adaptive Gauss-Kronrod 7/15 integration over [c, d].  Returns (value,
// error_estimate) with error_estimate <= tol*(1+|value|) for smooth
// integrands; throws NoConvergence when the subdivision budget is spent.
std::pair<double, double> integrate(const Fn& f, double c, double d, double tol);

// Classify \int f near `endpoint` (finite or +/-infinity) over the window
// adjacent to it.  f must have eventually constant sign on the window.
// Infinite endpoints are mapped to 0+ via x = +-1/u; cfg.window is then the
// window in u, i.e. the region |x| >= 1/window is analyzed.
IntegralVerdict classify_improper(const Fn& f, double endpoint, Side side,
                                  const QuadConfig& cfg);

// Extended real: value of a limit that may be infinite or undecidable.
struct ExtendedReal {
    enum class Kind { Finite, PlusInfinity, MinusInfinity, Unknown };
    Kind kind = Kind::Unknown;
    double value = std::numeric_limits<double>::quiet_NaN();
    IntegralVerdict details;

    bool finite() const { return kind == Kind::Finite; }
    bool infinite() const {
        return kind == Kind::PlusInfinity || kind == Kind::MinusInfinity;
    }
    bool unknown() const { return kind == Kind::Unknown; }
};

// Limit at `endpoint` of the primitive F(x) = \int_anchor^x g(y) dy of a
// positive density g.  Used for scale-function endpoint values, with the
// normalization F(anchor) = 0.
ExtendedReal endpoint_limit(const Fn& g, double endpoint, double anchor,
                            const QuadConfig& cfg);

} // namespace driftgauge::quad

#endif
