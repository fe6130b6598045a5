#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace threshlab {

/// Closed interval [lo, hi]. Arithmetic is the plain (non outward-rounded)
/// natural interval extension; enclosures are exact up to floating rounding.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }
    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator*(Interval a, Interval b);
Interval operator/(Interval a, Interval b);
Interval hull(Interval a, Interval b);
Interval interval_cos(Interval a);

/// Value and first derivative at a point.
struct Jet {
    double value = 0.0;
    double slope = 0.0;
};

/// Enclosures of value and first derivative over a cell.
struct IntervalJet {
    Interval value;
    Interval slope;
};

/// Raised-cosine bump parameters: amplitude * cos^2(pi u / (2 radius)) for
/// |u| <= radius, zero outside, where u = (x - center) / width.
struct BumpParams {
    double center = 0.0;
    double width = 1.0;
    double amplitude = 1.0;
    double radius = 1.0;
};

/// A closed-form C^1 function of one real variable, stored as a postfix
/// program over {constant, affine, monomial, bump, +, -, *, /}. Immutable;
/// composition builds a new program.
class ScalarField1D {
public:
    ScalarField1D();  // the zero function

    static ScalarField1D constant(double c);
    /// slope * x + intercept
    static ScalarField1D affine(double slope, double intercept);
    /// coeff * x^power
    static ScalarField1D monomial(double coeff, unsigned power);
    static ScalarField1D bump(const BumpParams& params);

    friend ScalarField1D operator+(const ScalarField1D& a, const ScalarField1D& b);
    friend ScalarField1D operator-(const ScalarField1D& a, const ScalarField1D& b);
    friend ScalarField1D operator*(const ScalarField1D& a, const ScalarField1D& b);
    friend ScalarField1D operator/(const ScalarField1D& a, const ScalarField1D& b);
    friend ScalarField1D operator*(double c, const ScalarField1D& a);

    double operator()(double x) const { return value(x); }
    double value(double x) const;
    double derivative(double x) const { return jet(x).slope; }
    Jet jet(double x) const;
    IntervalJet enclose(Interval x) const;

    /// Points where the program has a derivative kink of higher order
    /// (bump support edges and centers). Used as mandatory panel boundaries.
    std::vector<double> breakpoints() const;

    std::size_t size() const { return ops_.size(); }

private:
    enum class OpCode : std::uint8_t { Const, Affine, Monomial, Bump, Add, Sub, Mul, Div };

    struct Op {
        OpCode code;
        unsigned power = 0;
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;
        double d = 0.0;
    };

    static constexpr std::size_t kMaxStack = 64;

    explicit ScalarField1D(std::vector<Op> ops);
    static ScalarField1D combine(const ScalarField1D& lhs, const ScalarField1D& rhs, OpCode code);

    std::vector<Op> ops_;
};

/// Largest relative discrepancy between the symbolic derivative and a central
/// difference with the given step over `points` equispaced nodes of [0,1].
/// Relative error uses max(|f'|, 1) as the scale.
double max_derivative_mismatch(const ScalarField1D& f, int points = 101, double step = 1e-5);

/// Equispaced nodes i/(count-1) of [0,1].
std::vector<double> unit_grid(std::size_t count);

}  // namespace threshlab
