#include "threshlab/expr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace threshlab {

Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }

Interval operator*(Interval a, Interval b) {
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

Interval operator/(Interval a, Interval b) {
    if (b.lo <= 0.0 && b.hi >= 0.0) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {-inf, inf};
    }
    return a * Interval{1.0 / b.hi, 1.0 / b.lo};
}

Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Interval interval_cos(Interval a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a.width() >= two_pi) return {-1.0, 1.0};
    const double c1 = std::cos(a.lo);
    const double c2 = std::cos(a.hi);
    Interval r{std::min(c1, c2), std::max(c1, c2)};
    // maxima at 2k*pi, minima at (2k+1)*pi
    const double k_max = std::ceil(a.lo / two_pi);
    if (k_max * two_pi <= a.hi) r.hi = 1.0;
    const double k_min = std::ceil((a.lo - std::numbers::pi) / two_pi);
    if (k_min * two_pi + std::numbers::pi <= a.hi) r.lo = -1.0;
    return r;
}

namespace {

Interval interval_pow(Interval x, unsigned k) {
    if (k == 0) return Interval::point(1.0);
    const double a = std::pow(x.lo, k);
    const double b = std::pow(x.hi, k);
    if (k % 2 == 1 || x.lo >= 0.0) return {std::min(a, b), std::max(a, b)};
    if (x.hi <= 0.0) return {b, a};
    return {0.0, std::max(a, b)};
}

}  // namespace

ScalarField1D::ScalarField1D() : ops_{Op{OpCode::Const}} {}

ScalarField1D::ScalarField1D(std::vector<Op> ops) : ops_(std::move(ops)) {
    std::size_t depth = 0;
    std::size_t max_depth = 0;
    for (const Op& op : ops_) {
        switch (op.code) {
            case OpCode::Const:
            case OpCode::Affine:
            case OpCode::Monomial:
            case OpCode::Bump: ++depth; break;
            default:
                if (depth < 2) throw std::logic_error("malformed postfix program");
                --depth;
        }
        max_depth = std::max(max_depth, depth);
    }
    if (depth != 1) throw std::logic_error("malformed postfix program");
    if (max_depth > kMaxStack) throw std::length_error("expression too deep");
}

ScalarField1D ScalarField1D::constant(double c) { return ScalarField1D({Op{OpCode::Const, 0, c}}); }

ScalarField1D ScalarField1D::affine(double slope, double intercept) {
    return ScalarField1D({Op{OpCode::Affine, 0, slope, intercept}});
}

ScalarField1D ScalarField1D::monomial(double coeff, unsigned power) {
    return ScalarField1D({Op{OpCode::Monomial, power, coeff}});
}

ScalarField1D ScalarField1D::bump(const BumpParams& p) {
    if (!(p.width > 0.0) || !(p.radius > 0.0)) throw std::invalid_argument("bump width and radius must be positive");
    return ScalarField1D({Op{OpCode::Bump, 0, p.center, p.width, p.amplitude, p.radius}});
}

ScalarField1D ScalarField1D::combine(const ScalarField1D& lhs, const ScalarField1D& rhs, OpCode code) {
    std::vector<Op> ops;
    ops.reserve(lhs.ops_.size() + rhs.ops_.size() + 1);
    ops.insert(ops.end(), lhs.ops_.begin(), lhs.ops_.end());
    ops.insert(ops.end(), rhs.ops_.begin(), rhs.ops_.end());
    ops.push_back(Op{code});
    return ScalarField1D(std::move(ops));
}

ScalarField1D operator+(const ScalarField1D& a, const ScalarField1D& b) {
    return ScalarField1D::combine(a, b, ScalarField1D::OpCode::Add);
}
ScalarField1D operator-(const ScalarField1D& a, const ScalarField1D& b) {
    return ScalarField1D::combine(a, b, ScalarField1D::OpCode::Sub);
}
ScalarField1D operator*(const ScalarField1D& a, const ScalarField1D& b) {
    return ScalarField1D::combine(a, b, ScalarField1D::OpCode::Mul);
}
ScalarField1D operator/(const ScalarField1D& a, const ScalarField1D& b) {
    return ScalarField1D::combine(a, b, ScalarField1D::OpCode::Div);
}
ScalarField1D operator*(double c, const ScalarField1D& a) { return ScalarField1D::constant(c) * a; }

double ScalarField1D::value(double x) const {
    std::array<double, kMaxStack> stack;
    std::size_t top = 0;
    for (const Op& op : ops_) {
        switch (op.code) {
            case OpCode::Const: stack[top++] = op.a; break;
            case OpCode::Affine: stack[top++] = op.a * x + op.b; break;
            case OpCode::Monomial: {
                double p = 1.0;
                for (unsigned i = 0; i < op.power; ++i) p *= x;
                stack[top++] = op.a * p;
                break;
            }
            case OpCode::Bump: {
                const double u = (x - op.a) / op.b;
                const double r = op.d;
                if (std::abs(u) >= r) {
                    stack[top++] = 0.0;
                } else {
                    const double c = std::cos(std::numbers::pi * u / (2.0 * r));
                    stack[top++] = op.c * c * c;
                }
                break;
            }
            case OpCode::Add: --top; stack[top - 1] += stack[top]; break;
            case OpCode::Sub: --top; stack[top - 1] -= stack[top]; break;
            case OpCode::Mul: --top; stack[top - 1] *= stack[top]; break;
            case OpCode::Div: --top; stack[top - 1] /= stack[top]; break;
        }
    }
    return stack[0];
}

Jet ScalarField1D::jet(double x) const {
    std::array<Jet, kMaxStack> stack;
    std::size_t top = 0;
    for (const Op& op : ops_) {
        switch (op.code) {
            case OpCode::Const: stack[top++] = {op.a, 0.0}; break;
            case OpCode::Affine: stack[top++] = {op.a * x + op.b, op.a}; break;
            case OpCode::Monomial: {
                if (op.power == 0) {
                    stack[top++] = {op.a, 0.0};
                    break;
                }
                double lower = 1.0;  // x^(power-1)
                for (unsigned i = 1; i < op.power; ++i) lower *= x;
                stack[top++] = {op.a * lower * x, op.a * op.power * lower};
                break;
            }
            case OpCode::Bump: {
                const double u = (x - op.a) / op.b;
                const double r = op.d;
                if (std::abs(u) >= r) {
                    stack[top++] = {0.0, 0.0};
                } else {
                    const double w = std::numbers::pi / (2.0 * r);
                    const double c = std::cos(w * u);
                    const double s = std::sin(w * u);
                    stack[top++] = {op.c * c * c, -2.0 * op.c * w * c * s / op.b};
                }
                break;
            }
            case OpCode::Add: {
                --top;
                stack[top - 1].value += stack[top].value;
                stack[top - 1].slope += stack[top].slope;
                break;
            }
            case OpCode::Sub: {
                --top;
                stack[top - 1].value -= stack[top].value;
                stack[top - 1].slope -= stack[top].slope;
                break;
            }
            case OpCode::Mul: {
                --top;
                const Jet l = stack[top - 1];
                const Jet r = stack[top];
                stack[top - 1] = {l.value * r.value, l.slope * r.value + l.value * r.slope};
                break;
            }
            case OpCode::Div: {
                --top;
                const Jet l = stack[top - 1];
                const Jet r = stack[top];
                const double q = l.value / r.value;
                stack[top - 1] = {q, (l.slope - q * r.slope) / r.value};
                break;
            }
        }
    }
    return stack[0];
}

IntervalJet ScalarField1D::enclose(Interval x) const {
    std::array<IntervalJet, kMaxStack> stack;
    std::size_t top = 0;
    for (const Op& op : ops_) {
        switch (op.code) {
            case OpCode::Const: stack[top++] = {Interval::point(op.a), Interval::point(0.0)}; break;
            case OpCode::Affine:
                stack[top++] = {Interval::point(op.a) * x + Interval::point(op.b), Interval::point(op.a)};
                break;
            case OpCode::Monomial: {
                const Interval v = Interval::point(op.a) * interval_pow(x, op.power);
                const Interval s = op.power == 0
                                       ? Interval::point(0.0)
                                       : Interval::point(op.a * op.power) * interval_pow(x, op.power - 1);
                stack[top++] = {v, s};
                break;
            }
            case OpCode::Bump: {
                const double r = op.d;
                const Interval u{(x.lo - op.a) / op.b, (x.hi - op.a) / op.b};
                const bool outside = u.lo <= -r || u.hi >= r;
                const Interval inner{std::max(u.lo, -r), std::min(u.hi, r)};
                IntervalJet j{Interval::point(0.0), Interval::point(0.0)};
                if (inner.lo < inner.hi || (inner.lo == inner.hi && std::abs(inner.lo) < r)) {
                    const double w = std::numbers::pi / r;
                    // cos^2(wu/2) = (1 + cos(wu)) / 2 and its u-derivative is -(w/2) sin(wu)
                    const Interval cw = interval_cos(Interval{w * inner.lo, w * inner.hi});
                    const Interval sw = interval_cos(
                        Interval{w * inner.lo - std::numbers::pi / 2.0, w * inner.hi - std::numbers::pi / 2.0});
                    const Interval v = Interval::point(op.c * 0.5) * (Interval::point(1.0) + cw);
                    const Interval s = Interval::point(-op.c * w / (2.0 * op.b)) * sw;
                    j = {v, s};
                    if (outside) j = {hull(j.value, Interval::point(0.0)), hull(j.slope, Interval::point(0.0))};
                }
                stack[top++] = j;
                break;
            }
            case OpCode::Add: {
                --top;
                stack[top - 1] = {stack[top - 1].value + stack[top].value, stack[top - 1].slope + stack[top].slope};
                break;
            }
            case OpCode::Sub: {
                --top;
                stack[top - 1] = {stack[top - 1].value - stack[top].value, stack[top - 1].slope - stack[top].slope};
                break;
            }
            case OpCode::Mul: {
                --top;
                const IntervalJet l = stack[top - 1];
                const IntervalJet r = stack[top];
                stack[top - 1] = {l.value * r.value, l.slope * r.value + l.value * r.slope};
                break;
            }
            case OpCode::Div: {
                --top;
                const IntervalJet l = stack[top - 1];
                const IntervalJet r = stack[top];
                const Interval q = l.value / r.value;
                stack[top - 1] = {q, (l.slope - q * r.slope) / r.value};
                break;
            }
        }
    }
    return stack[0];
}

std::vector<double> ScalarField1D::breakpoints() const {
    std::vector<double> out;
    for (const Op& op : ops_) {
        if (op.code != OpCode::Bump) continue;
        out.push_back(op.a - op.b * op.d);
        out.push_back(op.a);
        out.push_back(op.a + op.b * op.d);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double max_derivative_mismatch(const ScalarField1D& f, int points, double step) {
    const std::vector<double> kinks = f.breakpoints();
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        // central differences are meaningless across a second-derivative jump
        const bool near_kink = std::any_of(kinks.begin(), kinks.end(),
                                           [&](double k) { return std::abs(k - x) <= 2.0 * step; });
        if (near_kink) continue;
        const double fd = (f.value(x + step) - f.value(x - step)) / (2.0 * step);
        const double exact = f.derivative(x);
        worst = std::max(worst, std::abs(fd - exact) / std::max(std::abs(exact), 1.0));
    }
    return worst;
}

std::vector<double> unit_grid(std::size_t count) {
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = 0.0;
        return g;
    }
    for (std::size_t i = 0; i < count; ++i) g[i] = static_cast<double>(i) / static_cast<double>(count - 1);
    g.back() = 1.0;
    return g;
}

}  // namespace threshlab
