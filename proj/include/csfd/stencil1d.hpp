#pragma once

#include <cmath>
#include <vector>

#include "csfd/errors.hpp"
#include "csfd/jet.hpp"
#include "csfd/problem.hpp"

namespace csfd {

// One-dimensional compact symmetric scheme of arbitrary even order M.
//
// At a midpoint b* the tables hold jets of
//   E_{2,1} = -a'/a,          E_{j+1,1} = E_{j,1}' - (a'/a) E_{j,1},
//   F_{2,0} = -1/a,           F_{j,-1}  = -E_{j,1}/a,
//   F_{j+1,k} = F_{j,k}' + F_{j,k-1}.
// The F seeds carry the opposite sign from the printed recursion: expanding
// u(b+s) with u'' = -(a'/a)u' - f/a forces the f-coefficient of the s^2 term
// to be -1/(2a), i.e. F_{2,0} = -1/a. With the positive seed the scheme
// reduces, for a == 1, to f_h = -h^2 f with no higher corrections, which is
// only 2nd-order; the negative seed reproduces the classical weights
// (-1/12, -1/360, ...) and the expected O(h^{M+2}) residual.
struct RecursionTables {
    double b_star = 0.0;
    int M = 0;
    std::vector<Jet1> E; // E[j-2] holds E_{j,1}, 2 <= j <= M+1
    std::vector<std::vector<Jet1>> F; // F[j-2][k+1] holds F_{j,k}, -1 <= k <= j-2

    double E_value(int j) const { return E.at(static_cast<std::size_t>(j - 2)).value(); }
    double F_value(int j, int k) const {
        return F.at(static_cast<std::size_t>(j - 2)).at(static_cast<std::size_t>(k + 1)).value();
    }
};

inline RecursionTables recursion_tables(const Expression& a, double b_star, int M) {
    if (M < 2) throw UsageError("scheme order must be at least 2");
    const int base = M + 2;
    Jet1 A = a.jet1(b_star, base);
    if (A.value() <= 0.0)
        throw SingularityError("coefficient a is nonpositive at " + std::to_string(b_star));

    RecursionTables T;
    T.b_star = b_star;
    T.M = M;

    // ratio = a'/a at full available order; truncated as orders shrink.
    Jet1 ratio = A.derivative_jet() / A.truncated(base - 1);

    T.E.reserve(static_cast<std::size_t>(M));
    T.E.push_back(-ratio); // E_2, order base-1
    for (int j = 2; j <= M; ++j) {
        const Jet1& Ej = T.E.back();
        const int ord = Ej.order() - 1;
        T.E.push_back(Ej.derivative_jet() - ratio.truncated(ord) * Ej.truncated(ord));
    }

    T.F.resize(static_cast<std::size_t>(M));
    {
        const int ord2 = base - 1;
        std::vector<Jet1> F2;
        F2.push_back(-(T.E[0].truncated(ord2) / A.truncated(ord2))); // F_{2,-1}
        F2.push_back(-(Jet1::constant(1.0, b_star, ord2) / A.truncated(ord2))); // F_{2,0}
        T.F[0] = std::move(F2);
    }
    for (int j = 3; j <= M + 1; ++j) {
        const auto& prev = T.F[static_cast<std::size_t>(j - 3)];
        const int ord = prev.front().order() - 1;
        std::vector<Jet1> row;
        row.reserve(static_cast<std::size_t>(j));
        row.push_back(-(T.E[static_cast<std::size_t>(j - 2)].truncated(ord) /
                        A.truncated(ord))); // F_{j,-1}
        for (int k = 0; k <= j - 2; ++k) {
            // F_{j,k} = F_{j-1,k}' + F_{j-1,k-1}; entries beyond the previous
            // row's range are zero.
            Jet1 term(b_star, ord);
            if (k <= j - 3)
                term = prev[static_cast<std::size_t>(k + 1)].derivative_jet().truncated(ord);
            term = term + prev[static_cast<std::size_t>(k)].truncated(ord);
            row.push_back(term);
        }
        T.F[static_cast<std::size_t>(j - 2)] = std::move(row);
    }
    return T;
}

// Coefficients (ascending, even degrees only populated) of the polynomial
//   E^M(b*; h) = 2a(b*) * (2 + sum_{j odd >= 3}^{M+1} 2 E_{j,1}/j! (h/2)^{j-1})^{-1}
// with the reciprocal expanded as a power series in h and truncated at
// `trunc_degree`.
inline std::vector<double> curly_E_series(const RecursionTables& T, double a_value,
                                          int trunc_degree) {
    Jet1 den(0.0, trunc_degree);
    den.set_coeff(0, 2.0);
    for (int j = 3; j <= T.M + 1; j += 2) {
        if (j - 1 > trunc_degree) break;
        den.set_coeff(j - 1, 2.0 * T.E_value(j) / (factorial(j) * std::pow(2.0, j - 1)));
    }
    Jet1 num = Jet1::constant(2.0 * a_value, 0.0, trunc_degree);
    Jet1 series = num / den;
    std::vector<double> out(static_cast<std::size_t>(trunc_degree) + 1);
    for (int k = 0; k <= trunc_degree; ++k) out[static_cast<std::size_t>(k)] = series.coeff(k);
    return out;
}

inline double eval_series(const std::vector<double>& s, double h) {
    double r = 0.0;
    for (std::size_t i = s.size(); i-- > 0;) r = r * h + s[i];
    return r;
}

// E^M evaluated as displayed in the theorem: finite denominator sum over
// j <= M+1, numeric reciprocal (no series truncation).
inline double curly_E_rational(const RecursionTables& T, double a_value, double h) {
    double den = 2.0;
    for (int j = 3; j <= T.M + 1; j += 2)
        den += 2.0 * T.E_value(j) / factorial(j) * std::pow(h / 2.0, j - 1);
    return 2.0 * a_value / den;
}

// G_k(b*; h) = sum_{j odd, j >= k+2}^{M+1} F_{j,k}/j! (h/2)^{j-k-2} * 2.
inline double curly_G(const RecursionTables& T, int k, double h) {
    double g = 0.0;
    for (int j = k + 2; j <= T.M + 1; ++j) {
        if ((j - 1) % 2 != 0) continue; // only odd j survive the parity factor
        g += 2.0 * T.F_value(j, k) / factorial(j) * std::pow(h / 2.0, j - k - 2);
    }
    return g;
}

// Everything the assembly needs from one midpoint: the shared link
// coefficient and the G_k values feeding the right-hand side of both
// adjacent rows.
struct Midpoint1D {
    double C = 0.0;
    std::vector<double> G;
};

inline Midpoint1D midpoint_1d(const Problem& p, double xm, double h, int M) {
    RecursionTables T = recursion_tables(p.a, xm, M);
    const double a_mid = p.a.evaluate({xm});
    Midpoint1D m;
    m.C = eval_series(curly_E_series(T, a_mid, M), h);
    m.G.resize(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) m.G[static_cast<std::size_t>(k)] = curly_G(T, k, h);
    return m;
}

struct Stencil1D {
    double center = 0.0;
    double h = 0.0;
    int M = 0;
    double c_minus = 0.0, c_zero = 0.0, c_plus = 0.0;
    std::vector<double> rhs_weights; // d_0(h) ... d_{M-1}(h)
    double f_h = 0.0;
};

inline std::vector<double> rhs_weights_1d(const Midpoint1D& left, const Midpoint1D& right,
                                          int M) {
    std::vector<double> d(static_cast<std::size_t>(M));
    for (int l = 0; l < M; ++l) {
        const double p2 = std::pow(2.0, l + 2);
        double v = 2.0 * (((l + 1) % 2 == 0 ? 1.0 : -1.0) - 1.0) / (p2 * factorial(l + 1));
        for (int k = 0; k <= l; ++k) {
            const double sgn = ((l - k + 1) % 2 == 0) ? 1.0 : -1.0;
            v += (left.C * sgn * left.G[static_cast<std::size_t>(k)] +
                  right.C * right.G[static_cast<std::size_t>(k)]) /
                 (p2 * factorial(l - k));
        }
        d[static_cast<std::size_t>(l)] = v;
    }
    return d;
}

inline Stencil1D stencil_1d(const Problem& p, double c_star, double h, int M) {
    if (M < 2 || M % 2 != 0) throw UsageError("1-D scheme order must be even and >= 2");
    if (h <= 0.0) throw UsageError("mesh size must be positive");
    Stencil1D s;
    s.center = c_star;
    s.h = h;
    s.M = M;
    const Midpoint1D left = midpoint_1d(p, c_star - h / 2.0, h, M);
    const Midpoint1D right = midpoint_1d(p, c_star + h / 2.0, h, M);
    s.c_minus = left.C;
    s.c_plus = right.C;
    s.c_zero = -s.c_plus - s.c_minus;
    s.rhs_weights = rhs_weights_1d(left, right, M);
    Jet1 fj = p.f_jet1(c_star, M - 1);
    s.f_h = 0.0;
    for (int l = M - 1; l >= 0; --l)
        s.f_h += s.rhs_weights[static_cast<std::size_t>(l)] * std::pow(h, l + 2) *
                 fj.derivative(l);
    return s;
}

// ---------------------------------------------------------------------------
// Explicit 12th-order closed form: E^12(x; h) = a + w1 h^2 + ... + w5 h^10
// with the rational q-table below. Lower even orders drop the trailing
// w-terms.
// ---------------------------------------------------------------------------
namespace e12_detail {

struct Q {
    long long num, den;
    double v() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// q[i] holds q_{i+1}.
inline const Q* q_table() {
    static const Q q[82] = {
        {-1, 12},          {1, 24},           {-1, 180},          {17, 1440},
        {-1, 720},         {-1, 240},         {1, 1920},          {-11, 15120},
        {23, 10080},       {-137, 80640},     {11, 120960},       {-1, 1260},
        {31, 40320},       {-1, 16128},       {31, 161280},       {-1, 20160},
        {-1, 26880},       {1, 322560},       {-107, 907200},     {887, 1814400},
        {-377, 604800},    {989, 4147200},    {-107, 14515200},   {-17, 100800},
        {13, 37800},       {-193, 1612800},   {-1, 22400},        {5, 387072},
        {101, 2419200},    {-197, 3225600},   {17, 3225600},      {19, 1382400},
        {-1, 2073600},     {-1, 120960},      {1, 129024},        {-1, 829440},
        {1, 774144},       {-1, 2903040},     {-1, 5806080},      {1, 92897280},
        {-2549, 119750400},   {26263, 239500800},  {-94043, 479001600}, {67339, 479001600},
        {-35971, 1094860800}, {2549, 3832012800},  {-751, 19958400},    {1319, 11404800},
        {-1921, 19958400},    {22313, 1277337600}, {-379, 22809600},    {39, 1971200},
        {-1087, 510935040},   {-1, 887040},        {37, 3942400},       {-541, 22809600},
        {7643, 567705600},    {-751, 1277337600},  {521, 79833600},     {-5743, 1277337600},
        {83, 340623360},      {-17669, 30656102400}, {101, 958003200},  {-299, 159667200},
        {601, 159667200},     {-1087, 851558400},  {-29, 29937600},     {59, 218972160},
        {83, 567705600},      {-1, 162201600},     {193, 638668800},    {-3349, 7664025600},
        {299, 7664025600},    {83, 851558400},     {-1, 141926400},     {-1, 23950080},
        {59, 1532805120},     {-1, 170311680},     {59, 12262440960},   {-1, 766402560},
        {-1, 2043740160},     {1, 40874803200},
    };
    return q;
}

inline double qv(int i) { return q_table()[i - 1].v(); }

// w_k(x) given a = a(x) and d[k] = a^(k)(x).
inline double w1(double a, const double* d) {
    return qv(1) * d[1] * d[1] / a + qv(2) * d[2];
}
inline double w2(double a, const double* d) {
    const double a2 = a * a, a3 = a2 * a;
    return qv(3) * std::pow(d[1], 4) / a3 + qv(4) * d[2] * d[1] * d[1] / a2 +
           qv(5) * d[2] * d[2] / a + qv(6) * d[3] * d[1] / a + qv(7) * d[4];
}
inline double w3(double a, const double* d) {
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
    return qv(8) * std::pow(d[1], 6) / a5 + qv(9) * d[2] * std::pow(d[1], 4) / a4 +
           qv(10) * d[2] * d[2] * d[1] * d[1] / a3 + qv(11) * std::pow(d[2], 3) / a2 +
           qv(12) * d[3] * std::pow(d[1], 3) / a3 + qv(13) * d[3] * d[2] * d[1] / a2 +
           qv(14) * d[3] * d[3] / a + qv(15) * d[4] * d[1] * d[1] / a2 +
           qv(16) * d[4] * d[2] / a + qv(17) * d[5] * d[1] / a + qv(18) * d[6];
}
inline double w4(double a, const double* d) {
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a, a6 = a5 * a, a7 = a6 * a;
    return qv(19) * std::pow(d[1], 8) / a7 + qv(20) * d[2] * std::pow(d[1], 6) / a6 +
           qv(21) * d[2] * d[2] * std::pow(d[1], 4) / a5 +
           qv(22) * std::pow(d[2], 3) * d[1] * d[1] / a4 + qv(23) * std::pow(d[2], 4) / a3 +
           qv(24) * d[3] * std::pow(d[1], 5) / a5 +
           qv(25) * d[3] * d[2] * std::pow(d[1], 3) / a4 +
           qv(26) * d[3] * d[2] * d[2] * d[1] / a3 + qv(27) * d[3] * d[3] * d[1] * d[1] / a3 +
           qv(28) * d[3] * d[3] * d[2] / a2 + qv(29) * d[4] * std::pow(d[1], 4) / a4 +
           qv(30) * d[4] * d[2] * d[1] * d[1] / a3 + qv(31) * d[4] * d[2] * d[2] / a2 +
           qv(32) * d[4] * d[3] * d[1] / a2 + qv(33) * d[4] * d[4] / a +
           qv(34) * d[5] * std::pow(d[1], 3) / a3 + qv(35) * d[5] * d[2] * d[1] / a2 +
           qv(36) * d[5] * d[3] / a + qv(37) * d[6] * d[1] * d[1] / a2 +
           qv(38) * d[6] * d[2] / a + qv(39) * d[7] * d[1] / a + qv(40) * d[8];
}
inline double w5(double a, const double* d) {
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a, a6 = a5 * a, a7 = a6 * a,
                 a8 = a7 * a, a9 = a8 * a;
    return qv(41) * std::pow(d[1], 10) / a9 + qv(42) * d[2] * std::pow(d[1], 8) / a8 +
           qv(43) * d[2] * d[2] * std::pow(d[1], 6) / a7 +
           qv(44) * std::pow(d[2], 3) * std::pow(d[1], 4) / a6 +
           qv(45) * std::pow(d[2], 4) * d[1] * d[1] / a5 + qv(46) * std::pow(d[2], 5) / a4 +
           qv(47) * d[3] * std::pow(d[1], 7) / a7 +
           qv(48) * d[3] * d[2] * std::pow(d[1], 5) / a6 +
           qv(49) * d[3] * d[2] * d[2] * std::pow(d[1], 3) / a5 +
           qv(50) * d[3] * std::pow(d[2], 3) * d[1] / a4 +
           qv(51) * d[3] * d[3] * std::pow(d[1], 4) / a5 +
           qv(52) * d[3] * d[3] * d[2] * d[1] * d[1] / a4 +
           qv(53) * d[3] * d[3] * d[2] * d[2] / a3 + qv(54) * std::pow(d[3], 3) * d[1] / a3 +
           qv(55) * d[4] * std::pow(d[1], 6) / a6 +
           qv(56) * d[4] * d[2] * std::pow(d[1], 4) / a5 +
           qv(57) * d[4] * d[2] * d[2] * d[1] * d[1] / a4 +
           qv(58) * d[4] * std::pow(d[2], 3) / a3 +
           qv(59) * d[4] * d[3] * std::pow(d[1], 3) / a4 +
           qv(60) * d[4] * d[3] * d[2] * d[1] / a3 + qv(61) * d[4] * d[3] * d[3] / a2 +
           qv(62) * d[4] * d[4] * d[1] * d[1] / a3 + qv(63) * d[4] * d[4] * d[2] / a2 +
           qv(64) * d[5] * std::pow(d[1], 5) / a5 +
           qv(65) * d[5] * d[2] * std::pow(d[1], 3) / a4 +
           qv(66) * d[5] * d[2] * d[2] * d[1] / a3 + qv(67) * d[5] * d[3] * d[1] * d[1] / a3 +
           qv(68) * d[5] * d[3] * d[2] / a2 + qv(69) * d[5] * d[4] * d[1] / a2 +
           qv(70) * d[5] * d[5] / a + qv(71) * d[6] * std::pow(d[1], 4) / a4 +
           qv(72) * d[6] * d[2] * d[1] * d[1] / a3 + qv(73) * d[6] * d[2] * d[2] / a2 +
           qv(74) * d[6] * d[3] * d[1] / a2 + qv(75) * d[6] * d[4] / a +
           qv(76) * d[7] * std::pow(d[1], 3) / a3 + qv(77) * d[7] * d[2] * d[1] / a2 +
           qv(78) * d[7] * d[3] / a + qv(79) * d[8] * d[1] * d[1] / a2 +
           qv(80) * d[8] * d[2] / a + qv(81) * d[9] * d[1] / a + qv(82) * d[10];
}

} // namespace e12_detail

// Evaluates the printed closed form at x, keeping the w_k h^{2k} terms the
// order-M scheme retains (2k <= M-2, so order 2 keeps only a and order 12
// keeps all five corrections).
inline double closed_form_E12(const Expression& a, double x, double h, int M) {
    if (M < 2 || M > 12 || M % 2 != 0)
        throw UsageError("closed-form coefficients exist for even orders 2..12");
    Jet1 A = a.jet1(x, 10);
    if (A.value() <= 0.0)
        throw SingularityError("coefficient a is nonpositive at " + std::to_string(x));
    double d[11];
    for (int k = 0; k <= 10; ++k) d[k] = A.derivative(k);
    const double av = d[0];
    const int terms = M / 2 - 1;
    double r = av;
    const double h2 = h * h;
    double hp = h2;
    using namespace e12_detail;
    if (terms >= 1) r += w1(av, d) * hp;
    hp *= h2;
    if (terms >= 2) r += w2(av, d) * hp;
    hp *= h2;
    if (terms >= 3) r += w3(av, d) * hp;
    hp *= h2;
    if (terms >= 4) r += w4(av, d) * hp;
    hp *= h2;
    if (terms >= 5) r += w5(av, d) * hp;
    return r;
}

// The full five-term form, independent of a requested scheme order.
inline double closed_form_E12_full(const Expression& a, double x, double h) {
    return closed_form_E12(a, x, h, 12);
}

} // namespace csfd
