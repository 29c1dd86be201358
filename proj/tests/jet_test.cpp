#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "csfd/jet.hpp"

using namespace csfd;

namespace {

// Plain dense polynomial arithmetic: the independent oracle for jet ops.
using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b, std::size_t keep) {
    Poly r(keep, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (i + j < keep) r[i + j] += a[i] * b[j];
    return r;
}

double poly_eval(const Poly& p, double x) {
    double r = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

Jet1 jet_of_poly(const Poly& p, double center, int order) {
    Jet1 x = Jet1::variable(center, order);
    Jet1 r = Jet1::constant(0.0, center, order);
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

} // namespace

TEST(Jet1, MulOfLinearFactors) {
    // (1+x)(1-x) = 1 - x^2
    Jet1 a = Jet1::variable(0.0, 2) + 1.0;
    Jet1 b = -Jet1::variable(0.0, 2) + 1.0;
    Jet1 p = a * b;
    EXPECT_DOUBLE_EQ(p.coeff(0), 1.0);
    EXPECT_DOUBLE_EQ(p.coeff(1), 0.0);
    EXPECT_DOUBLE_EQ(p.coeff(2), -1.0);
}

TEST(Jet1, DivByExpSeries) {
    Jet1 one = Jet1::constant(1.0, 0.0, 2);
    Jet1 e(0.0, 2);
    e.set_coeff(0, 1.0);
    e.set_coeff(1, 1.0);
    e.set_coeff(2, 0.5);
    Jet1 r = one / e;
    EXPECT_DOUBLE_EQ(r.coeff(0), 1.0);
    EXPECT_DOUBLE_EQ(r.coeff(1), -1.0);
    EXPECT_DOUBLE_EQ(r.coeff(2), 0.5);
}

TEST(Jet1, AddZeroIsIdentity) {
    Jet1 a(1.5, 3);
    a.set_coeff(0, 2.0);
    a.set_coeff(1, -3.0);
    a.set_coeff(3, 0.25);
    Jet1 z(1.5, 3);
    Jet1 s = a + z;
    for (int k = 0; k <= 3; ++k) EXPECT_DOUBLE_EQ(s.coeff(k), a.coeff(k));
}

TEST(Jet1, ExpOfIdentityJet) {
    Jet1 x(0.0, 3);
    x.set_coeff(1, 1.0);
    Jet1 e = jet1_detail::exp(x);
    EXPECT_DOUBLE_EQ(e.coeff(0), 1.0);
    EXPECT_DOUBLE_EQ(e.coeff(1), 1.0);
    EXPECT_DOUBLE_EQ(e.coeff(2), 0.5);
    EXPECT_NEAR(e.coeff(3), 1.0 / 6.0, 1e-16);
}

TEST(Jet1, LnOfConstant) {
    Jet1 c = Jet1::constant(4.0, 0.0, 1);
    Jet1 l = jet1_detail::log(c);
    EXPECT_DOUBLE_EQ(l.coeff(0), std::log(4.0));
    EXPECT_DOUBLE_EQ(l.coeff(1), 0.0);
}

TEST(Jet1, PartialOfExpAtShiftedCenter) {
    // d^k/dx^k exp(x) at x0 equals exp(x0) for every k, within 4 ulps.
    for (double x0 : {0.0, 0.7, -1.3}) {
        Jet1 e = jet1_detail::exp(Jet1::variable(x0, 6));
        const double expect = std::exp(x0);
        const double ulp = std::nextafter(expect, 2 * expect) - expect;
        for (int k = 0; k <= 6; ++k)
            EXPECT_NEAR(e.derivative(k), expect, 4 * std::abs(ulp)) << "k=" << k;
    }
}

TEST(Jet1, PartialExamples) {
    Jet1 e = jet1_detail::exp(Jet1::variable(0.0, 3));
    EXPECT_DOUBLE_EQ(e.derivative(2), 1.0);
    EXPECT_DOUBLE_EQ(e.derivative(0), e.value());
}

TEST(Jet1, MismatchedOperandsThrow) {
    Jet1 a(0.0, 2), b(0.0, 3), c(1.0, 2);
    EXPECT_THROW(a + b, UsageError);
    EXPECT_THROW(a * c, UsageError);
    EXPECT_THROW(a.derivative(5), UsageError);
}

TEST(Jet1, DivByZeroConstantTermThrows) {
    Jet1 a = Jet1::constant(1.0, 0.0, 2);
    Jet1 b = Jet1::variable(0.0, 2);
    b.set_coeff(0, 0.0);
    EXPECT_THROW(a / b, SingularityError);
    EXPECT_THROW(jet1_detail::log(b), SingularityError);
    EXPECT_THROW(jet1_detail::sqrt(-b), SingularityError);
}

TEST(Jet1, RandomPolynomialsMatchSymbolicOracle) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const int K = 5;
    for (int trial = 0; trial < 50; ++trial) {
        Poly p(K + 1), q(K + 1);
        for (auto& v : p) v = unif(rng);
        for (auto& v : q) v = unif(rng);
        const double c = unif(rng);
        // Taylor coefficients of p about x = c by repeated synthetic
        // division by (x - c): remainder of round k is p^(k)(c)/k!.
        auto shift = [&](Poly poly) {
            Poly out(K + 1, 0.0);
            for (int k = 0; k <= K && !poly.empty(); ++k) {
                const std::size_t n = poly.size() - 1;
                Poly quo(n, 0.0);
                if (n > 0) {
                    quo[n - 1] = poly[n];
                    for (std::size_t i = n - 1; i >= 1; --i)
                        quo[i - 1] = poly[i] + c * quo[i];
                }
                out[k] = poly[0] + (n > 0 ? c * quo[0] : 0.0);
                poly = quo;
            }
            return out;
        };

        Jet1 jp = jet_of_poly(p, c, K);
        Jet1 jq = jet_of_poly(q, c, K);
        Poly sp = shift(p), sq = shift(q);
        for (int k = 0; k <= K; ++k) {
            EXPECT_NEAR(jp.coeff(k), sp[k], 1e-10) << "p shift k=" << k;
            EXPECT_NEAR(jq.coeff(k), sq[k], 1e-10);
        }

        // Product against exact polynomial product truncated at K.
        Poly prod = poly_mul(sp, sq, K + 1);
        Jet1 jprod = jp * jq;
        double scale = 1.0;
        for (double v : prod) scale = std::max(scale, std::abs(v));
        for (int k = 0; k <= K; ++k) EXPECT_NEAR(jprod.coeff(k), prod[k], 1e-12 * scale);

        // Quotient: check by multiplying back (independent of the division
        // recurrence).
        if (std::abs(sq[0]) > 0.2) {
            Jet1 jdiv = jp / jq;
            Jet1 back = jdiv * jq;
            for (int k = 0; k <= K; ++k)
                EXPECT_NEAR(back.coeff(k), jp.coeff(k), 1e-10 * scale);
        }
    }
}

TEST(Jet1, UnaryFunctionsMatchFiniteDifferences) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.3, 1.1);
    const int K = 4;
    const double step = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Poly p(K + 1);
        for (auto& v : p) v = unif(rng);
        const double c = unif(rng);
        Jet1 A = jet_of_poly(p, c, K);

        struct Case {
            const char* name;
            Jet1 jet;
            double lo, hi;
        };
        Jet1 s(c, K), co(c, K);
        jet1_detail::sincos(A, s, co);
        std::vector<Case> cases;
        cases.push_back({"exp", jet1_detail::exp(A), 0, 0});
        cases.push_back({"ln", jet1_detail::log(A), 0, 0});
        cases.push_back({"sqrt", jet1_detail::sqrt(A), 0, 0});
        cases.push_back({"sin", s, 0, 0});
        cases.push_back({"cos", co, 0, 0});
        cases.push_back({"tan", jet1_detail::tan_like(A, false), 0, 0});
        cases.push_back({"tanh", jet1_detail::tan_like(A, true), 0, 0});
        cases.push_back({"pow3", jet1_detail::pow_int(A, 3), 0, 0});

        auto scalar_fn = [&](const char* name, double v) {
            if (!std::strcmp(name, "exp")) return std::exp(v);
            if (!std::strcmp(name, "ln")) return std::log(v);
            if (!std::strcmp(name, "sqrt")) return std::sqrt(v);
            if (!std::strcmp(name, "sin")) return std::sin(v);
            if (!std::strcmp(name, "cos")) return std::cos(v);
            if (!std::strcmp(name, "tan")) return std::tan(v);
            if (!std::strcmp(name, "tanh")) return std::tanh(v);
            return v * v * v;
        };

        for (const auto& cs : cases) {
            const double up = scalar_fn(cs.name, poly_eval(p, c + step));
            const double dn = scalar_fn(cs.name, poly_eval(p, c - step));
            const double fd = (up - dn) / (2 * step);
            const double jet_deriv = cs.jet.derivative(1);
            EXPECT_NEAR(jet_deriv, fd, 1e-6 * (1.0 + std::abs(fd))) << cs.name;
        }
    }
}

TEST(JetN, PartialOfBilinear) {
    const double center[2] = {0.0, 0.0};
    JetN x = JetN::variable(0, center, 2);
    JetN y = JetN::variable(1, center, 2);
    JetN xy = x * y;
    EXPECT_DOUBLE_EQ(xy.partial({1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(xy.partial({0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(xy.partial({2, 0}), 0.0);
}

TEST(JetN, ValueAtZeroMultiIndex) {
    const double center[3] = {1.0, -2.0, 0.5};
    JetN x = JetN::variable(2, center, 2);
    EXPECT_DOUBLE_EQ(x.partial({0, 0, 0}), 0.5);
}

TEST(JetN, MulMatchesBruteForceConvolution) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double center[2] = {0.3, -0.7};
    const int K = 4;
    JetN a(center, K), b(center, K);
    auto sp = JetSpace::get(2, K);
    std::vector<double> av(sp->size()), bv(sp->size());
    for (int i = 0; i < sp->size(); ++i) {
        av[i] = unif(rng);
        bv[i] = unif(rng);
        a.set_coeff(sp->exponent(i), av[i]);
        b.set_coeff(sp->exponent(i), bv[i]);
    }
    JetN prod = a * b;
    for (int i = 0; i < sp->size(); ++i) {
        const auto& e = sp->exponent(i);
        double want = 0.0;
        for (int j = 0; j < sp->size(); ++j) {
            const auto& ej = sp->exponent(j);
            if (ej[0] <= e[0] && ej[1] <= e[1]) {
                const int rest[2] = {e[0] - ej[0], e[1] - ej[1]};
                want += av[j] * bv[sp->index_of(rest)];
            }
        }
        EXPECT_NEAR(prod.coeff(e), want, 1e-12);
    }
}

TEST(JetN, CompositionMatchesFiniteDifferences) {
    // grad of exp(sin(x) + x*y^2) at a point, jets vs central differences.
    const double pt[2] = {0.4, -0.6};
    const int K = 3;
    JetN x = JetN::variable(0, pt, K);
    JetN y = JetN::variable(1, pt, K);
    JetN f = jetn_detail::exp(jetn_detail::sin(x) + x * (y * y));
    auto scalar = [](double xx, double yy) { return std::exp(std::sin(xx) + xx * yy * yy); };
    const double h = 1e-5;
    const double fx = (scalar(pt[0] + h, pt[1]) - scalar(pt[0] - h, pt[1])) / (2 * h);
    const double fy = (scalar(pt[0], pt[1] + h) - scalar(pt[0], pt[1] - h)) / (2 * h);
    EXPECT_NEAR(f.partial({1, 0}), fx, 1e-6 * (1 + std::abs(fx)));
    EXPECT_NEAR(f.partial({0, 1}), fy, 1e-6 * (1 + std::abs(fy)));
    const double fxy = (scalar(pt[0] + h, pt[1] + h) - scalar(pt[0] + h, pt[1] - h) -
                        scalar(pt[0] - h, pt[1] + h) + scalar(pt[0] - h, pt[1] - h)) /
                       (4 * h * h);
    EXPECT_NEAR(f.partial({1, 1}), fxy, 1e-4 * (1 + std::abs(fxy)));
}

TEST(JetN, DivisionMultipliesBack) {
    const double pt[3] = {0.1, 0.2, -0.3};
    const int K = 4;
    JetN x = JetN::variable(0, pt, K);
    JetN y = JetN::variable(1, pt, K);
    JetN z = JetN::variable(2, pt, K);
    JetN num = jetn_detail::sin(x + y) + z * z + 2.0;
    JetN den = jetn_detail::exp(x * y) + 0.5;
    JetN q = num / den;
    JetN back = q * den;
    auto sp = JetSpace::get(3, K);
    for (int i = 0; i < sp->size(); ++i)
        EXPECT_NEAR(back.coeff_at(i), num.coeff_at(i), 1e-12);
}

TEST(JetN, MismatchThrows) {
    const double p1[2] = {0.0, 0.0};
    const double p2[2] = {1.0, 0.0};
    JetN a(p1, 2), b(p2, 2), c(p1, 3);
    EXPECT_THROW(a + b, UsageError);
    EXPECT_THROW(a * c, UsageError);
    EXPECT_THROW(a.partial({3, 0}), UsageError);
}

TEST(JetN, PartialAbsentModes) {
    // Construction populates every |k| <= K entry; untouched ones are zero.
    const double pt[2] = {0.0, 0.0};
    JetN c = JetN::constant(5.0, pt, 3);
    EXPECT_DOUBLE_EQ(c.partial({2, 1}), 0.0);
    EXPECT_DOUBLE_EQ(c.partial({0, 0}), 5.0);
}
