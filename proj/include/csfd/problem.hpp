#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "csfd/errors.hpp"
#include "csfd/expr.hpp"
#include "csfd/jet.hpp"

namespace csfd {

// PDE data bundle for -div(a grad u) = f on (l1,l2)^d with u = g on the
// boundary. In manufactured mode f is not an expression: its values and
// jets are derived from jets of a and u, and g is u restricted to the
// boundary.
struct Problem {
    int dim = 0;
    double l1 = 0.0, l2 = 1.0;
    std::string name;
    Expression a;
    std::optional<Expression> f;
    std::optional<Expression> g;
    std::optional<Expression> u_exact;
    bool manufactured = false;

    double a_value(std::span<const double> p) const { return a.evaluate(p); }

    double u_value(std::span<const double> p) const {
        if (!u_exact) throw UsageError("problem '" + name + "' has no exact solution");
        return u_exact->evaluate(p);
    }

    double g_value(std::span<const double> p) const {
        if (manufactured) return u_exact->evaluate(p);
        if (!g) throw UsageError("problem '" + name + "' has no boundary data");
        return g->evaluate(p);
    }

    // f as a jet of total order K. For manufactured problems this is
    // -sum_i d_i(a d_i u) assembled from jets of a (order K+1) and u
    // (order K+2); the derivatives drop the extra orders.
    JetN f_jetn(std::span<const double> p, int order) const {
        if (f) return f->jetn(p, order);
        require_manufactured();
        JetN A = a.jetn(p, order + 1);
        JetN U = u_exact->jetn(p, order + 2);
        JetN r = JetN::constant(0.0, p, order);
        for (int i = 0; i < dim; ++i) {
            JetN flux = A * U.derivative_jet(i).truncated(order + 1);
            r = r - flux.derivative_jet(i);
        }
        return r;
    }

    Jet1 f_jet1(double x, int order) const {
        if (dim != 1) throw UsageError("f_jet1 requires a 1-D problem");
        if (f) return f->jet1(x, order);
        require_manufactured();
        Jet1 A = a.jet1(x, order + 1);
        Jet1 U = u_exact->jet1(x, order + 2);
        Jet1 flux = A * U.derivative_jet().truncated(order + 1);
        return -flux.derivative_jet();
    }

    double f_value(std::span<const double> p) const {
        if (f) return f->evaluate(p);
        return f_jetn(p, 0).value();
    }

    JetN a_jetn(std::span<const double> p, int order) const {
        JetN A = a.jetn(p, order);
        if (A.value() <= 0.0) throw nonpositive_a(p);
        return A;
    }

    Jet1 a_jet1(double x, int order) const {
        Jet1 A = a.jet1(x, order);
        if (A.value() <= 0.0) throw nonpositive_a(std::span<const double>(&x, 1));
        return A;
    }

    SingularityError nonpositive_a(std::span<const double> p) const {
        std::string s = "coefficient a is nonpositive at (";
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(p[i]);
        }
        s += ")";
        return SingularityError(s);
    }

private:
    void require_manufactured() const {
        if (!manufactured || !u_exact)
            throw UsageError("problem '" + name + "' cannot derive f");
    }
};

// Transformed data at one point: jets of a~ = -ln a and f~ = -f/a.
struct DerivedFields {
    double a_value;
    JetN a_tilde;
    JetN f_tilde;

    double atilde_partial(std::initializer_list<int> k) const { return a_tilde.partial(k); }
    double ftilde_partial(std::initializer_list<int> k) const { return f_tilde.partial(k); }
};

inline DerivedFields derived_fields(const Problem& p, std::span<const double> point,
                                    int order) {
    JetN A = p.a_jetn(point, order);
    JetN F = p.f_jetn(point, order);
    return DerivedFields{A.value(), -jetn_detail::log(A), -(F / A)};
}

inline Problem manufactured_problem(Expression a, Expression u, double l1, double l2,
                                    int dim, std::string name = "manufactured") {
    Problem p;
    p.dim = dim;
    p.l1 = l1;
    p.l2 = l2;
    p.name = std::move(name);
    p.a = std::move(a);
    p.u_exact = std::move(u);
    p.manufactured = true;
    // Positivity of a is sampled, not proven: a lattice plus a fixed batch
    // of pseudo-random points over the closed box.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> pt(static_cast<std::size_t>(dim));
    const int lattice = dim <= 2 ? 9 : (dim == 3 ? 5 : 3);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (;;) {
        for (int i = 0; i < dim; ++i)
            pt[static_cast<std::size_t>(i)] =
                l1 + (l2 - l1) * idx[static_cast<std::size_t>(i)] / (lattice - 1);
        if (p.a.evaluate(pt) <= 0.0) throw ValidationError("coefficient a is not positive on the domain");
        int ax = 0;
        while (ax < dim && ++idx[static_cast<std::size_t>(ax)] == lattice)
            idx[static_cast<std::size_t>(ax++)] = 0;
        if (ax == dim) break;
    }
    for (int s = 0; s < 200; ++s) {
        for (int i = 0; i < dim; ++i)
            pt[static_cast<std::size_t>(i)] = l1 + (l2 - l1) * unif(rng);
        if (p.a.evaluate(pt) <= 0.0) throw ValidationError("coefficient a is not positive on the domain");
    }
    return p;
}

inline Problem direct_problem(Expression a, Expression f, Expression g, double l1,
                              double l2, int dim, std::string name = "direct") {
    Problem p;
    p.dim = dim;
    p.l1 = l1;
    p.l2 = l2;
    p.name = std::move(name);
    p.a = std::move(a);
    p.f = std::move(f);
    p.g = std::move(g);
    p.manufactured = false;
    return p;
}

// The three worked examples shipped with the solver.
inline Problem builtin_problem(const std::string& name) {
    if (name == "example1") {
        Problem p = manufactured_problem(parse_expression("ln(3*x^3+5*x^2+4)", 1),
                                         parse_expression("4^(x^2+2*x+3)", 1), 0.0, 1.0, 1,
                                         "example1");
        return p;
    }
    if (name == "example2") {
        Problem p = manufactured_problem(
            parse_expression("4+cos(5*pi*tanh(5*x-3))+sin(17.5*tanh(4*y-2))", 2),
            parse_expression("exp(sin(20*ln(3*x^2+2*y^2+1)))*cos(20*y)", 2), 0.0, 1.0, 2,
            "example2");
        return p;
    }
    if (name == "example3") {
        Problem p = manufactured_problem(parse_expression("2+sin(5*x-3*y-3*z)", 3),
                                         parse_expression("cos(4*x)*sin(4*y)*cos(5*z)", 3),
                                         -1.0, 1.0, 3, "example3");
        return p;
    }
    throw UsageError("unknown builtin problem '" + name + "'");
}

inline std::vector<std::string> builtin_problem_names() {
    return {"example1", "example2", "example3"};
}

} // namespace csfd
