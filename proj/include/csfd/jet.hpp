#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <map>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "csfd/errors.hpp"

namespace csfd {

inline double factorial(int k) {
    static const std::vector<double> table = [] {
        std::vector<double> t(171);
        t[0] = 1.0;
        for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    if (k < 0 || k > 170) throw UsageError("factorial argument out of range");
    return table[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Jet1: univariate truncated Taylor expansion at a point.
// coeff(k) stores f^(k)(center)/k!. Arithmetic requires matching center and
// order; truncation keeps terms of degree <= order.
// ---------------------------------------------------------------------------
class Jet1 {
public:
    Jet1(double center, int order)
        : center_(center), c_(static_cast<std::size_t>(check_order(order)) + 1, 0.0) {}

    static Jet1 constant(double v, double center, int order) {
        Jet1 j(center, order);
        j.c_[0] = v;
        return j;
    }

    // The identity function x, expanded at `center`.
    static Jet1 variable(double center, int order) {
        Jet1 j(center, order);
        j.c_[0] = center;
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double center() const { return center_; }
    double value() const { return c_[0]; }

    double coeff(int k) const {
        if (k < 0 || k > order()) throw UsageError("Jet1 coefficient index out of range");
        return c_[static_cast<std::size_t>(k)];
    }
    void set_coeff(int k, double v) {
        if (k < 0 || k > order()) throw UsageError("Jet1 coefficient index out of range");
        c_[static_cast<std::size_t>(k)] = v;
    }

    // k-th derivative value at the center: coeff(k) * k!.
    double derivative(int k) const {
        if (k < 0 || k > order()) throw UsageError("Jet1 derivative order exceeds jet order");
        return c_[static_cast<std::size_t>(k)] * factorial(k);
    }

    Jet1 truncated(int new_order) const {
        if (new_order < 0 || new_order > order())
            throw UsageError("Jet1 truncation order out of range");
        Jet1 r(center_, new_order);
        std::copy_n(c_.begin(), new_order + 1, r.c_.begin());
        return r;
    }

    // d/dx as coefficient shift; drops one order.
    Jet1 derivative_jet() const {
        if (order() < 1) throw UsageError("cannot differentiate an order-0 jet");
        Jet1 r(center_, order() - 1);
        for (int k = 1; k <= order(); ++k)
            r.c_[static_cast<std::size_t>(k - 1)] = c_[static_cast<std::size_t>(k)] * k;
        return r;
    }

    // Polynomial value at center + dx (Horner).
    double evaluate(double dx) const {
        double r = 0.0;
        for (int k = order(); k >= 0; --k) r = r * dx + c_[static_cast<std::size_t>(k)];
        return r;
    }

    Jet1 operator-() const {
        Jet1 r = *this;
        for (double& v : r.c_) v = -v;
        return r;
    }

    friend Jet1 operator+(const Jet1& a, const Jet1& b) {
        require_compatible(a, b);
        Jet1 r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend Jet1 operator-(const Jet1& a, const Jet1& b) {
        require_compatible(a, b);
        Jet1 r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }
    friend Jet1 operator*(const Jet1& a, const Jet1& b) {
        require_compatible(a, b);
        const int n = a.order();
        Jet1 r(a.center_, n);
        for (int i = 0; i <= n; ++i) {
            const double ai = a.c_[static_cast<std::size_t>(i)];
            if (ai == 0.0) continue;
            for (int j = 0; j + i <= n; ++j)
                r.c_[static_cast<std::size_t>(i + j)] += ai * b.c_[static_cast<std::size_t>(j)];
        }
        return r;
    }
    // Power-series long division: c_i = (a_i - sum_{j<i} c_j b_{i-j}) / b_0.
    friend Jet1 operator/(const Jet1& a, const Jet1& b) {
        require_compatible(a, b);
        if (b.c_[0] == 0.0)
            throw SingularityError("division by a jet with zero constant term");
        const int n = a.order();
        Jet1 r(a.center_, n);
        for (int i = 0; i <= n; ++i) {
            double s = a.c_[static_cast<std::size_t>(i)];
            for (int j = 0; j < i; ++j)
                s -= r.c_[static_cast<std::size_t>(j)] * b.c_[static_cast<std::size_t>(i - j)];
            r.c_[static_cast<std::size_t>(i)] = s / b.c_[0];
        }
        return r;
    }

    friend Jet1 operator+(const Jet1& a, double s) {
        Jet1 r = a;
        r.c_[0] += s;
        return r;
    }
    friend Jet1 operator*(const Jet1& a, double s) {
        Jet1 r = a;
        for (double& v : r.c_) v *= s;
        return r;
    }

private:
    static int check_order(int order) {
        if (order < 0) throw UsageError("jet order must be nonnegative");
        return order;
    }
    static void require_compatible(const Jet1& a, const Jet1& b) {
        if (a.order() != b.order() || a.center_ != b.center_)
            throw UsageError("Jet1 operands must share center and order");
    }

    double center_;
    std::vector<double> c_;
};

// Composition recurrences for the analytic functions. Each one is the
// standard D'Alembert-style convolution obtained from the defining ODE of
// the outer function; see the per-function note.
namespace jet1_detail {

// exp: f' = a' f  =>  i f_i = sum_{j=1..i} j a_j f_{i-j}.
inline Jet1 exp(const Jet1& a) {
    const int n = a.order();
    Jet1 f(a.center(), n);
    f.set_coeff(0, std::exp(a.value()));
    for (int i = 1; i <= n; ++i) {
        double s = 0.0;
        for (int j = 1; j <= i; ++j) s += j * a.coeff(j) * f.coeff(i - j);
        f.set_coeff(i, s / i);
    }
    return f;
}

// ln: g' = a'/a  =>  i a_0 g_i = i a_i - sum_{j=1..i-1} j g_j a_{i-j}.
inline Jet1 log(const Jet1& a) {
    if (a.value() <= 0.0)
        throw SingularityError("ln of a jet with nonpositive constant term");
    const int n = a.order();
    Jet1 g(a.center(), n);
    g.set_coeff(0, std::log(a.value()));
    for (int i = 1; i <= n; ++i) {
        double s = i * a.coeff(i);
        for (int j = 1; j < i; ++j) s -= j * g.coeff(j) * a.coeff(i - j);
        g.set_coeff(i, s / (a.value() * i));
    }
    return g;
}

// sqrt: 2 s s' = a'  =>  s_i = (a_i - sum_{j=1..i-1} s_j s_{i-j}) / (2 s_0).
inline Jet1 sqrt(const Jet1& a) {
    if (a.value() <= 0.0)
        throw SingularityError("sqrt of a jet with nonpositive constant term");
    const int n = a.order();
    Jet1 s(a.center(), n);
    s.set_coeff(0, std::sqrt(a.value()));
    for (int i = 1; i <= n; ++i) {
        double v = a.coeff(i);
        for (int j = 1; j < i; ++j) v -= s.coeff(j) * s.coeff(i - j);
        s.set_coeff(i, v / (2.0 * s.coeff(0)));
    }
    return s;
}

// Paired recurrence: s' = a' c, c' = -a' s.
inline void sincos(const Jet1& a, Jet1& s, Jet1& c) {
    const int n = a.order();
    s = Jet1(a.center(), n);
    c = Jet1(a.center(), n);
    s.set_coeff(0, std::sin(a.value()));
    c.set_coeff(0, std::cos(a.value()));
    for (int i = 1; i <= n; ++i) {
        double si = 0.0, ci = 0.0;
        for (int j = 1; j <= i; ++j) {
            si += j * a.coeff(j) * c.coeff(i - j);
            ci -= j * a.coeff(j) * s.coeff(i - j);
        }
        s.set_coeff(i, si / i);
        c.set_coeff(i, ci / i);
    }
}

// tan: t' = a'(1 + t^2); tanh: t' = a'(1 - t^2). w tracks t^2 one order
// behind, which is all the convolution needs.
inline Jet1 tan_like(const Jet1& a, bool hyperbolic) {
    const int n = a.order();
    Jet1 t(a.center(), n);
    t.set_coeff(0, hyperbolic ? std::tanh(a.value()) : std::tan(a.value()));
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    w[0] = t.coeff(0) * t.coeff(0);
    const double sign = hyperbolic ? -1.0 : 1.0;
    for (int i = 1; i <= n; ++i) {
        double s = 0.0;
        for (int j = 1; j <= i; ++j) {
            const double one_plus_w = (i - j == 0 ? 1.0 + sign * w[0]
                                                  : sign * w[static_cast<std::size_t>(i - j)]);
            s += j * a.coeff(j) * one_plus_w;
        }
        t.set_coeff(i, s / i);
        for (int m = 0; m <= i; ++m)
            w[static_cast<std::size_t>(i)] += t.coeff(m) * t.coeff(i - m);
    }
    return t;
}

inline Jet1 pow_int(const Jet1& a, long n) {
    if (n == 0) return Jet1::constant(1.0, a.center(), a.order());
    const bool neg = n < 0;
    unsigned long e = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    Jet1 base = a;
    Jet1 acc = Jet1::constant(1.0, a.center(), a.order());
    while (e > 0) {
        if (e & 1UL) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    if (neg) return Jet1::constant(1.0, a.center(), a.order()) / acc;
    return acc;
}

} // namespace jet1_detail

// ---------------------------------------------------------------------------
// JetN: multivariate truncated Taylor expansion at a point in R^d, stored
// densely over all multi-indices of total degree <= order, graded order.
// coeff(k) stores the Taylor coefficient d^k f(center) / k! with
// k! = prod_j k_j!.
// ---------------------------------------------------------------------------
class JetSpace {
public:
    static std::shared_ptr<const JetSpace> get(int dim, int order) {
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(dim, order);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto sp = std::shared_ptr<const JetSpace>(new JetSpace(dim, order));
        cache.emplace(key, sp);
        return sp;
    }

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exponents_.size()); }
    const std::vector<int>& exponent(int i) const {
        return exponents_[static_cast<std::size_t>(i)];
    }
    int degree(int i) const { return degree_[static_cast<std::size_t>(i)]; }
    std::uint64_t key(int i) const { return keys_[static_cast<std::size_t>(i)]; }

    int index_of(std::span<const int> k) const {
        auto it = index_.find(pack(k));
        if (it == index_.end()) throw UsageError("multi-index outside jet space");
        return it->second;
    }
    int index_of_key(std::uint64_t key) const { return index_.at(key); }

    static std::uint64_t pack(std::span<const int> k) {
        std::uint64_t key = 0;
        for (std::size_t j = 0; j < k.size(); ++j)
            key |= static_cast<std::uint64_t>(k[j]) << (6 * j);
        return key;
    }

private:
    JetSpace(int dim, int order) : dim_(dim), order_(order) {
        if (dim < 1 || dim > 10) throw UsageError("JetN dimension must be in [1,10]");
        if (order < 0 || order > 60) throw UsageError("JetN order out of range");
        std::vector<int> k(static_cast<std::size_t>(dim), 0);
        for (int deg = 0; deg <= order; ++deg) emit(k, 0, deg);
        for (int i = 0; i < size(); ++i) {
            keys_.push_back(pack(exponents_[static_cast<std::size_t>(i)]));
            index_.emplace(keys_.back(), i);
        }
    }

    void emit(std::vector<int>& k, std::size_t axis, int remaining) {
        if (axis + 1 == k.size()) {
            k[axis] = remaining;
            exponents_.push_back(k);
            degree_.push_back(std::accumulate(k.begin(), k.end(), 0));
            k[axis] = 0;
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            k[axis] = v;
            emit(k, axis + 1, remaining - v);
        }
        k[axis] = 0;
    }

    int dim_;
    int order_;
    std::vector<std::vector<int>> exponents_;
    std::vector<int> degree_;
    std::vector<std::uint64_t> keys_;
    std::unordered_map<std::uint64_t, int> index_;
};

class JetN {
public:
    JetN(std::span<const double> center, int order)
        : space_(JetSpace::get(static_cast<int>(center.size()), order)),
          center_(center.begin(), center.end()),
          c_(static_cast<std::size_t>(space_->size()), 0.0) {}

    static JetN constant(double v, std::span<const double> center, int order) {
        JetN j(center, order);
        j.c_[0] = v;
        return j;
    }

    static JetN variable(int axis, std::span<const double> center, int order) {
        JetN j(center, order);
        if (axis < 0 || axis >= j.dim()) throw UsageError("variable axis out of range");
        j.c_[0] = center[static_cast<std::size_t>(axis)];
        if (order >= 1) {
            std::vector<int> e(static_cast<std::size_t>(j.dim()), 0);
            e[static_cast<std::size_t>(axis)] = 1;
            j.c_[static_cast<std::size_t>(j.space_->index_of(e))] = 1.0;
        }
        return j;
    }

    int dim() const { return space_->dim(); }
    int order() const { return space_->order(); }
    double value() const { return c_[0]; }
    const std::vector<double>& center() const { return center_; }
    const JetSpace& space() const { return *space_; }

    double coeff(std::span<const int> k) const {
        return c_[static_cast<std::size_t>(space_->index_of(k))];
    }
    double coeff_at(int flat) const { return c_[static_cast<std::size_t>(flat)]; }
    void set_coeff(std::span<const int> k, double v) {
        c_[static_cast<std::size_t>(space_->index_of(k))] = v;
    }

    // d^k f(center) = coeff(k) * prod_j k_j!.
    double partial(std::span<const int> k) const {
        int total = 0;
        double kfact = 1.0;
        for (int kj : k) {
            if (kj < 0) throw UsageError("negative multi-index entry");
            total += kj;
            kfact *= factorial(kj);
        }
        if (static_cast<int>(k.size()) != dim()) throw UsageError("multi-index dimension mismatch");
        if (total > order()) throw UsageError("partial order exceeds jet order");
        return coeff(k) * kfact;
    }
    double partial(std::initializer_list<int> k) const {
        return partial(std::span<const int>(k.begin(), k.size()));
    }

    JetN truncated(int new_order) const {
        if (new_order < 0 || new_order > order())
            throw UsageError("JetN truncation order out of range");
        JetN r(center_, new_order);
        for (int i = 0; i < r.space_->size(); ++i)
            r.c_[static_cast<std::size_t>(i)] =
                c_[static_cast<std::size_t>(space_->index_of_key(r.space_->key(i)))];
        return r;
    }

    // Partial derivative along one axis; drops one order.
    JetN derivative_jet(int axis) const {
        if (order() < 1) throw UsageError("cannot differentiate an order-0 jet");
        if (axis < 0 || axis >= dim()) throw UsageError("derivative axis out of range");
        JetN r(center_, order() - 1);
        std::vector<int> e;
        for (int i = 0; i < r.space_->size(); ++i) {
            e = r.space_->exponent(i);
            e[static_cast<std::size_t>(axis)] += 1;
            const int src = space_->index_of(e);
            r.c_[static_cast<std::size_t>(i)] =
                c_[static_cast<std::size_t>(src)] * e[static_cast<std::size_t>(axis)];
        }
        return r;
    }

    // Polynomial value at center + dx.
    double evaluate(std::span<const double> dx) const {
        double r = 0.0;
        for (int i = 0; i < space_->size(); ++i) {
            double term = c_[static_cast<std::size_t>(i)];
            const auto& e = space_->exponent(i);
            for (int j = 0; j < dim(); ++j)
                for (int q = 0; q < e[static_cast<std::size_t>(j)]; ++q)
                    term *= dx[static_cast<std::size_t>(j)];
            r += term;
        }
        return r;
    }

    JetN operator-() const {
        JetN r = *this;
        for (double& v : r.c_) v = -v;
        return r;
    }

    friend JetN operator+(const JetN& a, const JetN& b) {
        require_compatible(a, b);
        JetN r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend JetN operator-(const JetN& a, const JetN& b) {
        require_compatible(a, b);
        JetN r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }
    // Cauchy product truncated to total degree <= order.
    friend JetN operator*(const JetN& a, const JetN& b) {
        require_compatible(a, b);
        const JetSpace& sp = *a.space_;
        JetN r(a.center_, a.order());
        const int n = sp.size();
        for (int i = 0; i < n; ++i) {
            const double ai = a.c_[static_cast<std::size_t>(i)];
            if (ai == 0.0) continue;
            const int di = sp.degree(i);
            for (int j = 0; j < n; ++j) {
                if (di + sp.degree(j) > sp.order()) break;
                r.c_[static_cast<std::size_t>(sp.index_of_key(sp.key(i) + sp.key(j)))] +=
                    ai * b.c_[static_cast<std::size_t>(j)];
            }
        }
        return r;
    }
    friend JetN operator/(const JetN& a, const JetN& b);

    friend JetN operator*(const JetN& a, double s) {
        JetN r = a;
        for (double& v : r.c_) v *= s;
        return r;
    }
    friend JetN operator+(const JetN& a, double s) {
        JetN r = a;
        r.c_[0] += s;
        return r;
    }

    // f(A) = sum_k seed[k] (A - A(0))^k by Horner, where seed[k] =
    // f^(k)(A(0))/k!. Exact to the truncation order because A - A(0) has no
    // constant term.
    static JetN compose_series(std::span<const double> seed, const JetN& a) {
        JetN delta = a;
        delta.c_[0] = 0.0;
        const int n = a.order();
        JetN r = JetN::constant(seed[static_cast<std::size_t>(n)], a.center_, n);
        for (int k = n - 1; k >= 0; --k) {
            r = r * delta;
            r.c_[0] += seed[static_cast<std::size_t>(k)];
        }
        return r;
    }

private:
    static void require_compatible(const JetN& a, const JetN& b) {
        if (a.space_ != b.space_ || a.center_ != b.center_)
            throw UsageError("JetN operands must share center, dimension, and order");
    }

    std::shared_ptr<const JetSpace> space_;
    std::vector<double> center_;
    std::vector<double> c_;
};

namespace jetn_detail {

// Univariate Taylor coefficients of fn at point v, reusing the Jet1
// recurrences on the identity jet.
template <class Fn>
std::vector<double> seed(Fn&& fn, double v, int order) {
    Jet1 x = Jet1::variable(v, order);
    Jet1 r = fn(x);
    std::vector<double> s(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) s[static_cast<std::size_t>(k)] = r.coeff(k);
    return s;
}

inline JetN exp(const JetN& a) {
    return JetN::compose_series(seed([](const Jet1& x) { return jet1_detail::exp(x); },
                                     a.value(), a.order()),
                                a);
}
inline JetN log(const JetN& a) {
    if (a.value() <= 0.0)
        throw SingularityError("ln of a jet with nonpositive constant term");
    return JetN::compose_series(seed([](const Jet1& x) { return jet1_detail::log(x); },
                                     a.value(), a.order()),
                                a);
}
inline JetN sqrt(const JetN& a) {
    if (a.value() <= 0.0)
        throw SingularityError("sqrt of a jet with nonpositive constant term");
    return JetN::compose_series(seed([](const Jet1& x) { return jet1_detail::sqrt(x); },
                                     a.value(), a.order()),
                                a);
}
inline JetN sin(const JetN& a) {
    return JetN::compose_series(seed(
                                    [](const Jet1& x) {
                                        Jet1 s(x.center(), x.order()), c(x.center(), x.order());
                                        jet1_detail::sincos(x, s, c);
                                        return s;
                                    },
                                    a.value(), a.order()),
                                a);
}
inline JetN cos(const JetN& a) {
    return JetN::compose_series(seed(
                                    [](const Jet1& x) {
                                        Jet1 s(x.center(), x.order()), c(x.center(), x.order());
                                        jet1_detail::sincos(x, s, c);
                                        return c;
                                    },
                                    a.value(), a.order()),
                                a);
}
inline JetN tan(const JetN& a) {
    return JetN::compose_series(seed([](const Jet1& x) { return jet1_detail::tan_like(x, false); },
                                     a.value(), a.order()),
                                a);
}
inline JetN tanh(const JetN& a) {
    return JetN::compose_series(seed([](const Jet1& x) { return jet1_detail::tan_like(x, true); },
                                     a.value(), a.order()),
                                a);
}

inline JetN pow_int(const JetN& a, long n) {
    if (n == 0) return JetN::constant(1.0, a.center(), a.order());
    const bool neg = n < 0;
    unsigned long e = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    JetN base = a;
    JetN acc = JetN::constant(1.0, a.center(), a.order());
    while (e > 0) {
        if (e & 1UL) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    if (neg) return JetN::constant(1.0, a.center(), a.order()) / acc;
    return acc;
}

} // namespace jetn_detail

// A/B = A * (1/B) with the reciprocal composed from the series of 1/t at
// B(0); the truncated product equals the truncation of the exact quotient.
inline JetN operator/(const JetN& a, const JetN& b) {
    JetN::require_compatible(a, b);
    if (b.value() == 0.0)
        throw SingularityError("division by a jet with zero constant term");
    const int n = b.order();
    std::vector<double> recip(static_cast<std::size_t>(n) + 1);
    double p = 1.0 / b.value();
    for (int k = 0; k <= n; ++k) {
        recip[static_cast<std::size_t>(k)] = p;
        p *= -1.0 / b.value();
    }
    return a * JetN::compose_series(recip, b);
}

} // namespace csfd
