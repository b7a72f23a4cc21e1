#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace phasekit {

using Complex = std::complex<double>;

/// Coefficient-wise tolerance used for symbolic equality.
inline constexpr double kSymbolicTolerance = 1e-12;

/// Exponent pair of a phase-space monomial conj^p * alpha^q.
///
/// `p` counts the conjugate slot (creation operator, alpha* or alpha2*),
/// `q` the amplitude slot (annihilation operator, alpha or alpha1).
struct Exponents {
    int p = 0;
    int q = 0;

    friend auto operator<=>(const Exponents&, const Exponents&) = default;
};

/// Polynomial in (alpha*, alpha) with complex coefficients.
///
/// Used for the normal-ordered symbol H(alpha, alpha*) of a single-mode
/// Hamiltonian and for drift/noise polynomials derived from it. The two
/// slots are always treated as independent variables.
class Polynomial {
public:
    using TermMap = std::map<Exponents, Complex>;

    Polynomial() = default;

    static Polynomial constant(Complex c) { return monomial(0, 0, c); }

    static Polynomial monomial(int p, int q, Complex c = 1.0) {
        Polynomial out;
        out.add_term(p, q, c);
        return out;
    }

    /// Adds c to the coefficient of conj^p alpha^q; exact zeros are dropped.
    void add_term(int p, int q, Complex c) {
        if (p < 0 || q < 0) return;
        if (c == Complex{}) return;
        auto [it, inserted] = terms_.try_emplace(Exponents{p, q}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == Complex{}) terms_.erase(it);
        }
    }

    Complex coefficient(int p, int q) const {
        auto it = terms_.find(Exponents{p, q});
        return it == terms_.end() ? Complex{} : it->second;
    }

    const TermMap& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    /// Total degree; -1 for the zero polynomial.
    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e.p + e.q);
        return d;
    }

    int max_p() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e.p);
        return d;
    }

    int max_q() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e.q);
        return d;
    }

    bool is_zero(double tol = kSymbolicTolerance) const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    }

    /// Copy without coefficients of magnitude <= tol.
    Polynomial pruned(double tol = kSymbolicTolerance) const {
        Polynomial out;
        for (const auto& [e, c] : terms_)
            if (std::abs(c) > tol) out.terms_.emplace(e, c);
        return out;
    }

    /// Swap the two slots and conjugate every coefficient.
    Polynomial conjugate_map() const {
        Polynomial out;
        for (const auto& [e, c] : terms_) out.terms_.emplace(Exponents{e.q, e.p}, std::conj(c));
        return out;
    }

    bool is_hermitian(double tol = kSymbolicTolerance) const {
        for (const auto& [e, c] : terms_)
            if (std::abs(c - std::conj(coefficient(e.q, e.p))) > tol) return false;
        return true;
    }

    Polynomial& operator+=(const Polynomial& rhs) {
        for (const auto& [e, c] : rhs.terms_) add_term(e.p, e.q, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& rhs) {
        for (const auto& [e, c] : rhs.terms_) add_term(e.p, e.q, -c);
        return *this;
    }

    Polynomial& operator*=(Complex s) {
        if (s == Complex{}) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
    friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

    /// Commutative product of phase-space functions (not operator product).
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial out;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) out.add_term(ea.p + eb.p, ea.q + eb.q, ca * cb);
        return out;
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    TermMap terms_;
};

/// Coefficient-wise comparison within `tol`.
inline bool approx_equal(const Polynomial& a, const Polynomial& b, double tol = kSymbolicTolerance) {
    return (a - b).is_zero(tol);
}

/// The two independent phase-space slots.
enum class Variable { alpha, alpha_bar };

inline Polynomial differentiate(const Polynomial& poly, Variable var, int order = 1) {
    if (order <= 0) return poly;
    Polynomial out;
    for (const auto& [e, c] : poly.terms()) {
        const int power = var == Variable::alpha ? e.q : e.p;
        if (power < order) continue;
        double falling = 1.0;
        for (int k = 0; k < order; ++k) falling *= power - k;
        if (var == Variable::alpha)
            out.add_term(e.p, e.q - order, c * falling);
        else
            out.add_term(e.p - order, e.q, c * falling);
    }
    return out;
}

/// Values assigned to (alpha, alpha-bar). For Wigner points alpha_bar = conj(alpha).
struct PhasePoint {
    Complex alpha;
    Complex alpha_bar;

    static PhasePoint wigner(Complex a) { return {a, std::conj(a)}; }
};

inline Complex evaluate(const Polynomial& poly, const PhasePoint& point) {
    Complex sum{};
    for (const auto& [e, c] : poly.terms()) {
        Complex term = c;
        for (int k = 0; k < e.p; ++k) term *= point.alpha_bar;
        for (int k = 0; k < e.q; ++k) term *= point.alpha;
        sum += term;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Operator words and normal ordering

enum class Ladder { creation, annihilation };

/// Coefficient times an ordered product of ladder operators; empty means identity.
struct OperatorWord {
    std::vector<Ladder> factors;
    Complex coefficient = 1.0;
};

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace detail

/// Operator product of two normal-ordered symbols, re-expressed in normal order.
///
/// Uses a^q ad^r = sum_k k! C(q,k) C(r,k) ad^(r-k) a^(q-k).
inline Polynomial normal_ordered_product(const Polynomial& lhs, const Polynomial& rhs) {
    Polynomial out;
    for (const auto& [ea, ca] : lhs.terms())
        for (const auto& [eb, cb] : rhs.terms()) {
            const int kmax = std::min(ea.q, eb.p);
            for (int k = 0; k <= kmax; ++k) {
                const double w = detail::factorial(k) * detail::binomial(ea.q, k) * detail::binomial(eb.p, k);
                out.add_term(ea.p + eb.p - k, ea.q + eb.q - k, ca * cb * w);
            }
        }
    return out;
}

inline Polynomial normal_order(const OperatorWord& word) {
    Polynomial acc = Polynomial::constant(word.coefficient);
    for (Ladder f : word.factors) {
        const Polynomial op = f == Ladder::creation ? Polynomial::monomial(1, 0) : Polynomial::monomial(0, 1);
        acc = normal_ordered_product(acc, op);
    }
    return acc;
}

inline Polynomial normal_order(const std::vector<OperatorWord>& words) {
    Polynomial out;
    for (const auto& w : words) out += normal_order(w);
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

/// `re+im i` form with 6 significant digits, e.g. `0-2i`.
inline std::string format_complex(Complex c) {
    auto clean = [](double v) { return v == 0.0 ? 0.0 : v; };  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", clean(c.real()), clean(c.imag()));
    return buf;
}

/// Terms sorted by (p+q, p), each rendered `coeff * <bar>^p <amp>^q`.
inline std::string render(const Polynomial& poly, const std::string& bar_name = "a*",
                          const std::string& amp_name = "a") {
    if (poly.empty()) return "0";
    std::vector<std::pair<Exponents, Complex>> terms(poly.terms().begin(), poly.terms().end());
    std::stable_sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
        const int dx = x.first.p + x.first.q, dy = y.first.p + y.first.q;
        return dx != dy ? dx < dy : x.first.p < y.first.p;
    });
    std::string out;
    for (const auto& [e, c] : terms) {
        if (!out.empty()) out += " + ";
        out += format_complex(c) + " * " + bar_name + "^" + std::to_string(e.p) + " " + amp_name + "^" +
               std::to_string(e.q);
    }
    return out;
}

}  // namespace phasekit
