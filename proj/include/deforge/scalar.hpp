#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "deforge/errors.hpp"

namespace deforge {

// Exact Gaussian rational a + b*i with arbitrary-precision rational a, b.
struct GQ {
    mpq_class re, im;

    GQ() : re(0), im(0) {}
    GQ(long v) : re(v), im(0) {}  // NOLINT: implicit by design, mirrors numeric literals
    GQ(mpq_class r) : re(std::move(r)), im(0) {}
    GQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static GQ zero() { return GQ(); }
    static GQ one() { return GQ(1); }
    static GQ i() { return GQ(mpq_class(0), mpq_class(1)); }
    static GQ from_int(long v) { return GQ(v); }
    static GQ rat(long num, long den) {
        mpq_class q(num, den);
        q.canonicalize();
        return GQ(std::move(q));
    }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    GQ conj() const { return GQ(re, -im); }
    // |z|^2, exact and non-negative.
    mpq_class norm() const { return re * re + im * im; }

    GQ inverse() const {
        mpq_class n = norm();
        if (n == 0) throw InvariantViolation("division by zero Gaussian rational");
        return GQ(re / n, -im / n);
    }

    std::complex<double> approx() const { return {re.get_d(), im.get_d()}; }

    GQ& operator+=(const GQ& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GQ& operator-=(const GQ& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GQ& operator*=(const GQ& o) {
        mpq_class r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    GQ& operator/=(const GQ& o) { return *this *= o.inverse(); }

    friend GQ operator+(GQ a, const GQ& b) { return a += b; }
    friend GQ operator-(GQ a, const GQ& b) { return a -= b; }
    friend GQ operator*(GQ a, const GQ& b) { return a *= b; }
    friend GQ operator/(GQ a, const GQ& b) { return a /= b; }
    friend GQ operator-(const GQ& a) { return GQ(-a.re, -a.im); }
    friend bool operator==(const GQ& a, const GQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GQ& a, const GQ& b) { return !(a == b); }

    // Canonical text form: "a/b", "c/d*i", or "a/b+c/d*i" (the '+' becomes '-'
    // when the imaginary part is negative); "/1" denominators are dropped.
    std::string str() const {
        if (im == 0) return re.get_str();
        std::string imag = (im < 0 ? mpq_class(-im) : im).get_str() + "*i";
        if (re == 0) return (im < 0 ? "-" : "") + imag;
        return re.get_str() + (im < 0 ? "-" : "+") + imag;
    }
};

// Complex double backend; equality is tolerance-based.
struct CD {
    std::complex<double> v{};

    CD() = default;
    CD(int x) : v(double(x), 0.0) {}   // NOLINT: implicit by design
    CD(long x) : v(double(x), 0.0) {}  // NOLINT
    CD(double x) : v(x, 0.0) {}        // NOLINT
    CD(std::complex<double> z) : v(z) {}
    CD(double r, double i) : v(r, i) {}

    // Shared tolerance for zero/equality tests; configurable.
    static double& eps() {
        static double e = 1e-9;
        return e;
    }

    static CD zero() { return CD(); }
    static CD one() { return CD(1.0); }
    static CD i() { return CD(0.0, 1.0); }
    static CD from_int(long x) { return CD(x); }

    bool is_zero() const { return std::abs(v) <= eps(); }
    bool is_real() const { return std::abs(v.imag()) <= eps(); }
    CD conj() const { return CD(std::conj(v)); }
    double norm() const { return std::norm(v); }
    CD inverse() const {
        if (std::abs(v) == 0.0) throw InvariantViolation("division by zero complex double");
        return CD(1.0 / v);
    }
    std::complex<double> approx() const { return v; }

    CD& operator+=(const CD& o) {
        v += o.v;
        return *this;
    }
    CD& operator-=(const CD& o) {
        v -= o.v;
        return *this;
    }
    CD& operator*=(const CD& o) {
        v *= o.v;
        return *this;
    }
    CD& operator/=(const CD& o) {
        v /= o.v;
        return *this;
    }

    friend CD operator+(CD a, const CD& b) { return a += b; }
    friend CD operator-(CD a, const CD& b) { return a -= b; }
    friend CD operator*(CD a, const CD& b) { return a *= b; }
    friend CD operator/(CD a, const CD& b) { return a /= b; }
    friend CD operator-(const CD& a) { return CD(-a.v); }
    friend bool operator==(const CD& a, const CD& b) { return std::abs(a.v - b.v) <= eps(); }
    friend bool operator!=(const CD& a, const CD& b) { return !(a == b); }

    std::string str() const {
        char buf[80];
        if (std::abs(v.imag()) == 0.0) {
            std::snprintf(buf, sizeof(buf), "%.17g", v.real());
            return buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g%+.17g*i", v.real(), v.imag());
        return buf;
    }
};

// Free-function scalar interface so that linear algebra can also run over the
// plain rational field mpq_class (used by realified computations).
inline bool is_zero(const GQ& a) { return a.is_zero(); }
inline bool is_zero(const CD& a) { return a.is_zero(); }
inline bool is_zero(const mpq_class& a) { return a == 0; }

inline GQ conj_val(const GQ& a) { return a.conj(); }
inline CD conj_val(const CD& a) { return a.conj(); }
inline mpq_class conj_val(const mpq_class& a) { return a; }

inline GQ inv_val(const GQ& a) { return a.inverse(); }
inline CD inv_val(const CD& a) { return a.inverse(); }
inline mpq_class inv_val(const mpq_class& a) {
    if (a == 0) throw InvariantViolation("division by zero rational");
    return 1 / a;
}

template <class K>
K scalar_from_int(long v) {
    return K::from_int(v);
}
template <>
inline mpq_class scalar_from_int<mpq_class>(long v) {
    return mpq_class(v);
}

// Parses the canonical GQ text form emitted by GQ::str(), plus the obvious
// variants "i", "-i", "3i", "2/3*i", and leading '+'.
inline GQ parse_gq(const std::string& text) {
    auto fail = [&]() -> GQ { throw ParseError("bad scalar literal '" + text + "'"); };
    auto parse_rat = [&](std::string s) -> mpq_class {
        if (s.empty()) return fail().re;
        for (size_t k = 0; k < s.size(); ++k) {
            char ch = s[k];
            bool ok = (ch >= '0' && ch <= '9') || ch == '/' || (k == 0 && (ch == '+' || ch == '-'));
            if (!ok) fail();
        }
        if (s.back() == '/' || s.find("//") != std::string::npos) fail();
        if (s == "+" || s == "-") fail();
        if (s[0] == '+') s.erase(0, 1);
        mpq_class q;
        if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0) fail();
        if (q.get_den() == 0) fail();
        q.canonicalize();
        return q;
    };

    std::string t;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') t += ch;
    if (t.empty()) fail();

    GQ out;
    size_t start = 0;
    for (size_t k = 1; k <= t.size(); ++k) {
        bool split = k == t.size() || ((t[k] == '+' || t[k] == '-') && t[k - 1] != '/');
        if (!split) continue;
        std::string piece = t.substr(start, k - start);
        start = k;
        bool imag = !piece.empty() && piece.back() == 'i';
        if (imag) {
            piece.pop_back();
            if (!piece.empty() && piece.back() == '*') piece.pop_back();
            if (piece.empty() || piece == "+" || piece == "-") piece += "1";
        }
        mpq_class q = parse_rat(piece);
        if (imag)
            out.im += q;
        else
            out.re += q;
    }
    return out;
}

}  // namespace deforge
