#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "deforge/exterior.hpp"

namespace deforge {

// ---------------------------------------------------------------------------
// Truncated formal power series in deformation parameters t_1..t_m and their
// conjugates.  A multi-exponent packs into 8-bit limbs of one 64-bit word, so
// at most 8 parameters; truncation orders stay <= 100, which keeps limb sums
// during convolution below a byte.

struct PDeg {
    std::uint64_t packed = 0;

    static constexpr int max_params = 8;
    static constexpr int max_order = 100;

    static PDeg unit(int k, int e = 1) {
        if (k < 0 || k >= max_params || e < 0 || e > max_order)
            throw InvariantViolation("series exponent out of range");
        return {std::uint64_t(e) << (8 * k)};
    }

    int exp(int k) const { return static_cast<int>((packed >> (8 * k)) & 0xff); }

    int total() const {
        int s = 0;
        for (int k = 0; k < max_params; ++k) s += exp(k);
        return s;
    }

    friend PDeg operator+(PDeg a, PDeg b) { return {a.packed + b.packed}; }
    auto operator<=>(const PDeg&) const = default;
};

// Degree of the monomial t^i conj(t)^j.
struct SeriesKey {
    PDeg i, j;

    int total() const { return i.total() + j.total(); }
    friend SeriesKey operator+(SeriesKey a, SeriesKey b) { return {a.i + b.i, a.j + b.j}; }
    auto operator<=>(const SeriesKey&) const = default;
};

inline SeriesKey conj_key(SeriesKey k) { return {k.j, k.i}; }

// Single-parameter key t^a conj(t)^b; the common case throughout the solvers.
inline SeriesKey mono_key(int a, int b) { return {PDeg::unit(0, a), PDeg::unit(0, b)}; }

// Limb-wise difference; nullopt unless b divides a as a monomial.
inline std::optional<PDeg> try_sub(PDeg a, PDeg b) {
    PDeg out;
    for (int k = 0; k < PDeg::max_params; ++k) {
        int d = a.exp(k) - b.exp(k);
        if (d < 0) return std::nullopt;
        out.packed |= std::uint64_t(d) << (8 * k);
    }
    return out;
}

inline std::optional<SeriesKey> try_sub(SeriesKey a, SeriesKey b) {
    auto i = try_sub(a.i, b.i), j = try_sub(a.j, b.j);
    if (!i || !j) return std::nullopt;
    return SeriesKey{*i, *j};
}

namespace detail {
inline void keys_of_order_rec(int m, int slot, int left, PDeg i, PDeg j,
                              std::vector<SeriesKey>& out) {
    if (slot == 2 * m) {
        if (left == 0) out.push_back({i, j});
        return;
    }
    for (int e = 0; e <= left; ++e) {
        PDeg ni = i, nj = j;
        if (slot < m)
            ni = ni + PDeg::unit(slot, e);
        else
            nj = nj + PDeg::unit(slot - m, e);
        keys_of_order_rec(m, slot + 1, left - e, ni, nj, out);
    }
}
}  // namespace detail

// Every (i, j) key of the given total order over m parameters, in a fixed
// deterministic order.
inline std::vector<SeriesKey> keys_of_order(int m, int order) {
    std::vector<SeriesKey> out;
    detail::keys_of_order_rec(m, 0, order, PDeg{}, PDeg{}, out);
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient payload interface.  A prototype zero value carries the ambient
// data (dimension, barred flag, matrix shape) that the payload type needs.

template <class V>
struct series_traits;

template <class K>
struct series_traits<Form<K>> {
    using scalar = K;
    static bool is_zero(const Form<K>& v) { return v.is_zero(); }
    static Form<K> zero_like(const Form<K>& v) { return Form<K>(v.n); }
    static Form<K> conj(const Form<K>& v) { return deforge::conj(v); }
    static Form<K> scale(const K& s, const Form<K>& v) { return s * v; }
};

template <class K>
struct series_traits<VectorForm<K>> {
    using scalar = K;
    static bool is_zero(const VectorForm<K>& v) { return v.is_zero(); }
    static VectorForm<K> zero_like(const VectorForm<K>& v) { return VectorForm<K>(v.n, v.barred); }
    static VectorForm<K> conj(const VectorForm<K>& v) { return deforge::conj(v); }
    static VectorForm<K> scale(const K& s, const VectorForm<K>& v) { return s * v; }
};

template <class K>
struct series_traits<FrameEndo<K>> {
    using scalar = K;
    static bool is_zero(const FrameEndo<K>& v) { return v.m.is_zero(); }
    static FrameEndo<K> zero_like(const FrameEndo<K>& v) { return FrameEndo<K>(v.n); }
    static FrameEndo<K> scale(const K& s, const FrameEndo<K>& v) { return s * v; }
};

template <class K>
struct series_traits<Mat<K>> {
    using scalar = K;
    static bool is_zero(const Mat<K>& v) { return v.is_zero(); }
    static Mat<K> zero_like(const Mat<K>& v) { return Mat<K>(v.rows, v.cols); }
    static Mat<K> conj(const Mat<K>& v) { return conj_entries(v); }
    static Mat<K> scale(const K& s, const Mat<K>& v) { return s * v; }
};

// Coefficient merge for coordinate-vector payloads; found through the scalar
// type's namespace.
template <class K>
Vec<K> operator+(Vec<K> a, const Vec<K>& b) {
    if (a.size() != b.size()) throw InvariantViolation("vector sizes differ");
    for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] + b[i];
    return a;
}

template <class K>
struct series_traits<Vec<K>> {
    using scalar = K;
    static bool is_zero(const Vec<K>& v) {
        for (const K& x : v)
            if (!deforge::is_zero(x)) return false;
        return true;
    }
    static Vec<K> zero_like(const Vec<K>& v) { return Vec<K>(v.size(), K(0)); }
    static Vec<K> conj(const Vec<K>& v) {
        Vec<K> out = v;
        for (K& x : out) x = conj_val(x);
        return out;
    }
    static Vec<K> scale(const K& s, const Vec<K>& v) {
        Vec<K> out = v;
        for (K& x : out) x = s * x;
        return out;
    }
};

// ---------------------------------------------------------------------------
// The series proper: a sparse coefficient map with hard truncation at total
// order N.  Degree-k results of every operation depend only on input degrees
// <= k, so recomputing with a larger N never changes low-order coefficients.

template <class V>
struct BiSeries {
    using traits = series_traits<V>;

    int N = 0;  // truncation order: coefficients with |i|+|j| > N are dropped
    int m = 1;  // number of parameters
    V zero;     // prototype zero coefficient
    std::map<SeriesKey, V> c;

    BiSeries() = default;
    BiSeries(int N_, int m_, V zero_) : N(N_), m(m_), zero(std::move(zero_)) {
        if (N < 0 || N > PDeg::max_order) throw InvariantViolation("series order out of range");
        if (m < 1 || m > PDeg::max_params)
            throw InvariantViolation("series parameter count out of range");
        if (!traits::is_zero(zero)) throw InvariantViolation("series prototype must be zero");
    }

    void check_key(SeriesKey k) const {
        for (int t = m; t < PDeg::max_params; ++t)
            if (k.i.exp(t) != 0 || k.j.exp(t) != 0)
                throw InvariantViolation("series key uses an absent parameter");
    }

    void add(SeriesKey k, const V& v) {
        if (k.total() > N || traits::is_zero(v)) return;
        check_key(k);
        auto [it, fresh] = c.emplace(k, v);
        if (!fresh) {
            it->second = it->second + v;
            if (traits::is_zero(it->second)) c.erase(it);
        }
    }

    const V& coeff(SeriesKey k) const {
        auto it = c.find(k);
        return it == c.end() ? zero : it->second;
    }

    bool is_zero() const { return c.empty(); }

    // Homogeneous part of one total order.
    BiSeries part(int order) const {
        BiSeries out(N, m, zero);
        for (const auto& [k, v] : c)
            if (k.total() == order) out.c.emplace(k, v);
        return out;
    }

    // Drops coefficients above `order` and lowers the truncation to match.
    BiSeries truncated(int order) const {
        BiSeries out(std::min(N, order), m, zero);
        for (const auto& [k, v] : c)
            if (k.total() <= out.N) out.c.emplace(k, v);
        return out;
    }

    // Reinterprets the same coefficients under a new truncation order.  Only
    // meaningful when the series is an exact polynomial (all higher orders
    // genuinely zero), e.g. a truncated Kuranishi family treated as given.
    BiSeries resized(int order) const {
        BiSeries out(order, m, zero);
        for (const auto& [k, v] : c)
            if (k.total() <= order) out.c.emplace(k, v);
        return out;
    }

    BiSeries& operator+=(const BiSeries& o) {
        if (m != o.m) throw InvariantViolation("series parameter counts differ");
        for (const auto& [k, v] : o.c) add(k, v);
        return *this;
    }

    friend BiSeries operator+(const BiSeries& a, const BiSeries& b) {
        if (a.m != b.m) throw InvariantViolation("series parameter counts differ");
        BiSeries out(std::min(a.N, b.N), a.m, a.zero);
        for (const auto& [k, v] : a.c) out.add(k, v);
        for (const auto& [k, v] : b.c) out.add(k, v);
        return out;
    }

    friend BiSeries operator-(const BiSeries& a, const BiSeries& b) {
        using K = typename traits::scalar;
        if (a.m != b.m) throw InvariantViolation("series parameter counts differ");
        BiSeries out(std::min(a.N, b.N), a.m, a.zero);
        for (const auto& [k, v] : a.c) out.add(k, v);
        for (const auto& [k, v] : b.c) out.add(k, traits::scale(K(-1), v));
        return out;
    }

    friend BiSeries operator*(const typename traits::scalar& s, const BiSeries& a) {
        BiSeries out(a.N, a.m, a.zero);
        for (const auto& [k, v] : a.c) out.add(k, traits::scale(s, v));
        return out;
    }

    friend BiSeries operator-(const BiSeries& a) {
        using K = typename traits::scalar;
        return K(-1) * a;
    }

    friend bool operator==(const BiSeries& a, const BiSeries& b) {
        return a.N == b.N && a.m == b.m && a.c == b.c;
    }
};

// ---------------------------------------------------------------------------
// Construction helpers.

template <class V>
BiSeries<V> series_term(int N, int m, SeriesKey at, const V& v) {
    BiSeries<V> out(N, m, series_traits<V>::zero_like(v));
    out.add(at, v);
    return out;
}

template <class V>
BiSeries<V> const_series(int N, int m, const V& v) {
    return series_term(N, m, SeriesKey{}, v);
}

// Multiplication by the parameter monomial of degree `shift`.
template <class V>
BiSeries<V> shifted(const BiSeries<V>& s, SeriesKey shift) {
    BiSeries<V> out(s.N, s.m, s.zero);
    for (const auto& [k, v] : s.c) out.add(k + shift, v);
    return out;
}

// Coefficientwise image under a linear map into a possibly new payload type.
template <class R, class V, class F>
BiSeries<R> apply_linear(const BiSeries<V>& s, R proto_zero, F&& f) {
    BiSeries<R> out(s.N, s.m, std::move(proto_zero));
    for (const auto& [k, v] : s.c) out.add(k, f(v));
    return out;
}

template <class V, class F>
BiSeries<V> map_coeffs(const BiSeries<V>& s, F&& f) {
    return apply_linear(s, s.zero, std::forward<F>(f));
}

// ---------------------------------------------------------------------------
// Bilinear convolution: out_(k) = sum_{ka+kb=k} f(a_(ka), b_(kb)).

template <class R, class A, class B, class F>
BiSeries<R> convolve(const BiSeries<A>& a, const BiSeries<B>& b, R proto_zero, F&& f) {
    if (a.m != b.m) throw InvariantViolation("series parameter counts differ");
    BiSeries<R> out(std::min(a.N, b.N), a.m, std::move(proto_zero));
    for (const auto& [ka, va] : a.c)
        for (const auto& [kb, vb] : b.c) {
            SeriesKey k = ka + kb;
            if (k.total() > out.N) continue;
            out.add(k, f(va, vb));
        }
    return out;
}

template <class K>
BiSeries<Form<K>> wedge(const BiSeries<Form<K>>& a, const BiSeries<Form<K>>& b) {
    return convolve(a, b, a.zero,
                    [](const Form<K>& x, const Form<K>& y) { return wedge(x, y); });
}

template <class K>
BiSeries<Form<K>> contract(const BiSeries<VectorForm<K>>& psi, const BiSeries<Form<K>>& a) {
    return convolve(psi, a, a.zero,
                    [](const VectorForm<K>& x, const Form<K>& y) { return contract(x, y); });
}

template <class K>
BiSeries<VectorForm<K>> contract(const BiSeries<VectorForm<K>>& psi,
                                 const BiSeries<VectorForm<K>>& chi) {
    return convolve(psi, chi, chi.zero,
                    [](const VectorForm<K>& x, const VectorForm<K>& y) { return contract(x, y); });
}

// ---------------------------------------------------------------------------
// Conjugation and reality.  conj swaps the key (i,j) -> (j,i), so a series is
// real exactly when coefficient(i,j) = conj(coefficient(j,i)).

template <class V>
BiSeries<V> conj(const BiSeries<V>& s) {
    BiSeries<V> out(s.N, s.m, series_traits<V>::conj(s.zero));
    for (const auto& [k, v] : s.c) out.c.emplace(conj_key(k), series_traits<V>::conj(v));
    return out;
}

template <class V>
bool is_real(const BiSeries<V>& s) {
    return conj(s) == s;
}

// ---------------------------------------------------------------------------
// Frame-endomorphism series: the substitution action, composition and
// inversion used by the extension solvers.

template <class K>
BiSeries<FrameEndo<K>> endo_series(const BiSeries<VectorForm<K>>& s) {
    return apply_linear(s, FrameEndo<K>(s.zero.n),
                        [](const VectorForm<K>& v) { return FrameEndo<K>::from_vectorform(v); });
}

template <class K>
BiSeries<FrameEndo<K>> identity_endo_series(int N, int m, int n) {
    return const_series(N, m, FrameEndo<K>::identity(n));
}

template <class K>
BiSeries<FrameEndo<K>> one_plus(BiSeries<FrameEndo<K>> s) {
    s.add(SeriesKey{}, FrameEndo<K>::identity(s.zero.n));
    return s;
}

template <class K>
BiSeries<FrameEndo<K>> compose(const BiSeries<FrameEndo<K>>& a, const BiSeries<FrameEndo<K>>& b) {
    return convolve(a, b, a.zero,
                    [](const FrameEndo<K>& x, const FrameEndo<K>& y) { return x * y; });
}

template <class K>
BiSeries<Mat<K>> compose(const BiSeries<Mat<K>>& a, const BiSeries<Mat<K>>& b) {
    Mat<K> proto(a.zero.rows, b.zero.cols);
    return convolve(a, b, std::move(proto),
                    [](const Mat<K>& x, const Mat<K>& y) { return x * y; });
}

template <class K>
BiSeries<Vec<K>> apply(const BiSeries<Mat<K>>& a, const BiSeries<Vec<K>>& x) {
    Vec<K> proto(a.zero.rows, K(0));
    return convolve(a, x, std::move(proto),
                    [](const Mat<K>& mm, const Vec<K>& v) { return mm * v; });
}

template <class K>
BiSeries<Mat<K>> transpose_series(const BiSeries<Mat<K>>& a) {
    return apply_linear(a, a.zero.transpose(), [](const Mat<K>& v) { return v.transpose(); });
}

namespace detail {

// Neumann inversion: with a = a0 (1 + x), x strictly positive order, the
// recursion s <- 1 - x s reaches (1 + x)^{-1} in N steps.
template <class V>
BiSeries<V> neumann_inverse_series(const BiSeries<V>& a, const V& a0_inv, const V& one) {
    BiSeries<V> pos = a;
    pos.c.erase(SeriesKey{});
    BiSeries<V> x = compose(const_series(a.N, a.m, a0_inv), pos);
    BiSeries<V> id = const_series(a.N, a.m, one);
    BiSeries<V> s = id;
    for (int k = 0; k < a.N; ++k) s = id - compose(x, s);
    return compose(s, const_series(a.N, a.m, a0_inv));
}

}  // namespace detail

template <class K>
BiSeries<FrameEndo<K>> inverse_series(const BiSeries<FrameEndo<K>>& a) {
    FrameEndo<K> a0 = a.coeff(SeriesKey{});
    return detail::neumann_inverse_series(a, a0.inverted(), FrameEndo<K>::identity(a.zero.n));
}

template <class K>
BiSeries<Mat<K>> inverse_series(const BiSeries<Mat<K>>& a) {
    auto inv = inverse(a.coeff(SeriesKey{}));
    if (!inv) throw InvariantViolation("series order-0 matrix is singular");
    return detail::neumann_inverse_series(a, *inv, Mat<K>::identity(a.zero.rows));
}

// Substitution action of an endomorphism series on a form series: every
// coframe leg of every monomial is replaced by its (series-valued) image and
// the images are wedge-convolved in mask order.
template <class K>
BiSeries<Form<K>> simul_contract(const BiSeries<FrameEndo<K>>& a, const BiSeries<Form<K>>& s) {
    if (a.m != s.m) throw InvariantViolation("series parameter counts differ");
    const int n = s.zero.n;
    const int N = std::min(a.N, s.N);
    BiSeries<Form<K>> out(N, s.m, s.zero);
    std::vector<std::optional<BiSeries<Form<K>>>> legs(2 * static_cast<size_t>(n));
    auto leg = [&](int g) -> const BiSeries<Form<K>>& {
        if (!legs[g]) {
            BiSeries<Form<K>> ls(N, s.m, Form<K>(n));
            for (const auto& [k, e] : a.c) ls.add(k, e.generator_image(g));
            legs[g] = std::move(ls);
        }
        return *legs[g];
    };
    for (const auto& [k0, f] : s.c) {
        for (const auto& [key, v] : f.c) {
            BiSeries<Form<K>> acc = series_term(N, s.m, k0, Form<K>::monomial(n, 0, 0, v));
            for (int b : mask_bits(key.P)) {
                acc = wedge(acc, leg(b));
                if (acc.is_zero()) break;
            }
            if (!acc.is_zero())
                for (int b : mask_bits(key.Q)) {
                    acc = wedge(acc, leg(n + b));
                    if (acc.is_zero()) break;
                }
            out += acc;
        }
    }
    return out;
}

// Reads an endomorphism series supported on one coframe block as a series of
// vector-valued 1-forms; the complementary block must vanish.
template <class K>
BiSeries<VectorForm<K>> vectorform_series(const BiSeries<FrameEndo<K>>& a, bool barred) {
    const int n = a.zero.n;
    BiSeries<VectorForm<K>> out(a.N, a.m, VectorForm<K>(n, barred));
    for (const auto& [k, e] : a.c) {
        VectorForm<K> v(n, barred);
        for (int g = 0; g < 2 * n; ++g) {
            Form<K> img = e.generator_image(g);
            const bool in_block = barred ? g >= n : g < n;
            if (in_block)
                v.add_component(g % n, img);
            else if (!img.is_zero())
                throw InvariantViolation("endomorphism series is not supported on one coframe block");
        }
        out.add(k, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation at a numeric parameter point (t, conj(t)); mainly for the float
// backend oracles.

template <class V>
V eval_at(const BiSeries<V>& s, const Vec<typename series_traits<V>::scalar>& t) {
    using K = typename series_traits<V>::scalar;
    if (static_cast<int>(t.size()) != s.m) throw InvariantViolation("parameter count mismatch");
    V out = s.zero;
    for (const auto& [k, v] : s.c) {
        K w(1);
        for (int p = 0; p < s.m; ++p) {
            for (int e = 0; e < k.i.exp(p); ++e) w = w * t[p];
            for (int e = 0; e < k.j.exp(p); ++e) w = w * conj_val(t[p]);
        }
        out = out + series_traits<V>::scale(w, v);
    }
    return out;
}

}  // namespace deforge
