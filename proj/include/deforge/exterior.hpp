#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deforge/linalg.hpp"
#include "deforge/scalar.hpp"

namespace deforge {

// A multi-index {i_1 < ... < i_k} over generators 1..n, stored as a bitmask
// with bit (i-1) set.  Monomials dz^I wedge dzbar^J are keyed by (P, Q) masks.
using Mask = std::uint32_t;

inline int mask_size(Mask m) { return std::popcount(m); }

inline std::vector<int> mask_bits(Mask m) {
    std::vector<int> out;
    for (int b = 0; m != 0; ++b, m >>= 1)
        if (m & 1u) out.push_back(b);
    return out;
}

// Sign of the shuffle merging two disjoint ascending index lists: the parity
// of #{(x, y) in A x B : y < x}.
inline int merge_sign(Mask a, Mask b) {
    int inversions = 0;
    for (Mask rest = a; rest != 0; rest &= rest - 1) {
        int x = std::countr_zero(rest);
        inversions += std::popcount(b & ((Mask(1) << x) - 1));
    }
    return (inversions & 1) ? -1 : 1;
}

struct FKey {
    Mask P = 0, Q = 0;
    auto operator<=>(const FKey&) const = default;
};

// Sparse invariant (p,q)-form (or an inhomogeneous sum of such).
template <class K>
struct Form {
    int n = 0;
    std::map<FKey, K> c;

    Form() = default;
    explicit Form(int n_) : n(n_) {}

    static Form monomial(int n_, Mask P, Mask Q, K coeff = K(1)) {
        Form f(n_);
        f.add_term(P, Q, std::move(coeff));
        return f;
    }

    void add_term(Mask P, Mask Q, const K& v) {
        if (deforge::is_zero(v)) return;
        FKey key{P, Q};
        auto it = c.find(key);
        if (it == c.end()) {
            c.emplace(key, v);
        } else {
            it->second += v;
            if (deforge::is_zero(it->second)) c.erase(it);
        }
    }

    bool is_zero() const { return c.empty(); }

    // Bidegree if homogeneous and nonzero; nullopt otherwise.
    std::optional<std::pair<int, int>> bidegree() const {
        std::optional<std::pair<int, int>> deg;
        for (const auto& [key, v] : c) {
            std::pair<int, int> d{mask_size(key.P), mask_size(key.Q)};
            if (!deg)
                deg = d;
            else if (*deg != d)
                return std::nullopt;
        }
        return deg;
    }

    Form project(int p, int q) const {
        Form out(n);
        for (const auto& [key, v] : c)
            if (mask_size(key.P) == p && mask_size(key.Q) == q) out.c.emplace(key, v);
        return out;
    }

    Form project_total(int d) const {
        Form out(n);
        for (const auto& [key, v] : c)
            if (mask_size(key.P) + mask_size(key.Q) == d) out.c.emplace(key, v);
        return out;
    }

    Form& operator+=(const Form& o) {
        if (o.n != n && !o.is_zero() && !is_zero()) throw InvariantViolation("form sum: ambient dimension mismatch");
        if (n == 0) n = o.n;
        for (const auto& [key, v] : o.c) add_term(key.P, key.Q, v);
        return *this;
    }
    Form& operator-=(const Form& o) {
        if (o.n != n && !o.is_zero() && !is_zero()) throw InvariantViolation("form difference: ambient dimension mismatch");
        if (n == 0) n = o.n;
        for (const auto& [key, v] : o.c) add_term(key.P, key.Q, -v);
        return *this;
    }
    Form& operator*=(const K& s) {
        if (deforge::is_zero(s)) {
            c.clear();
            return *this;
        }
        for (auto& [key, v] : c) v *= s;
        return *this;
    }

    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(const K& s, Form a) { return a *= s; }
    friend Form operator-(const Form& a) { return K(-1) * a; }
    friend bool operator==(const Form& a, const Form& b) { return (a - b).is_zero(); }
    friend bool operator!=(const Form& a, const Form& b) { return !(a == b); }
};

template <class K>
Form<K> wedge(const Form<K>& a, const Form<K>& b) {
    if (a.is_zero() || b.is_zero()) return Form<K>(a.n ? a.n : b.n);
    if (a.n != b.n) throw InvariantViolation("wedge: ambient dimension mismatch");
    Form<K> out(a.n);
    for (const auto& [ka, va] : a.c) {
        for (const auto& [kb, vb] : b.c) {
            if ((ka.P & kb.P) || (ka.Q & kb.Q)) continue;
            int sign = merge_sign(ka.P, kb.P) * merge_sign(ka.Q, kb.Q);
            // dzbar block of a moves past dz block of b.
            if ((mask_size(ka.Q) & 1) && (mask_size(kb.P) & 1)) sign = -sign;
            K term = va * vb;
            if (sign < 0) term = -term;
            out.add_term(ka.P | kb.P, ka.Q | kb.Q, term);
        }
    }
    return out;
}

// Conjugation: dz^I ^ dzbar^J  ->  (-1)^{|I||J|} conj(coeff) dz^J ^ dzbar^I.
template <class K>
Form<K> conj(const Form<K>& a) {
    Form<K> out(a.n);
    for (const auto& [key, v] : a.c) {
        K cv = conj_val(v);
        if ((mask_size(key.P) & mask_size(key.Q) & 1) != 0) cv = -cv;
        out.add_term(key.Q, key.P, cv);
    }
    return out;
}

template <class K>
bool is_real(const Form<K>& a) {
    return conj(a) == a;
}

// Interior product with the frame vector e_k (generator index k, 0-based) or
// its conjugate; the usual odd derivation.
template <class K>
Form<K> contract_gen(int k, bool barred, const Form<K>& a) {
    Form<K> out(a.n);
    Mask bit = Mask(1) << k;
    for (const auto& [key, v] : a.c) {
        Mask block = barred ? key.Q : key.P;
        if (!(block & bit)) continue;
        int skipped = barred ? mask_size(key.P) + std::popcount(key.Q & (bit - 1))
                             : std::popcount(key.P & (bit - 1));
        K term = (skipped & 1) ? -v : v;
        out.add_term(barred ? key.P : (key.P & ~bit), barred ? (key.Q & ~bit) : key.Q, term);
    }
    return out;
}

// T-valued (r,s)-form: sum_k psi^k (x) e_k, with e_k ranging over the (1,0)
// frame (barred = false) or the (0,1) frame (barred = true).
template <class K>
struct VectorForm {
    int n = 0;
    bool barred = false;
    std::map<int, Form<K>> comp;

    VectorForm() = default;
    VectorForm(int n_, bool barred_) : n(n_), barred(barred_) {}

    static VectorForm zero(int n_, bool barred_ = false) { return VectorForm(n_, barred_); }

    Form<K> component(int k) const {
        auto it = comp.find(k);
        return it == comp.end() ? Form<K>(n) : it->second;
    }

    void add_component(int k, const Form<K>& f) {
        if (f.is_zero()) return;
        auto [it, fresh] = comp.emplace(k, f);
        if (!fresh) {
            it->second += f;
            if (it->second.is_zero()) comp.erase(it);
        }
    }

    bool is_zero() const { return comp.empty(); }

    std::optional<std::pair<int, int>> bidegree() const {
        std::optional<std::pair<int, int>> deg;
        for (const auto& [k, f] : comp) {
            auto d = f.bidegree();
            if (!d) return std::nullopt;
            if (!deg)
                deg = d;
            else if (*deg != *d)
                return std::nullopt;
        }
        return deg;
    }

    VectorForm& operator+=(const VectorForm& o) {
        if (!o.is_zero() && !is_zero() && (o.n != n || o.barred != barred))
            throw InvariantViolation("vector-form sum: frame mismatch");
        if (is_zero()) {
            n = o.n ? o.n : n;
            barred = o.is_zero() ? barred : o.barred;
        }
        for (const auto& [k, f] : o.comp) add_component(k, f);
        return *this;
    }
    VectorForm& operator-=(const VectorForm& o) { return *this += K(-1) * o; }
    VectorForm& operator*=(const K& s) {
        if (deforge::is_zero(s)) {
            comp.clear();
            return *this;
        }
        for (auto& [k, f] : comp) f *= s;
        return *this;
    }

    friend VectorForm operator+(VectorForm a, const VectorForm& b) { return a += b; }
    friend VectorForm operator-(VectorForm a, const VectorForm& b) { return a -= b; }
    friend VectorForm operator*(const K& s, VectorForm a) { return a *= s; }
    friend VectorForm operator-(const VectorForm& a) { return K(-1) * a; }
    friend bool operator==(const VectorForm& a, const VectorForm& b) { return (a - b).is_zero(); }
    friend bool operator!=(const VectorForm& a, const VectorForm& b) { return !(a == b); }
};

// conj(sum psi^k (x) e_k) = sum conj(psi^k) (x) ebar_k.
template <class K>
VectorForm<K> conj(const VectorForm<K>& psi) {
    VectorForm<K> out(psi.n, !psi.barred);
    for (const auto& [k, f] : psi.comp) out.add_component(k, conj(f));
    return out;
}

// iota_psi(a) = sum_k psi^k ^ (e_k _| a).  For psi of total form-degree 1
// (Beltrami or its conjugate) this is an even derivation of the wedge.
template <class K>
Form<K> contract(const VectorForm<K>& psi, const Form<K>& a) {
    Form<K> out(a.n ? a.n : psi.n);
    for (const auto& [k, f] : psi.comp) out += wedge(f, contract_gen(k, psi.barred, a));
    return out;
}

// Componentwise contraction on the form part of x; paper shorthand "x psi".
template <class K>
VectorForm<K> contract(const VectorForm<K>& psi, const VectorForm<K>& x) {
    VectorForm<K> out(x.n, x.barred);
    for (const auto& [k, f] : x.comp) out.add_component(k, contract(psi, f));
    return out;
}

// e^{iota_psi}(a) = sum_m iota_psi^m(a) / m!; finite because each application
// consumes a leg of the appropriate type.
template <class K>
Form<K> exp_contract(const VectorForm<K>& psi, const Form<K>& a) {
    Form<K> total = a;
    Form<K> power = a;
    K factorial = K(1);
    for (long m = 1; !power.is_zero(); ++m) {
        power = contract(psi, power);
        factorial *= K(m);
        if (power.is_zero()) break;
        K inv_fact = inv_val(factorial);
        total += inv_fact * power;
        if (m > 64) throw InvariantViolation("exp_contract failed to terminate");
    }
    return total;
}

// Extension map: e^{iota_phi} on the dz block and e^{iota_conj(phi)} on the
// dzbar block, monomial by monomial.
template <class K>
Form<K> extend(const VectorForm<K>& phi, const Form<K>& a) {
    if (phi.is_zero()) return a;
    VectorForm<K> phibar = conj(phi);
    Form<K> out(a.n);
    for (const auto& [key, v] : a.c) {
        Form<K> zpart = exp_contract(phi, Form<K>::monomial(a.n, key.P, 0));
        Form<K> bpart = exp_contract(phibar, Form<K>::monomial(a.n, 0, key.Q));
        out += v * wedge(zpart, bpart);
    }
    return out;
}

// Frame endomorphism: a linear map of the 2n-dimensional coframe span
// <dz^1..dz^n, dzbar^1..dzbar^n> into 1-forms, stored as its 2n x 2n matrix
// (column g = image of generator g in coframe coordinates).
template <class K>
struct FrameEndo {
    int n = 0;
    Mat<K> m;  // 2n x 2n

    FrameEndo() = default;
    explicit FrameEndo(int n_) : n(n_), m(2 * n_, 2 * n_) {}

    static FrameEndo identity(int n_) {
        FrameEndo e(n_);
        e.m = Mat<K>::identity(2 * n_);
        return e;
    }

    // Frame action of a vector-valued 1-form: unbarred psi sends dz^k to
    // psi^k, barred psi sends dzbar^k to psi^k; the other block maps to 0.
    static FrameEndo from_vectorform(const VectorForm<K>& psi) {
        FrameEndo e(psi.n);
        for (const auto& [k, f] : psi.comp) {
            auto deg = f.bidegree();
            if (!deg || deg->first + deg->second != 1)
                throw InvariantViolation("frame action requires 1-form components");
            int col = (psi.barred ? e.n : 0) + k;
            for (const auto& [key, v] : f.c) {
                int row = key.P ? std::countr_zero(key.P) : e.n + std::countr_zero(key.Q);
                e.m.at(row, col) += v;
            }
        }
        return e;
    }

    Form<K> generator_image(int g) const {
        Form<K> out(n);
        for (int r = 0; r < n; ++r) out.add_term(Mask(1) << r, 0, m.at(r, g));
        for (int r = 0; r < n; ++r) out.add_term(0, Mask(1) << r, m.at(n + r, g));
        return out;
    }

    Form<K> apply_oneform(const Form<K>& f) const {
        Form<K> out(n);
        for (const auto& [key, v] : f.c) {
            if (mask_size(key.P) + mask_size(key.Q) != 1)
                throw InvariantViolation("frame endomorphism applies to 1-forms");
            int g = key.P ? std::countr_zero(key.P) : n + std::countr_zero(key.Q);
            out += v * generator_image(g);
        }
        return out;
    }

    friend FrameEndo operator+(FrameEndo a, const FrameEndo& b) {
        a.m = a.m + b.m;
        return a;
    }
    friend FrameEndo operator-(FrameEndo a, const FrameEndo& b) {
        a.m = a.m - b.m;
        return a;
    }
    // Composition: (a * b)(x) = a(b(x)).
    friend FrameEndo operator*(FrameEndo a, const FrameEndo& b) {
        a.m = a.m * b.m;
        return a;
    }
    friend FrameEndo operator*(const K& s, FrameEndo a) {
        a.m = s * a.m;
        return a;
    }
    friend FrameEndo operator-(const FrameEndo& a) { return K(-1) * a; }
    friend bool operator==(const FrameEndo& a, const FrameEndo& b) {
        return a.n == b.n && (a.m - b.m).is_zero();
    }

    FrameEndo inverted() const {
        auto inv = inverse(m);
        if (!inv) throw FrameDegenerate("frame endomorphism is singular");
        FrameEndo e(n);
        e.m = *inv;
        return e;
    }
};

// Simultaneous contraction (frame substitution): applies the endomorphism to
// every coframe factor of every monomial.  Not additive in the endomorphism.
template <class K>
Form<K> simul_contract(const FrameEndo<K>& endo, const Form<K>& a) {
    if (endo.n != a.n && !a.is_zero()) throw InvariantViolation("simul_contract: ambient dimension mismatch");
    std::vector<Form<K>> images(2 * size_t(endo.n));
    std::vector<bool> have(2 * size_t(endo.n), false);
    auto image = [&](int g) -> const Form<K>& {
        if (!have[g]) {
            images[g] = endo.generator_image(g);
            have[g] = true;
        }
        return images[g];
    };
    Form<K> out(a.n);
    for (const auto& [key, v] : a.c) {
        Form<K> acc = Form<K>::monomial(a.n, 0, 0, v);
        for (int b : mask_bits(key.P)) {
            acc = wedge(acc, image(b));
            if (acc.is_zero()) break;
        }
        if (!acc.is_zero())
            for (int b : mask_bits(key.Q)) {
                acc = wedge(acc, image(endo.n + b));
                if (acc.is_zero()) break;
            }
        out += acc;
    }
    return out;
}

// All p+q = d multi-index keys in deterministic (numeric mask) order.
inline std::vector<FKey> total_degree_keys(int n, int d) {
    std::vector<FKey> keys;
    for (Mask P = 0; P < (Mask(1) << n); ++P) {
        int p = mask_size(P);
        if (p > d) continue;
        for (Mask Q = 0; Q < (Mask(1) << n); ++Q)
            if (mask_size(Q) == d - p) keys.push_back({P, Q});
    }
    return keys;
}

inline std::vector<FKey> bidegree_keys(int n, int p, int q) {
    std::vector<FKey> keys;
    for (Mask P = 0; P < (Mask(1) << n); ++P) {
        if (mask_size(P) != p) continue;
        for (Mask Q = 0; Q < (Mask(1) << n); ++Q)
            if (mask_size(Q) == q) keys.push_back({P, Q});
    }
    return keys;
}

// Inverse of the extension map.  The extension preserves total degree, so it
// restricts to a square matrix on each total-degree block; FrameDegenerate
// when that matrix (equivalently 1 - conj(phi) phi) is singular.
template <class K>
Form<K> extend_inverse(const VectorForm<K>& phi, const Form<K>& a) {
    if (phi.is_zero() || a.is_zero()) return a;
    Form<K> out(a.n);
    for (int d = 0; d <= 2 * a.n; ++d) {
        Form<K> block = a.project_total(d);
        if (block.is_zero()) continue;
        std::vector<FKey> keys = total_degree_keys(a.n, d);
        std::map<FKey, int> index;
        for (size_t j = 0; j < keys.size(); ++j) index.emplace(keys[j], static_cast<int>(j));
        Mat<K> fwd(static_cast<int>(keys.size()), static_cast<int>(keys.size()));
        for (size_t j = 0; j < keys.size(); ++j) {
            Form<K> img = extend(phi, Form<K>::monomial(a.n, keys[j].P, keys[j].Q));
            for (const auto& [key, v] : img.c) fwd.at(index.at(key), static_cast<int>(j)) = v;
        }
        Vec<K> rhs(keys.size(), K(0));
        for (const auto& [key, v] : block.c) rhs[index.at(key)] = v;
        auto sol = solve(fwd, rhs);
        if (!sol) throw FrameDegenerate("extension map is singular on this input");
        // Singular forward matrices with consistent right-hand sides still
        // mean the frame change is degenerate; detect via rank.
        if (rank(fwd) != fwd.cols) throw FrameDegenerate("extension map is singular");
        for (size_t j = 0; j < keys.size(); ++j) out.add_term(keys[j].P, keys[j].Q, (*sol)[j]);
    }
    return out;
}

}  // namespace deforge
