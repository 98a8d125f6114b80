#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deforge/calculus.hpp"
#include "deforge/hodge.hpp"
#include "deforge/lemmata.hpp"
#include "deforge/series.hpp"

namespace deforge {

// Throughout this module a family phi is treated as an exact polynomial in t:
// coefficients absent from the series are zero, so a truncated Kuranishi
// family can be fed to solvers of any order.

// ---------------------------------------------------------------------------
// Series lifts of the fixed-complex calculus.

template <class K>
BiSeries<Form<K>> d_series(const LieAlgebra<K>& alg, const BiSeries<Form<K>>& s) {
    return map_coeffs(s, [&](const Form<K>& f) { return ce_d(alg, f); });
}

template <class K>
BiSeries<Form<K>> del_series(const LieAlgebra<K>& alg, const BiSeries<Form<K>>& s) {
    return map_coeffs(s, [&](const Form<K>& f) { return del(alg, f); });
}

template <class K>
BiSeries<Form<K>> delbar_series(const LieAlgebra<K>& alg, const BiSeries<Form<K>>& s) {
    return map_coeffs(s, [&](const Form<K>& f) { return delbar(alg, f); });
}

template <class K>
BiSeries<VectorForm<K>> delbar_vf_series(const LieAlgebra<K>& alg,
                                         const BiSeries<VectorForm<K>>& s) {
    return map_coeffs(s, [&](const VectorForm<K>& v) { return delbar_vf(alg, v); });
}

template <class K>
BiSeries<VectorForm<K>> bracket_series(const LieAlgebra<K>& alg, const BiSeries<VectorForm<K>>& a,
                                       const BiSeries<VectorForm<K>>& b) {
    return convolve(a, b, a.zero, [&](const VectorForm<K>& x, const VectorForm<K>& y) {
        return bracket(alg, x, y);
    });
}

template <class K>
BiSeries<VectorForm<K>> integrability_defect_series(const LieAlgebra<K>& alg,
                                                    const BiSeries<VectorForm<K>>& phi) {
    K half = inv_val(K(2));
    return delbar_vf_series(alg, phi) - half * bracket_series(alg, phi, phi);
}

// The extension acts as the frame substitution by 1 + phi + conj(phi).
template <class K>
BiSeries<FrameEndo<K>> extension_endo(const BiSeries<VectorForm<K>>& phi) {
    return one_plus(endo_series(phi) + endo_series(conj(phi)));
}

template <class K>
BiSeries<Form<K>> extend(const BiSeries<VectorForm<K>>& phi, const BiSeries<Form<K>>& s) {
    return simul_contract(extension_endo(phi), s);
}

template <class K>
Form<K> wedge_power(const Form<K>& f, int k) {
    Form<K> out = Form<K>::monomial(f.n, 0, 0);
    for (int i = 0; i < k; ++i) out = wedge(out, f);
    return out;
}

// ---------------------------------------------------------------------------
// Fundamental (1,1)-forms versus Hermitian coefficient matrices:
// omega = i sum h_jk dz^j ^ dzbar^k.

template <class K>
Form<K> fundamental_form(const HermitianMetric<K>& g) {
    Form<K> out(g.n);
    K iu = detail::imag_unit<K>();
    for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k)
            out.add_term(Mask(1) << j, Mask(1) << k, iu * g.h.at(j, k));
    return out;
}

template <class K>
Mat<K> metric_matrix_of_form(const Form<K>& omega, int n) {
    Mat<K> h(n, n);
    K neg_i = K(-1) * detail::imag_unit<K>();
    for (const auto& [key, v] : omega.c) {
        if (mask_size(key.P) != 1 || mask_size(key.Q) != 1)
            throw DegreeMismatch("expected a (1,1)-form");
        h.at(std::countr_zero(key.P), std::countr_zero(key.Q)) = neg_i * v;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Obstruction record for the extension solvers: the order and equation where
// canonical solvability first failed, with the harmonic part of the failing
// right-hand side as witness (the raw residual if that part vanishes).

template <class K>
struct Obstruction {
    int order = 0;
    std::string equation;
    Form<K> witness;
};

template <class K>
Form<K> harmonic_or_residual(const LieAlgebra<K>& alg, const HermitianMetric<K>& g,
                             const Form<K>& f) {
    auto deg = f.bidegree();
    if (!deg || f.is_zero()) return f;
    auto [p, q] = *deg;
    BidegreeBasis b = make_basis(alg.n, p, q);
    GreenPair<K> gp = green(laplacian(LapKind::Dbar, alg, g, p, q), g);
    Form<K> h = to_form(b, gp.H * to_vec(b, f));
    return h.is_zero() ? f : h;
}

// ---------------------------------------------------------------------------
// Kuranishi recursion.

template <class K>
std::vector<VectorForm<K>> harmonic_beltrami_basis(const LieAlgebra<K>& alg,
                                                   const HermitianMetric<K>& g) {
    Mat<K> kb = kernel_basis(laplacian_t(alg, g, 1));
    TvfBasis b = make_tvf_basis(alg.n, 1);
    std::vector<VectorForm<K>> out;
    out.reserve(kb.cols);
    for (int j = 0; j < kb.cols; ++j) out.push_back(vec_to_tvf(b, kb.column(j)));
    return out;
}

template <class K>
struct KuranishiResult {
    BiSeries<VectorForm<K>> phi;
    std::vector<VectorForm<K>> basis;           // harmonic basis behind order 1
    std::map<int, VectorForm<K>> obstructions;  // k -> harmonic part of [phi,phi]_k

    bool unobstructed() const {
        for (const auto& [k, v] : obstructions)
            if (!v.is_zero()) return false;
        return true;
    }
};

// phi_1 = sum_nu direction_nu t eta_nu over the harmonic basis {eta_nu}, then
// phi_k = 1/2 dbar_T* G [phi, phi]_k.  Obstruction k is the harmonic part of
// [phi,phi]_k; where all of them vanish the family is integrable and solves
// the fixed-point equation phi = phi_1 + 1/2 dbar_T* G [phi,phi].
template <class K>
KuranishiResult<K> kuranishi(const LieAlgebra<K>& alg, const HermitianMetric<K>& g, int N,
                             const std::vector<K>& direction) {
    KuranishiResult<K> out;
    out.basis = harmonic_beltrami_basis(alg, g);
    if (direction.size() != out.basis.size())
        throw InvariantViolation("direction has " + std::to_string(direction.size()) +
                                 " coefficients for a harmonic basis of dimension " +
                                 std::to_string(out.basis.size()));
    out.phi = BiSeries<VectorForm<K>>(N, 1, VectorForm<K>(alg.n, false));
    VectorForm<K> phi1(alg.n, false);
    for (size_t v = 0; v < direction.size(); ++v) phi1 += direction[v] * out.basis[v];
    out.phi.add(mono_key(1, 0), phi1);
    if (N < 2) return out;

    TvfBasis b1 = make_tvf_basis(alg.n, 1), b2 = make_tvf_basis(alg.n, 2);
    Mat<K> g1 = gram_tvf(g, 1), g2 = gram_tvf(g, 2);
    Mat<K> up_adj = adjoint_matrix(delbar_t_matrix(alg, 1), g1, g2);
    GreenPair<K> gp = green_pair(laplacian_t(alg, g, 2), g2);
    K half = inv_val(K(2));
    for (int k = 2; k <= N; ++k) {
        VectorForm<K> bb = bracket_series(alg, out.phi, out.phi).coeff(mono_key(k, 0));
        Vec<K> bv = tvf_to_vec(b2, bb);
        VectorForm<K> obs = vec_to_tvf(b2, gp.H * bv);
        if (!obs.is_zero()) out.obstructions[k] = obs;
        out.phi.add(mono_key(k, 0), half * vec_to_tvf(b1, up_adj * (gp.G * bv)));
    }
    return out;
}

// phi - phi_1 - 1/2 dbar_T* G [phi,phi]; identically zero for recursion output.
template <class K>
BiSeries<VectorForm<K>> kuranishi_fixed_point_residual(const LieAlgebra<K>& alg,
                                                       const HermitianMetric<K>& g,
                                                       const BiSeries<VectorForm<K>>& phi) {
    TvfBasis b1 = make_tvf_basis(alg.n, 1), b2 = make_tvf_basis(alg.n, 2);
    Mat<K> g1 = gram_tvf(g, 1), g2 = gram_tvf(g, 2);
    Mat<K> up_adj = adjoint_matrix(delbar_t_matrix(alg, 1), g1, g2);
    GreenPair<K> gp = green_pair(laplacian_t(alg, g, 2), g2);
    K half = inv_val(K(2));
    BiSeries<VectorForm<K>> res = phi;
    res.add(mono_key(1, 0), -phi.coeff(mono_key(1, 0)));
    for (const auto& [key, v] : bracket_series(alg, phi, phi).c) {
        Vec<K> bv = tvf_to_vec(b2, v);
        res.add(key, K(-1) * half * vec_to_tvf(b1, up_adj * (gp.G * bv)));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Kaehler extension: the reduced system
//   dbar w = dbar(pbp _| w - phi _| phibar _| w) - del(phi _| w)
//   del  w = del(ppb _| w - phibar _| phi _| w) - dbar(phibar _| w)
// solved order-by-order by the canonical coefficient
//   w_r = (pbp _| w - phi _| phibar _| w)_r + del dbar* G (phi _| w)_r
//         + dbar del* G (phibar _| w)_r.

template <class K>
struct KahlerExtension {
    BiSeries<Form<K>> omega;
    std::optional<Obstruction<K>> hit;  // first unsolvable order, if any
};

template <class K>
KahlerExtension<K> extend_kahler(const LieAlgebra<K>& alg, const HermitianMetric<K>& g,
                                 const Form<K>& omega0, const BiSeries<VectorForm<K>>& phi,
                                 int N) {
    const int n = alg.n;
    if (!omega0.is_zero()) {
        auto deg = omega0.bidegree();
        if (!deg || *deg != std::pair{1, 1}) throw DegreeMismatch("extend_kahler expects a (1,1)-form");
    }
    if (!is_real(omega0)) throw InvariantViolation("extend_kahler expects a real form");
    if (!ce_d(alg, omega0).is_zero())
        throw InvariantViolation("extend_kahler expects a d-closed form");
    BiSeries<VectorForm<K>> ph = phi.resized(N);
    if (!integrability_defect_series(alg, ph).is_zero())
        throw IntegrabilityViolation("extend_kahler requires an integrable family");

    auto phb = conj(ph);
    auto pbp = contract(ph, phb);  // acts on dzbar legs
    auto ppb = contract(phb, ph);  // acts on dz legs
    BidegreeBasis b02 = make_basis(n, 0, 2), b01 = make_basis(n, 0, 1);
    BidegreeBasis b20 = make_basis(n, 2, 0), b10 = make_basis(n, 1, 0);
    GreenPair<K> g02 = green(laplacian(LapKind::Dbar, alg, g, 0, 2), g);
    GreenPair<K> g20 = green(laplacian(LapKind::Del, alg, g, 2, 0), g);
    Mat<K> dbar_adj = adjoint(delbar_matrix(alg, 0, 1), g).m;  // (0,2) -> (0,1)
    Mat<K> del_adj = adjoint(del_matrix(alg, 1, 0), g).m;      // (2,0) -> (1,0)

    KahlerExtension<K> out{const_series(N, ph.m, omega0), std::nullopt};
    BiSeries<Form<K>>& w = out.omega;
    auto bil1 = [&](const BiSeries<Form<K>>& s) { return contract(pbp, s) - contract(ph, contract(phb, s)); };
    auto bil2 = [&](const BiSeries<Form<K>>& s) { return contract(ppb, s) - contract(phb, contract(ph, s)); };

    for (int r = 1; r <= N && !out.hit; ++r) {
        BiSeries<Form<K>> prev = w;
        BiSeries<Form<K>> a = contract(ph, w).part(r);
        BiSeries<Form<K>> b = contract(phb, w).part(r);
        // Solvability preconditions: both contractions d-exactness ready
        // (dbar-closed / del-closed with no harmonic part).
        for (const auto& [key, f] : a.c) {
            (void)key;
            if (!delbar(alg, f).is_zero()) {
                out.hit = Obstruction<K>{r, "dbar(phi _| omega) != 0",
                                         harmonic_or_residual(alg, g, delbar(alg, f))};
                break;
            }
            Form<K> h = to_form(b02, g02.H * to_vec(b02, f));
            if (!h.is_zero()) {
                out.hit = Obstruction<K>{r, "harmonic obstruction in the dbar equation", h};
                break;
            }
        }
        for (const auto& [key, f] : b.c) {
            (void)key;
            if (out.hit) break;
            if (!del(alg, f).is_zero()) {
                out.hit = Obstruction<K>{r, "del(phibar _| omega) != 0",
                                         harmonic_or_residual(alg, g, del(alg, f))};
                break;
            }
            Form<K> h = to_form(b20, g20.H * to_vec(b20, f));
            if (!h.is_zero()) {
                out.hit = Obstruction<K>{r, "harmonic obstruction in the del equation", h};
                break;
            }
        }
        if (out.hit) break;

        w += bil1(w).part(r);
        for (const auto& [key, f] : a.c)
            w.add(key, del(alg, to_form(b01, dbar_adj * (g02.G * to_vec(b02, f)))));
        for (const auto& [key, f] : b.c)
            w.add(key, delbar(alg, to_form(b10, del_adj * (g20.G * to_vec(b20, f)))));

        BiSeries<Form<K>> r1 =
            (delbar_series(alg, w) - delbar_series(alg, bil1(w)) + del_series(alg, contract(ph, w)))
                .part(r);
        BiSeries<Form<K>> r2 =
            (del_series(alg, w) - del_series(alg, bil2(w)) + delbar_series(alg, contract(phb, w)))
                .part(r);
        if (!r1.is_zero() || !r2.is_zero()) {
            const auto& bad = !r1.is_zero() ? r1 : r2;
            out.hit = Obstruction<K>{
                r, !r1.is_zero() ? "reduced dbar equation residual" : "reduced del equation residual",
                harmonic_or_residual(alg, g, bad.c.begin()->second)};
            w = prev;
            break;
        }
        if (!is_real(w)) throw InvariantViolation("kaehler extension lost reality");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verification that a solution of the reduced system solves the unreduced
// pair of equations, plus the closedness observation dbar(phi _| omega)_k = 0.

template <class K>
struct ReductionReport {
    int N = 0;
    // Homogeneous order-k parts, index k.
    std::vector<BiSeries<Form<K>>> reduced_dbar, reduced_del;  // reduced system residuals
    std::vector<BiSeries<Form<K>>> system_dbar, system_del;    // unreduced system residuals
    std::vector<BiSeries<Form<K>>> side;                       // dbar(phi _| omega)_k, k <= N+1

    static bool all_zero(const std::vector<BiSeries<Form<K>>>& v) {
        for (const auto& s : v)
            if (!s.is_zero()) return false;
        return true;
    }
    bool reduced_ok() const { return all_zero(reduced_dbar) && all_zero(reduced_del); }
    bool system_ok() const { return all_zero(system_dbar) && all_zero(system_del); }
    bool side_ok() const { return all_zero(side); }
    bool ok() const { return reduced_ok() && system_ok() && side_ok(); }
};

namespace detail {

// (1 - c) under the substitution product.  On (1,1)-coefficients this is
// exactly 1 - iota_c, and the checks use the contraction form there.
template <class K>
BiSeries<Form<K>> one_minus_subst(const BiSeries<VectorForm<K>>& c, const BiSeries<Form<K>>& s) {
    bool all11 = true;
    for (const auto& [key, f] : s.c) {
        (void)key;
        auto deg = f.bidegree();
        if (!deg || *deg != std::pair{1, 1}) {
            all11 = false;
            break;
        }
    }
    if (all11) return s - contract(c, s);
    return simul_contract(one_plus(-endo_series(c)), s);
}

}  // namespace detail

template <class K>
ReductionReport<K> verify_reduction(const LieAlgebra<K>& alg, const BiSeries<Form<K>>& omega,
                                    const BiSeries<VectorForm<K>>& phi, int N) {
    BiSeries<Form<K>> w = omega.truncated(N);
    BiSeries<VectorForm<K>> ph = phi.resized(N);
    auto phb = conj(ph);
    auto pbp = contract(ph, phb);
    auto ppb = contract(phb, ph);

    ReductionReport<K> out;
    out.N = N;
    auto bil1 = contract(pbp, w) - contract(ph, contract(phb, w));
    auto bil2 = contract(ppb, w) - contract(phb, contract(ph, w));
    auto red1 = delbar_series(alg, w) - delbar_series(alg, bil1) + del_series(alg, contract(ph, w));
    auto red2 = del_series(alg, w) - del_series(alg, bil2) + delbar_series(alg, contract(phb, w));

    auto s1 = detail::one_minus_subst(pbp, w);
    auto sys1 = del_series(alg, contract(ph, s1)) - contract(ph, del_series(alg, s1)) +
                delbar_series(alg, s1);
    auto s2 = detail::one_minus_subst(ppb, w);
    auto sys2 = delbar_series(alg, contract(phb, s2)) - contract(phb, delbar_series(alg, s2)) +
                del_series(alg, s2);

    for (int k = 0; k <= N; ++k) {
        out.reduced_dbar.push_back(red1.part(k));
        out.reduced_del.push_back(red2.part(k));
        out.system_dbar.push_back(sys1.part(k));
        out.system_del.push_back(sys2.part(k));
    }
    // The side condition reaches one order beyond the solution when the
    // family supplies it: order N+1 pairs phi_{N+1} with omega_0.
    int k_side = std::min(phi.N, N + 1);
    auto side = delbar_series(alg, contract(phi.resized(k_side), w.resized(k_side)));
    for (int k = 0; k <= k_side; ++k) out.side.push_back(side.part(k));
    return out;
}

// ---------------------------------------------------------------------------
// Closedness of the extended series: d(extend(phi, s)) as a series of
// ordinary invariant forms, cross-checked against the pushed-through
// expansion d o e = e o B^{-1} (d + del iota_phi - iota_phi del + iota_delta) B
// with B = 1 - pbp + phibar and delta the integrability defect.

template <class K>
struct ClosedReport {
    int N = 0;
    std::vector<BiSeries<Form<K>>> residuals;  // order-k parts of d(extend(phi, s))

    bool ok() const {
        for (const auto& s : residuals)
            if (!s.is_zero()) return false;
        return true;
    }
};

template <class K>
ClosedReport<K> verify_extension_closed(const LieAlgebra<K>& alg, const BiSeries<Form<K>>& series,
                                        const BiSeries<VectorForm<K>>& phi, int N) {
    BiSeries<Form<K>> s = series.truncated(N);
    BiSeries<VectorForm<K>> ph = phi.resized(N);
    auto phb = conj(ph);
    auto pbp = contract(ph, phb);
    auto ext = extension_endo(ph);
    auto lhs = d_series(alg, simul_contract(ext, s));

    auto bser = one_plus(endo_series(phb) - endo_series(pbp));
    auto delta = integrability_defect_series(alg, ph);
    auto inner = simul_contract(bser, s);
    auto mid = d_series(alg, inner) + del_series(alg, contract(ph, inner)) -
               contract(ph, del_series(alg, inner)) + contract(delta, inner);
    auto rhs = simul_contract(ext, simul_contract(inverse_series(bser), mid));
    if (lhs != rhs) throw InvariantViolation("extension differential expansions disagree");

    ClosedReport<K> out;
    out.N = N;
    for (int k = 0; k <= N; ++k) out.residuals.push_back(lhs.part(k));
    return out;
}

// ---------------------------------------------------------------------------
// Balanced extension: with E = (1 - pbp)^{-1} phibar, the transformed system
//   (dbar + del iota_phi + dbar iota_phi iota_E + 1/2 del iota_phi iota_phi iota_E) W = 0
//   (del + dbar iota_E + del iota_phi iota_E) W = 0
// is solved order-by-order by
//   W_l = -(iota_phi iota_E W)_l - dbar (ddbar)* G_BC dbar(iota_E W)_l
//         + del (ddbar)* G_BC del((iota_phi + 1/2 iota_phi iota_phi iota_E) W)_l,
// and the (n-1,n-1) series is recovered through the inverse extension.

template <class K>
struct BalancedExtension {
    BiSeries<Form<K>> omega;        // recovered series, symmetrized to be real
    BiSeries<Form<K>> omega_tilde;  // canonical solution of the transformed system
    bool mild = false;              // the solvability-backing lemma verdict
    std::optional<Obstruction<K>> hit;
};

template <class K>
BalancedExtension<K> extend_balanced(const LieAlgebra<K>& alg, const HermitianMetric<K>& g,
                                     const Form<K>& omega0, const BiSeries<VectorForm<K>>& phi,
                                     int N) {
    const int n = alg.n;
    if (!is_real(omega0)) throw InvariantViolation("extend_balanced expects a real metric form");
    make_metric(metric_matrix_of_form(omega0, n));  // validates positivity
    Form<K> om_top = wedge_power(omega0, n - 1);
    if (!ce_d(alg, om_top).is_zero())
        throw InvariantViolation("extend_balanced expects a balanced form: d(omega0^(n-1)) != 0");
    BiSeries<VectorForm<K>> ph = phi.resized(N);
    if (!integrability_defect_series(alg, ph).is_zero())
        throw IntegrabilityViolation("extend_balanced requires an integrable family");

    BalancedExtension<K> out;
    out.mild = check_mild(alg).holds;

    auto phb = conj(ph);
    auto pbp = contract(ph, phb);
    auto r_endo = inverse_series(one_plus(-endo_series(pbp)));  // (1 - pbp)^{-1}
    auto e_endo = compose(endo_series(phb), r_endo);            // phibar o (1 - pbp)^{-1}
    auto e_vf = vectorform_series(e_endo, true);

    BidegreeBasis b_y1 = make_basis(n, n, n - 1), b_y2 = make_basis(n, n - 1, n);
    BidegreeBasis b_m1 = make_basis(n, n - 1, n - 2), b_m2 = make_basis(n, n - 2, n - 1);
    GreenPair<K> gb1 = green(laplacian(LapKind::BottChern, alg, g, n, n - 1), g);
    GreenPair<K> gb2 = green(laplacian(LapKind::BottChern, alg, g, n - 1, n), g);
    Mat<K> dd1_adj = adjoint(ddbar_matrix(alg, n - 1, n - 2), g).m;  // (n,n-1) -> (n-1,n-2)
    Mat<K> dd2_adj = adjoint(ddbar_matrix(alg, n - 2, n - 1), g).m;  // (n-1,n) -> (n-2,n-1)
    K half = inv_val(K(2));

    BiSeries<Form<K>> wt = const_series(N, ph.m, om_top);
    auto residuals = [&](const BiSeries<Form<K>>& s) {
        auto ew = contract(e_vf, s);
        auto pew = contract(ph, ew);
        auto r1 = delbar_series(alg, s) + del_series(alg, contract(ph, s)) +
                  delbar_series(alg, pew) + half * del_series(alg, contract(ph, pew));
        auto r2 = del_series(alg, s) + delbar_series(alg, ew) + del_series(alg, pew);
        return std::pair{r1, r2};
    };

    for (int l = 1; l <= N && !out.hit; ++l) {
        BiSeries<Form<K>> prev = wt;
        auto ew = contract(e_vf, wt);
        auto t1 = (-contract(ph, ew)).part(l);
        auto y1 = delbar_series(alg, ew).part(l);  // (n, n-1)
        auto y2 = del_series(alg, contract(ph, wt) + half * contract(ph, contract(ph, ew))).part(l);
        for (const auto& [key, f] : y1.c) {
            (void)key;
            Form<K> h = to_form(b_y1, gb1.H * to_vec(b_y1, f));
            if (!h.is_zero()) {
                out.hit = Obstruction<K>{l, "harmonic obstruction in the dbar-side del-dbar equation", h};
                break;
            }
        }
        for (const auto& [key, f] : y2.c) {
            (void)key;
            if (out.hit) break;
            Form<K> h = to_form(b_y2, gb2.H * to_vec(b_y2, f));
            if (!h.is_zero()) {
                out.hit = Obstruction<K>{l, "harmonic obstruction in the del-side del-dbar equation", h};
                break;
            }
        }
        if (out.hit) break;

        wt += t1;
        for (const auto& [key, f] : y1.c)
            wt.add(key, -delbar(alg, to_form(b_m1, dd1_adj * (gb1.G * to_vec(b_y1, f)))));
        for (const auto& [key, f] : y2.c)
            wt.add(key, del(alg, to_form(b_m2, dd2_adj * (gb2.G * to_vec(b_y2, f)))));

        auto [r1, r2] = residuals(wt);
        if (!r1.part(l).is_zero() || !r2.part(l).is_zero()) {
            auto bad = !r1.part(l).is_zero() ? r1.part(l) : r2.part(l);
            out.hit = Obstruction<K>{l, "transformed system residual", bad.c.begin()->second};
            wt = prev;
            break;
        }
    }

    out.omega_tilde = wt;
    auto rec = compose(compose(inverse_series(extension_endo(ph)), one_plus(endo_series(ph))),
                       one_plus(e_endo));
    auto om = simul_contract(rec, wt);
    out.omega = half * (om + conj(om));
    return out;
}

// ---------------------------------------------------------------------------
// Geometric series (1 - pbp)^{-1} = sum_k (pbp)^k as frame endomorphisms.

template <class K>
BiSeries<FrameEndo<K>> neumann_inverse(const BiSeries<VectorForm<K>>& phi, int N) {
    if (!phi.coeff(SeriesKey{}).is_zero())
        throw InvariantViolation("neumann_inverse requires phi(0) = 0");
    auto ph = phi.resized(N);
    auto pbp = contract(ph, conj(ph));
    return inverse_series(one_plus(-endo_series(pbp)));
}

// ---------------------------------------------------------------------------
// Majorant series A(t) = (beta/16 gamma) sum_{m>=1} (gamma t)^m / m^2 and the
// coefficientwise domination order.  Norms are invariant-level coefficient
// max-norms, the artifact's declared stand-in for Hoelder norms.

struct MajorantParams {
    mpq_class beta = 16;
    mpq_class gamma = 1;
    int order = 20;
};

inline std::vector<mpq_class> majorant(const MajorantParams& p) {
    if (p.beta <= 0 || p.gamma <= 0)
        throw InvariantViolation("majorant parameters must be positive");
    if (p.order < 0) throw InvariantViolation("majorant order must be non-negative");
    std::vector<mpq_class> a(static_cast<size_t>(p.order) + 1, mpq_class(0));
    mpq_class lead = p.beta / (16 * p.gamma);
    mpq_class gpow(1);
    for (int m = 1; m <= p.order; ++m) {
        gpow *= p.gamma;
        a[m] = lead * gpow / (mpq_class(m) * m);
    }
    return a;
}

inline bool dominates(const std::vector<mpq_class>& norm_series,
                      const std::vector<mpq_class>& maj) {
    size_t upto = std::min(norm_series.size(), maj.size());
    for (size_t m = 0; m < upto; ++m)
        if (norm_series[m] > maj[m]) return false;
    return true;
}

inline mpq_class max_norm(const GQ& v) { return std::max(abs(v.re), abs(v.im)); }

inline mpq_class max_norm(const Form<GQ>& f) {
    mpq_class out(0);
    for (const auto& [key, v] : f.c) {
        (void)key;
        out = std::max(out, max_norm(v));
    }
    return out;
}

inline mpq_class max_norm(const VectorForm<GQ>& v) {
    mpq_class out(0);
    for (const auto& [k, f] : v.comp) {
        (void)k;
        out = std::max(out, max_norm(f));
    }
    return out;
}

template <class V>
std::vector<mpq_class> coeff_norms(const BiSeries<V>& s) {
    std::vector<mpq_class> out(static_cast<size_t>(s.N) + 1, mpq_class(0));
    for (const auto& [k, v] : s.c) out[k.total()] += max_norm(v);
    return out;
}

// ---------------------------------------------------------------------------
// Unobstructed extension of closed forms through the deformed Hodge
// projection, realized on the fixed algebra.  The deformed operators are
//   dbar_t = (1-pbp)^{-1} ([del, iota_phi] + dbar) (1-pbp)      (substitution)
//   del_t  = (1-ppb)^{-1} ([dbar, iota_phibar] + del) (1-ppb)
// acting on total-degree blocks, with adjoints in the fixed metric (the
// deformed metric is chosen so the extension is an isometry).  The projector
// family needs the harmonic spaces to continue in t; the kernel continuation
// below checks that order-by-order and reports the first failure.

enum class DcVariant { BottChern, Aeppli };

template <class K>
struct DclosedExtension {
    BiSeries<Form<K>> omega;  // extended series of ordinary invariant forms
    std::optional<Obstruction<K>> hit;
};

template <class K>
struct SeriesGreen {
    BiSeries<Mat<K>> F, G;
    std::optional<std::pair<SeriesKey, Mat<K>>> obstruction;
};

// Kernel continuation K(t) with L(t) K(t) = 0, then the projector
// F = K (M^T)^{-1} conj(K)^T gram^T with M = K^T gram conj(K), and the Green
// series G = (L + F)^{-1} - F.
template <class K>
SeriesGreen<K> green_series(const BiSeries<Mat<K>>& L, const Mat<K>& gram) {
    const int d = L.zero.rows;
    Mat<K> L0 = L.coeff(SeriesKey{});
    GreenPair<K> gp0 = green_pair(L0, gram);
    Mat<K> K0 = kernel_basis(L0);
    SeriesGreen<K> out{BiSeries<Mat<K>>(L.N, L.m, Mat<K>(d, d)),
                       BiSeries<Mat<K>>(L.N, L.m, Mat<K>(d, d)),
                       std::nullopt};
    if (K0.cols == 0) {
        out.G = inverse_series(L);
        return out;
    }
    int n_ok = L.N;
    BiSeries<Mat<K>> kser = const_series(L.N, L.m, K0);
    for (int r = 1; r <= L.N && !out.obstruction; ++r) {
        for (SeriesKey key : keys_of_order(L.m, r)) {
            Mat<K> rhs(d, K0.cols);
            for (const auto& [ka, la] : L.c) {
                if (ka == SeriesKey{}) continue;
                auto rem = try_sub(key, ka);
                if (!rem) continue;
                auto it = kser.c.find(*rem);
                if (it == kser.c.end()) continue;
                rhs = rhs + la * it->second;
            }
            if (rhs.is_zero()) continue;
            Mat<K> bad = gp0.H * rhs;
            if (!bad.is_zero()) {
                out.obstruction = std::pair{key, bad};
                n_ok = r - 1;
                break;
            }
            kser.add(key, K(-1) * (gp0.G * rhs));
        }
    }
    auto ell = L.truncated(n_ok);
    auto kk = kser.truncated(n_ok);
    auto kc = conj(kk);
    auto em = compose(compose(transpose_series(kk), const_series(n_ok, L.m, gram)), kc);
    auto em_inv = inverse_series(transpose_series(em));
    out.F = compose(compose(compose(kk, em_inv), transpose_series(kc)),
                    const_series(n_ok, L.m, gram.transpose()));
    out.G = inverse_series(ell + out.F) - out.F;
    return out;
}

namespace detail {

template <class K>
struct DeformedOps {
    const LieAlgebra<K>& alg;
    const HermitianMetric<K>& g;
    int N, m;
    BiSeries<VectorForm<K>> ph, phb;
    BiSeries<FrameEndo<K>> bz, bz_inv;  // 1 - pbp and inverse
    BiSeries<FrameEndo<K>> bb, bb_inv;  // 1 - ppb and inverse

    DeformedOps(const LieAlgebra<K>& alg_, const HermitianMetric<K>& g_,
                const BiSeries<VectorForm<K>>& phi)
        : alg(alg_), g(g_), N(phi.N), m(phi.m), ph(phi), phb(deforge::conj(phi)) {
        bz = one_plus(-endo_series(contract(ph, phb)));
        bz_inv = inverse_series(bz);
        bb = one_plus(-endo_series(contract(phb, ph)));
        bb_inv = inverse_series(bb);
    }

    std::map<int, std::vector<FKey>> keys_;
    std::map<int, std::map<FKey, int>> index_;
    std::map<int, Mat<K>> gram_;
    std::map<int, BiSeries<Mat<K>>> dbar_, del_;

    const std::vector<FKey>& keys(int deg) {
        auto it = keys_.find(deg);
        if (it == keys_.end()) {
            it = keys_.emplace(deg, total_degree_keys(alg.n, std::clamp(deg, 0, 2 * alg.n))).first;
            if (deg < 0 || deg > 2 * alg.n) it->second.clear();
            auto& idx = index_[deg];
            for (size_t j = 0; j < it->second.size(); ++j)
                idx[it->second[j]] = static_cast<int>(j);
        }
        return it->second;
    }

    int dim(int deg) { return static_cast<int>(keys(deg).size()); }

    // Block-diagonal by bidegree: monomials of different type are orthogonal.
    const Mat<K>& gram(int deg) {
        auto it = gram_.find(deg);
        if (it == gram_.end()) {
            const auto& ks = keys(deg);
            Mat<K> mm(dim(deg), dim(deg));
            for (size_t a = 0; a < ks.size(); ++a)
                for (size_t b = 0; b < ks.size(); ++b) {
                    if (mask_size(ks[a].P) != mask_size(ks[b].P)) continue;
                    mm.at(static_cast<int>(a), static_cast<int>(b)) =
                        minor_det(g.h, ks[a].P, ks[b].P) *
                        conj_val(minor_det(g.h, ks[a].Q, ks[b].Q));
                }
            it = gram_.emplace(deg, std::move(mm)).first;
        }
        return it->second;
    }

    Vec<K> to_vec(int deg, const Form<K>& f) {
        Vec<K> out(keys(deg).size(), K(0));
        const auto& idx = index_.at(deg);
        for (const auto& [key, v] : f.c) {
            auto it = idx.find(key);
            if (it == idx.end()) throw DegreeMismatch("form leaves the total-degree block");
            out[it->second] = v;
        }
        return out;
    }

    Form<K> to_form(int deg, const Vec<K>& x) {
        const auto& ks = keys(deg);
        Form<K> out(alg.n);
        for (size_t j = 0; j < ks.size(); ++j) out.add_term(ks[j].P, ks[j].Q, x[j]);
        return out;
    }

    BiSeries<Form<K>> dbar_t_apply(const Form<K>& f) {
        auto inner = simul_contract(bz, const_series(N, m, f));
        auto mid = del_series(alg, contract(ph, inner)) - contract(ph, del_series(alg, inner)) +
                   delbar_series(alg, inner);
        return simul_contract(bz_inv, mid);
    }

    BiSeries<Form<K>> del_t_apply(const Form<K>& f) {
        auto inner = simul_contract(bb, const_series(N, m, f));
        auto mid = delbar_series(alg, contract(phb, inner)) - contract(phb, delbar_series(alg, inner)) +
                   del_series(alg, inner);
        return simul_contract(bb_inv, mid);
    }

    template <class F>
    BiSeries<Mat<K>> op_matrix(int sd, int td, F&& op) {
        const auto& src = keys(sd);
        keys(td);
        const auto& idx = index_.at(td);
        std::map<SeriesKey, Mat<K>> acc;
        for (size_t j = 0; j < src.size(); ++j) {
            BiSeries<Form<K>> img = op(Form<K>::monomial(alg.n, src[j].P, src[j].Q));
            for (const auto& [key, f] : img.c) {
                auto [it, fresh] = acc.try_emplace(key, dim(td), dim(sd));
                (void)fresh;
                for (const auto& [fk, v] : f.c) {
                    auto fit = idx.find(fk);
                    if (fit == idx.end())
                        throw DegreeMismatch("deformed operator leaves the degree window");
                    it->second.at(fit->second, static_cast<int>(j)) += v;
                }
            }
        }
        BiSeries<Mat<K>> out(N, m, Mat<K>(dim(td), dim(sd)));
        for (auto& [key, mm] : acc) out.add(key, mm);
        return out;
    }

    const BiSeries<Mat<K>>& dbar_mat(int deg) {
        auto it = dbar_.find(deg);
        if (it == dbar_.end())
            it = dbar_.emplace(deg, op_matrix(deg, deg + 1,
                                              [&](const Form<K>& f) { return dbar_t_apply(f); }))
                     .first;
        return it->second;
    }

    const BiSeries<Mat<K>>& del_mat(int deg) {
        auto it = del_.find(deg);
        if (it == del_.end())
            it = del_.emplace(deg, op_matrix(deg, deg + 1,
                                             [&](const Form<K>& f) { return del_t_apply(f); }))
                     .first;
        return it->second;
    }

    // Adjoint of a series operator: coefficient (i,j) is the fixed-metric
    // adjoint of coefficient (j,i).
    BiSeries<Mat<K>> adj_mat(const BiSeries<Mat<K>>& s, int sd, int td) {
        BiSeries<Mat<K>> out(s.N, s.m, Mat<K>(dim(sd), dim(td)));
        for (const auto& [key, mm] : s.c)
            out.add(conj_key(key), adjoint_matrix(mm, gram(sd), gram(td)));
        return out;
    }

    BiSeries<Mat<K>> laplacian_series(LapKind kind, int deg) {
        auto dd_up = compose(del_mat(deg + 1), dbar_mat(deg));      // deg -> deg+2
        auto dd_dn = compose(del_mat(deg - 1), dbar_mat(deg - 2));  // deg-2 -> deg
        if (kind == LapKind::BottChern) {
            auto t1 = compose(dd_dn, adj_mat(dd_dn, deg - 2, deg));
            auto t2 = compose(adj_mat(dd_up, deg, deg + 2), dd_up);
            auto t3 = compose(adj_mat(dbar_mat(deg), deg, deg + 1),
                              compose(del_mat(deg),
                                      compose(adj_mat(del_mat(deg), deg, deg + 1), dbar_mat(deg))));
            auto t4 = compose(adj_mat(del_mat(deg), deg, deg + 1),
                              compose(dbar_mat(deg),
                                      compose(adj_mat(dbar_mat(deg), deg, deg + 1), del_mat(deg))));
            auto t5 = compose(adj_mat(dbar_mat(deg), deg, deg + 1), dbar_mat(deg));
            auto t6 = compose(adj_mat(del_mat(deg), deg, deg + 1), del_mat(deg));
            return t1 + t2 + t3 + t4 + t5 + t6;
        }
        if (kind == LapKind::Aeppli) {
            auto t1 = compose(adj_mat(dd_up, deg, deg + 2), dd_up);
            auto t2 = compose(dd_dn, adj_mat(dd_dn, deg - 2, deg));
            auto t3 = compose(dbar_mat(deg - 1),
                              compose(adj_mat(del_mat(deg - 1), deg - 1, deg),
                                      compose(del_mat(deg - 1),
                                              adj_mat(dbar_mat(deg - 1), deg - 1, deg))));
            auto t4 = compose(del_mat(deg - 1),
                              compose(adj_mat(dbar_mat(deg - 1), deg - 1, deg),
                                      compose(dbar_mat(deg - 1),
                                              adj_mat(del_mat(deg - 1), deg - 1, deg))));
            auto t5 = compose(dbar_mat(deg - 1), adj_mat(dbar_mat(deg - 1), deg - 1, deg));
            auto t6 = compose(del_mat(deg - 1), adj_mat(del_mat(deg - 1), deg - 1, deg));
            return t1 + t2 + t3 + t4 + t5 + t6;
        }
        throw InvariantViolation("unsupported deformed laplacian kind");
    }
};

}  // namespace detail

template <class K>
DclosedExtension<K> extend_dclosed_projection(const LieAlgebra<K>& alg,
                                              const HermitianMetric<K>& g, const Form<K>& input,
                                              const BiSeries<VectorForm<K>>& phi, int N,
                                              DcVariant variant = DcVariant::BottChern) {
    auto deg = input.bidegree();
    if (!deg) throw DegreeMismatch("extend_dclosed_projection expects a homogeneous input");
    const int d = deg->first + deg->second;
    if (variant == DcVariant::BottChern) {
        if (!ce_d(alg, input).is_zero())
            throw InvariantViolation("input must be d-closed for the closed-form variant");
    } else if (!del(alg, delbar(alg, input)).is_zero()) {
        throw InvariantViolation("input must be del-dbar-closed for the Aeppli variant");
    }
    BiSeries<VectorForm<K>> ph = phi.resized(N);
    if (!integrability_defect_series(alg, ph).is_zero())
        throw IntegrabilityViolation("extend_dclosed_projection requires an integrable family");

    detail::DeformedOps<K> ops(alg, g, ph);
    DclosedExtension<K> out{BiSeries<Form<K>>(N, ph.m, Form<K>(alg.n)), std::nullopt};
    auto lap = ops.laplacian_series(variant == DcVariant::BottChern ? LapKind::BottChern
                                                                    : LapKind::Aeppli,
                                    d);
    SeriesGreen<K> sg = green_series(lap, ops.gram(d));
    if (sg.obstruction) {
        auto& [key, mat] = *sg.obstruction;
        Form<K> wit(alg.n);
        for (int j = 0; j < mat.cols && wit.is_zero(); ++j) wit = ops.to_form(d, mat.column(j));
        out.hit = Obstruction<K>{key.total(), "harmonic space fails to continue", wit};
    }

    BiSeries<Mat<K>> proj(sg.G.N, ph.m, Mat<K>(ops.dim(d), ops.dim(d)));
    if (variant == DcVariant::BottChern) {
        auto chain = compose(ops.del_mat(d - 1),
                             compose(ops.dbar_mat(d - 2),
                                     compose(ops.adj_mat(ops.dbar_mat(d - 2), d - 2, d - 1),
                                             ops.adj_mat(ops.del_mat(d - 1), d - 1, d))));
        proj = compose(chain, sg.G) + sg.F;
    } else {
        auto del_up = ops.del_mat(d - 1);    // d-1 -> d
        auto dbar_up = ops.dbar_mat(d - 1);  // d-1 -> d
        auto del_dn = ops.adj_mat(del_up, d - 1, d);
        auto dbar_dn = ops.adj_mat(dbar_up, d - 1, d);
        auto dd_up = compose(ops.del_mat(d + 1), ops.dbar_mat(d));
        auto dd_dn2 = compose(ops.adj_mat(ops.dbar_mat(d - 2), d - 2, d - 1),
                              ops.adj_mat(ops.del_mat(d - 1), d - 1, d));  // d -> d-2
        auto t1 = compose(ops.del_mat(d - 1), compose(ops.dbar_mat(d - 2), dd_dn2));
        auto t2 = compose(del_up, compose(dbar_dn, compose(dbar_up, del_dn)));
        auto t3 = compose(dbar_up, compose(del_dn, compose(del_up, dbar_dn)));
        auto t4 = compose(dbar_up, dbar_dn);
        auto t5 = compose(del_up, del_dn);
        proj = compose(t1 + t2 + t3 + t4 + t5, sg.G) + sg.F;
    }

    auto x = deforge::apply(proj, const_series(proj.N, ph.m, ops.to_vec(d, input)));
    BiSeries<Form<K>> pulled(x.N, ph.m, Form<K>(alg.n));
    for (const auto& [key, v] : x.c) pulled.add(key, ops.to_form(d, v));
    if (pulled.coeff(SeriesKey{}) != input)
        throw InvariantViolation("projection family alters the input at t = 0");

    // Closedness in the deformed calculus; any residual is an obstruction.
    BiSeries<Vec<K>> res = variant == DcVariant::BottChern
                               ? deforge::apply(ops.dbar_mat(d) + ops.del_mat(d), x)
                               : deforge::apply(compose(ops.del_mat(d + 1), ops.dbar_mat(d)), x);
    if (!res.is_zero() && !out.hit) {
        auto worst = res.c.begin();
        for (auto it = res.c.begin(); it != res.c.end(); ++it)
            if (it->first.total() < worst->first.total()) worst = it;
        int bad_deg = variant == DcVariant::BottChern ? d + 1 : d + 2;
        out.hit = Obstruction<K>{worst->first.total(), "deformed closedness residual",
                                 ops.to_form(bad_deg, worst->second)};
        pulled = pulled.truncated(worst->first.total() - 1);
    }

    out.omega = simul_contract(extension_endo(ph), pulled);
    return out;
}

}  // namespace deforge
