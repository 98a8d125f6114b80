#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "deforge/calculus.hpp"
#include "deforge/linalg.hpp"

namespace deforge {

// ---------------------------------------------------------------------------
// Hermitian metrics and the induced inner products on each bidegree space.

template <class K>
struct HermitianMetric {
    int n = 0;
    Mat<K> h;  // pairwise inner products of the (1,0) coframe generators

    static HermitianMetric orthonormal(int n_) { return {n_, Mat<K>::identity(n_)}; }
};

namespace detail {
inline bool is_positive_real(const GQ& v) { return v.is_real() && v.re > 0; }
inline bool is_positive_real(const CD& v) {
    return std::abs(v.v.imag()) <= CD::eps() && v.v.real() > CD::eps();
}
}  // namespace detail

// Validates hermitian symmetry and positive definiteness (leading principal
// minors, which is exact over the rational backend).
template <class K>
HermitianMetric<K> make_metric(Mat<K> h) {
    if (h.rows != h.cols || h.rows <= 0)
        throw InvariantViolation("metric must be a nonempty square matrix");
    for (int i = 0; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j)
            if (!is_zero(h.at(i, j) - conj_val(h.at(j, i))))
                throw InvariantViolation("metric matrix is not hermitian");
    for (int k = 1; k <= h.rows; ++k) {
        Mat<K> lead(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) lead.at(i, j) = h.at(i, j);
        if (!detail::is_positive_real(det(lead)))
            throw InvariantViolation("metric matrix is not positive definite");
    }
    int n = h.rows;
    return {n, std::move(h)};
}

template <class K>
K minor_det(const Mat<K>& h, Mask rows, Mask cols) {
    std::vector<int> ri = mask_bits(rows), ci = mask_bits(cols);
    if (ri.size() != ci.size()) throw InvariantViolation("minor_det needs equal index counts");
    Mat<K> sub(static_cast<int>(ri.size()), static_cast<int>(ci.size()));
    for (size_t i = 0; i < ri.size(); ++i)
        for (size_t j = 0; j < ci.size(); ++j) sub.at(static_cast<int>(i), static_cast<int>(j)) = h.at(ri[i], ci[j]);
    return det(sub);
}

// ---------------------------------------------------------------------------
// Canonical monomial bases of the bidegree spaces and coordinate transfer.

struct BidegreeBasis {
    int n = 0, p = 0, q = 0;
    std::vector<FKey> keys;
    std::map<FKey, int> index;
};

inline BidegreeBasis make_basis(int n, int p, int q) {
    BidegreeBasis b;
    b.n = n;
    b.p = p;
    b.q = q;
    b.keys = bidegree_keys(n, p, q);
    for (size_t i = 0; i < b.keys.size(); ++i) b.index[b.keys[i]] = static_cast<int>(i);
    return b;
}

template <class K>
Vec<K> to_vec(const BidegreeBasis& b, const Form<K>& f) {
    Vec<K> v(b.keys.size(), K(0));
    for (const auto& [key, coeff] : f.c) {
        auto it = b.index.find(key);
        if (it == b.index.end()) throw DegreeMismatch("form does not live in the requested bidegree");
        v[it->second] = coeff;
    }
    return v;
}

template <class K>
Form<K> to_form(const BidegreeBasis& b, const Vec<K>& v) {
    if (v.size() != b.keys.size()) throw InvariantViolation("coordinate vector has wrong length");
    Form<K> f(b.n);
    for (size_t i = 0; i < v.size(); ++i) f.add_term(b.keys[i].P, b.keys[i].Q, v[i]);
    return f;
}

// Sesquilinear inner product matrix on the monomial basis of a bidegree:
// <x, y> = x^T G conj(y), G[a][b] = det(h[P_a,P_b]) * conj(det(h[Q_a,Q_b])).
template <class K>
Mat<K> gram_matrix(const HermitianMetric<K>& g, int p, int q) {
    std::vector<FKey> keys = bidegree_keys(g.n, p, q);
    const int d = static_cast<int>(keys.size());
    Mat<K> G(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            G.at(a, b) =
                minor_det(g.h, keys[a].P, keys[b].P) * conj_val(minor_det(g.h, keys[a].Q, keys[b].Q));
    return G;
}

template <class K>
K inner_vec(const Vec<K>& x, const Vec<K>& y, const Mat<K>& gram) {
    if (static_cast<int>(x.size()) != gram.rows || static_cast<int>(y.size()) != gram.cols)
        throw InvariantViolation("inner product shape mismatch");
    K out(0);
    for (int i = 0; i < gram.rows; ++i) {
        if (is_zero(x[i])) continue;
        for (int j = 0; j < gram.cols; ++j) out += x[i] * gram.at(i, j) * conj_val(y[j]);
    }
    return out;
}

template <class K>
K inner_form(const HermitianMetric<K>& g, const Form<K>& x, const Form<K>& y, int p, int q) {
    BidegreeBasis b = make_basis(g.n, p, q);
    return inner_vec(to_vec(b, x), to_vec(b, y), gram_matrix(g, p, q));
}

// ---------------------------------------------------------------------------
// Operators as matrices between bidegree spaces.

template <class K>
struct OperatorMatrix {
    int sp = 0, sq = 0;  // source bidegree
    int tp = 0, tq = 0;  // target bidegree
    Mat<K> m;            // rows indexed by the target basis, columns by the source
};

template <class K>
OperatorMatrix<K> compose(const OperatorMatrix<K>& a, const OperatorMatrix<K>& b) {
    if (a.sp != b.tp || a.sq != b.tq) throw DegreeMismatch("operator composition bidegree mismatch");
    return {b.sp, b.sq, a.tp, a.tq, a.m * b.m};
}

template <class K>
OperatorMatrix<K> add(const OperatorMatrix<K>& a, const OperatorMatrix<K>& b) {
    if (a.sp != b.sp || a.sq != b.sq || a.tp != b.tp || a.tq != b.tq)
        throw DegreeMismatch("operator sum bidegree mismatch");
    return {a.sp, a.sq, a.tp, a.tq, a.m + b.m};
}

template <class K, class F>
OperatorMatrix<K> operator_matrix(const LieAlgebra<K>& alg, int p, int q, int tp, int tq, F&& op) {
    BidegreeBasis src = make_basis(alg.n, p, q);
    BidegreeBasis dst = make_basis(alg.n, tp, tq);
    Mat<K> m(static_cast<int>(dst.keys.size()), static_cast<int>(src.keys.size()));
    for (size_t j = 0; j < src.keys.size(); ++j) {
        Form<K> img = op(Form<K>::monomial(alg.n, src.keys[j].P, src.keys[j].Q));
        for (const auto& [key, v] : img.c) {
            auto it = dst.index.find(key);
            if (it == dst.index.end()) throw DegreeMismatch("operator image leaves the target bidegree");
            m.at(it->second, static_cast<int>(j)) = v;
        }
    }
    return {p, q, tp, tq, std::move(m)};
}

template <class K>
OperatorMatrix<K> del_matrix(const LieAlgebra<K>& alg, int p, int q) {
    return operator_matrix(alg, p, q, p + 1, q, [&](const Form<K>& f) { return del(alg, f); });
}

template <class K>
OperatorMatrix<K> delbar_matrix(const LieAlgebra<K>& alg, int p, int q) {
    return operator_matrix(alg, p, q, p, q + 1, [&](const Form<K>& f) { return delbar(alg, f); });
}

template <class K>
OperatorMatrix<K> ddbar_matrix(const LieAlgebra<K>& alg, int p, int q) {
    return compose(del_matrix(alg, p, q + 1), delbar_matrix(alg, p, q));
}

// Adjoint with respect to the induced inner products: the unique matrix with
// <M x, y>_target = <x, M* y>_source, namely M* = conj(G_s^{-1} M^T G_t).
template <class K>
Mat<K> adjoint_matrix(const Mat<K>& m, const Mat<K>& gram_src, const Mat<K>& gram_tgt) {
    auto gs_inv = inverse(gram_src);
    if (!gs_inv) throw InvariantViolation("adjoint: source gram is singular");
    return conj_entries(*gs_inv * m.transpose() * gram_tgt);
}

template <class K>
OperatorMatrix<K> adjoint(const OperatorMatrix<K>& op, const HermitianMetric<K>& g) {
    Mat<K> gs = gram_matrix(g, op.sp, op.sq);
    Mat<K> gt = gram_matrix(g, op.tp, op.tq);
    return {op.tp, op.tq, op.sp, op.sq, adjoint_matrix(op.m, gs, gt)};
}

// ---------------------------------------------------------------------------
// Laplacians.

enum class LapKind { Dbar, Del, BottChern, Aeppli };

template <class K>
OperatorMatrix<K> laplacian(LapKind kind, const LieAlgebra<K>& alg, const HermitianMetric<K>& g,
                            int p, int q) {
    auto adj = [&](const OperatorMatrix<K>& op) { return adjoint(op, g); };
    auto D = [&](int a, int b) { return del_matrix(alg, a, b); };
    auto Db = [&](int a, int b) { return delbar_matrix(alg, a, b); };
    switch (kind) {
        case LapKind::Dbar: {
            OperatorMatrix<K> up = Db(p, q), dn = Db(p, q - 1);
            return add(compose(adj(up), up), compose(dn, adj(dn)));
        }
        case LapKind::Del: {
            OperatorMatrix<K> up = D(p, q), dn = D(p - 1, q);
            return add(compose(adj(up), up), compose(dn, adj(dn)));
        }
        case LapKind::BottChern: {
            // 4th-order operator whose kernel is ker d ∩ ker(del delbar)*.
            OperatorMatrix<K> A = ddbar_matrix(alg, p, q);          // (p,q) -> (p+1,q+1)
            OperatorMatrix<K> B = ddbar_matrix(alg, p - 1, q - 1);  // (p-1,q-1) -> (p,q)
            OperatorMatrix<K> t1 = compose(B, adj(B));
            OperatorMatrix<K> t2 = compose(adj(A), A);
            OperatorMatrix<K> t3 =  // delbar* del del* delbar
                compose(adj(Db(p, q)), compose(D(p - 1, q + 1), compose(adj(D(p - 1, q + 1)), Db(p, q))));
            OperatorMatrix<K> t4 =  // del* delbar delbar* del
                compose(adj(D(p, q)), compose(Db(p + 1, q - 1), compose(adj(Db(p + 1, q - 1)), D(p, q))));
            OperatorMatrix<K> t5 = compose(adj(Db(p, q)), Db(p, q));
            OperatorMatrix<K> t6 = compose(adj(D(p, q)), D(p, q));
            return add(add(add(t1, t2), add(t3, t4)), add(t5, t6));
        }
        case LapKind::Aeppli: {
            OperatorMatrix<K> A = ddbar_matrix(alg, p, q);
            OperatorMatrix<K> B = ddbar_matrix(alg, p - 1, q - 1);
            OperatorMatrix<K> t1 = compose(adj(A), A);
            OperatorMatrix<K> t2 = compose(B, adj(B));
            OperatorMatrix<K> t3 =  // delbar del* del delbar*
                compose(Db(p, q - 1), compose(adj(D(p, q - 1)), compose(D(p, q - 1), adj(Db(p, q - 1)))));
            OperatorMatrix<K> t4 =  // del delbar* delbar del*
                compose(D(p - 1, q), compose(adj(Db(p - 1, q)), compose(Db(p - 1, q), adj(D(p - 1, q)))));
            OperatorMatrix<K> t5 = compose(Db(p, q - 1), adj(Db(p, q - 1)));
            OperatorMatrix<K> t6 = compose(D(p - 1, q), adj(D(p - 1, q)));
            return add(add(add(t1, t2), add(t3, t4)), add(t5, t6));
        }
    }
    throw InvariantViolation("unknown laplacian kind");
}

inline const std::vector<std::pair<LapKind, std::string>>& laplacian_names() {
    static const std::vector<std::pair<LapKind, std::string>> table = {
        {LapKind::Dbar, "dbar"},
        {LapKind::Del, "del"},
        {LapKind::BottChern, "bc"},
        {LapKind::Aeppli, "aeppli"},
    };
    return table;
}

// ---------------------------------------------------------------------------
// Green operators: 1 = H + lap G with H the orthogonal kernel projection.

template <class K>
struct GreenPair {
    Mat<K> H;  // projection onto ker(lap), orthogonal for the gram inner product
    Mat<K> G;  // pseudo-inverse of lap vanishing on ker(lap)
};

template <class K>
GreenPair<K> green_pair(const Mat<K>& lap, const Mat<K>& gram) {
    const int d = lap.rows;
    if (lap.cols != d || gram.rows != d || gram.cols != d)
        throw InvariantViolation("green: shape mismatch");
    Mat<K> kb = kernel_basis(lap);
    Mat<K> H(d, d);
    if (kb.cols > 0) {
        // Solve the normal equations of the projection onto span(kb):
        // H = kb (M^T)^{-1} conj(kb)^T gram^T with M[a][b] = <kb_a, kb_b>.
        Mat<K> M = kb.transpose() * gram * conj_entries(kb);
        auto minv = inverse(M.transpose());
        if (!minv) throw InvariantViolation("green: kernel gram is singular");
        H = kb * (*minv) * conj_entries(kb).transpose() * gram.transpose();
    }
    auto inv = inverse(lap + H);
    if (!inv) throw InvariantViolation("green: lap plus kernel projection is singular");
    return {H, *inv - H};
}

template <class K>
GreenPair<K> green(const OperatorMatrix<K>& lap, const HermitianMetric<K>& g) {
    if (lap.sp != lap.tp || lap.sq != lap.tq)
        throw DegreeMismatch("green expects an endomorphism of one bidegree");
    return green_pair(lap.m, gram_matrix(g, lap.sp, lap.sq));
}

// Float-backend variant: spectral splitting of a plain hermitian matrix, with
// eigenvalues below the cutoff treated as kernel. Assumes an orthonormal basis.
inline GreenPair<CD> green_spectral(const Mat<CD>& lap, double cutoff = 1e-9) {
    HermEigen eig = jacobi_hermitian(lap);
    const int d = lap.rows;
    GreenPair<CD> out{Mat<CD>(d, d), Mat<CD>(d, d)};
    for (int k = 0; k < d; ++k) {
        const bool kernel = std::abs(eig.values[k]) <= cutoff;
        const double w = kernel ? 1.0 : 1.0 / eig.values[k];
        Mat<CD>& acc = kernel ? out.H : out.G;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                acc.at(i, j) += CD(w * eig.vectors.at(i, k).v * std::conj(eig.vectors.at(j, k).v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cohomology dimensions by rank computations (metric independent).

enum class CohTheory { Dolbeault, Del, BottChern, Aeppli };

inline const std::vector<std::pair<CohTheory, std::string>>& theory_names() {
    static const std::vector<std::pair<CohTheory, std::string>> table = {
        {CohTheory::Dolbeault, "dolbeault"},
        {CohTheory::Del, "del"},
        {CohTheory::BottChern, "bc"},
        {CohTheory::Aeppli, "aeppli"},
    };
    return table;
}

template <class K>
int cohomology_dim(const LieAlgebra<K>& alg, CohTheory th, int p, int q) {
    const int dim_pq = static_cast<int>(bidegree_keys(alg.n, p, q).size());
    switch (th) {
        case CohTheory::Dolbeault:
            return dim_pq - rank(delbar_matrix(alg, p, q).m) - rank(delbar_matrix(alg, p, q - 1).m);
        case CohTheory::Del:
            return dim_pq - rank(del_matrix(alg, p, q).m) - rank(del_matrix(alg, p - 1, q).m);
        case CohTheory::BottChern: {
            Mat<K> stacked = vstack(del_matrix(alg, p, q).m, delbar_matrix(alg, p, q).m);
            return dim_pq - rank(stacked) - rank(ddbar_matrix(alg, p - 1, q - 1).m);
        }
        case CohTheory::Aeppli: {
            Mat<K> joined = hstack(del_matrix(alg, p - 1, q).m, delbar_matrix(alg, p, q - 1).m);
            return dim_pq - rank(ddbar_matrix(alg, p, q).m) - rank(joined);
        }
    }
    throw InvariantViolation("unknown cohomology theory");
}

// Dimension of the corresponding harmonic space; agrees with cohomology_dim
// for every metric.
template <class K>
int harmonic_dim(const LieAlgebra<K>& alg, const HermitianMetric<K>& g, CohTheory th, int p, int q) {
    LapKind kind = th == CohTheory::Dolbeault ? LapKind::Dbar
                   : th == CohTheory::Del     ? LapKind::Del
                   : th == CohTheory::BottChern ? LapKind::BottChern
                                                : LapKind::Aeppli;
    OperatorMatrix<K> lap = laplacian(kind, alg, g, p, q);
    return lap.m.rows - rank(lap.m);
}

// ---------------------------------------------------------------------------
// Minimal-norm solvers.

template <class K>
struct SolveOutcome {
    bool ok = false;
    Form<K> x;            // minimal-norm solution when ok
    Form<K> obstruction;  // harmonic projection of the right-hand side otherwise
};

// Solves delbar x = y with x orthogonal to ker(delbar); y is solvable exactly
// when it is delbar-closed with vanishing harmonic part. A non-closed y is
// reported unsolvable even if its harmonic projection happens to vanish.
template <class K>
SolveOutcome<K> solve_dbar_minimal(const LieAlgebra<K>& alg, const HermitianMetric<K>& g,
                                   const Form<K>& y) {
    SolveOutcome<K> out;
    out.x = Form<K>(alg.n);
    out.obstruction = Form<K>(alg.n);
    if (y.is_zero()) {
        out.ok = true;
        return out;
    }
    auto deg = y.bidegree();
    if (!deg) throw DegreeMismatch("solve_dbar_minimal needs a homogeneous form");
    auto [p, q] = *deg;
    BidegreeBasis basis = make_basis(alg.n, p, q);
    OperatorMatrix<K> lap = laplacian(LapKind::Dbar, alg, g, p, q);
    GreenPair<K> gp = green(lap, g);
    Vec<K> yv = to_vec(basis, y);
    Form<K> hy = to_form(basis, gp.H * yv);
    if (!hy.is_zero() || !delbar(alg, y).is_zero()) {
        out.obstruction = hy;
        return out;
    }
    OperatorMatrix<K> dn = delbar_matrix(alg, p, q - 1);
    Vec<K> xv = adjoint(dn, g).m * (gp.G * yv);
    out.x = to_form(make_basis(alg.n, p, q - 1), xv);
    if (delbar(alg, out.x) != y) throw InvariantViolation("dbar solver residual is nonzero");
    out.ok = true;
    return out;
}

// Solves del delbar x = y via the Green operator of the 4th-order laplacian;
// the result is the unique minimal-norm solution.
template <class K>
SolveOutcome<K> solve_ddbar_minimal(const LieAlgebra<K>& alg, const HermitianMetric<K>& g,
                                    const Form<K>& y) {
    SolveOutcome<K> out;
    out.x = Form<K>(alg.n);
    out.obstruction = Form<K>(alg.n);
    if (y.is_zero()) {
        out.ok = true;
        return out;
    }
    auto deg = y.bidegree();
    if (!deg) throw DegreeMismatch("solve_ddbar_minimal needs a homogeneous form");
    auto [p, q] = *deg;
    BidegreeBasis basis = make_basis(alg.n, p, q);
    OperatorMatrix<K> lap = laplacian(LapKind::BottChern, alg, g, p, q);
    GreenPair<K> gp = green(lap, g);
    Vec<K> yv = to_vec(basis, y);
    Form<K> hy = to_form(basis, gp.H * yv);
    if (!hy.is_zero() || !del(alg, y).is_zero() || !delbar(alg, y).is_zero()) {
        out.obstruction = hy;
        return out;
    }
    OperatorMatrix<K> B = ddbar_matrix(alg, p - 1, q - 1);
    Vec<K> xv = adjoint(B, g).m * (gp.G * yv);
    out.x = to_form(make_basis(alg.n, p - 1, q - 1), xv);
    if (del(alg, delbar(alg, out.x)) != y)
        throw InvariantViolation("del-delbar solver residual is nonzero");
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// T^{1,0}-valued (0,q)-forms: bases, grams and the twisted laplacian.

struct TvfBasis {
    int n = 0, q = 0;
    std::vector<std::pair<int, FKey>> keys;  // (component, form key), component major
    std::map<std::pair<int, FKey>, int> index;
};

inline TvfBasis make_tvf_basis(int n, int q) {
    TvfBasis b;
    b.n = n;
    b.q = q;
    for (int k = 0; k < n; ++k)
        for (const FKey& key : bidegree_keys(n, 0, q)) {
            b.index[{k, key}] = static_cast<int>(b.keys.size());
            b.keys.emplace_back(k, key);
        }
    return b;
}

template <class K>
Vec<K> tvf_to_vec(const TvfBasis& b, const VectorForm<K>& v) {
    if (v.barred) throw DegreeMismatch("expected a T^{1,0}-valued form");
    Vec<K> out(b.keys.size(), K(0));
    for (const auto& [k, f] : v.comp)
        for (const auto& [key, coeff] : f.c) {
            auto it = b.index.find({k, key});
            if (it == b.index.end())
                throw DegreeMismatch("vector form does not live in the requested bidegree");
            out[it->second] = coeff;
        }
    return out;
}

template <class K>
VectorForm<K> vec_to_tvf(const TvfBasis& b, const Vec<K>& x) {
    if (x.size() != b.keys.size()) throw InvariantViolation("coordinate vector has wrong length");
    VectorForm<K> v(b.n, false);
    for (size_t i = 0; i < x.size(); ++i) {
        if (is_zero(x[i])) continue;
        v.add_component(b.keys[i].first, Form<K>::monomial(b.n, b.keys[i].second.P, b.keys[i].second.Q, x[i]));
    }
    return v;
}

template <class K>
Mat<K> delbar_t_matrix(const LieAlgebra<K>& alg, int q) {
    TvfBasis src = make_tvf_basis(alg.n, q), dst = make_tvf_basis(alg.n, q + 1);
    Mat<K> m(static_cast<int>(dst.keys.size()), static_cast<int>(src.keys.size()));
    for (size_t j = 0; j < src.keys.size(); ++j) {
        VectorForm<K> basis_vf(alg.n, false);
        basis_vf.add_component(src.keys[j].first,
                               Form<K>::monomial(alg.n, src.keys[j].second.P, src.keys[j].second.Q));
        Vec<K> img = tvf_to_vec(dst, delbar_vf(alg, basis_vf));
        for (size_t i = 0; i < img.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(j)) = img[i];
    }
    return m;
}

// <psi ⊗ e_k, chi ⊗ e_l> = <psi, chi> * <e_k, e_l> with the dual-frame gram
// conj(h^{-1}) on the (1,0) vectors.
template <class K>
Mat<K> gram_tvf(const HermitianMetric<K>& g, int q) {
    auto hinv = inverse(g.h);
    if (!hinv) throw InvariantViolation("metric matrix is singular");
    Mat<K> vg = conj_entries(*hinv);
    TvfBasis b = make_tvf_basis(g.n, q);
    const int d = static_cast<int>(b.keys.size());
    Mat<K> G(d, d);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
            G.at(a, c) = vg.at(b.keys[a].first, b.keys[c].first) *
                         conj_val(minor_det(g.h, b.keys[a].second.Q, b.keys[c].second.Q));
    return G;
}

template <class K>
Mat<K> laplacian_t(const LieAlgebra<K>& alg, const HermitianMetric<K>& g, int q) {
    Mat<K> up = delbar_t_matrix(alg, q), dn = delbar_t_matrix(alg, q - 1);
    Mat<K> gs = gram_tvf(g, q), gt = gram_tvf(g, q + 1), gd = gram_tvf(g, q - 1);
    Mat<K> up_adj = adjoint_matrix(up, gs, gt);
    Mat<K> dn_adj = adjoint_matrix(dn, gd, gs);
    return up_adj * up + dn * dn_adj;
}

// ---------------------------------------------------------------------------
// Per-(algebra, metric) operator cache, safe for concurrent use.

template <class K>
class OperatorCache {
  public:
    OperatorCache(LieAlgebra<K> alg, HermitianMetric<K> metric)
        : alg_(std::move(alg)), metric_(std::move(metric)) {}

    const LieAlgebra<K>& algebra() const { return alg_; }
    const HermitianMetric<K>& metric() const { return metric_; }

    const Mat<K>& del(int p, int q) {
        return get(Slot::Del, p, q, [&] { return del_matrix(alg_, p, q).m; });
    }
    const Mat<K>& delbar(int p, int q) {
        return get(Slot::Delbar, p, q, [&] { return delbar_matrix(alg_, p, q).m; });
    }
    const Mat<K>& gram(int p, int q) {
        return get(Slot::Gram, p, q, [&] { return gram_matrix(metric_, p, q); });
    }
    const Mat<K>& laplacian_m(LapKind kind, int p, int q) {
        Slot s = kind == LapKind::Dbar        ? Slot::LapDbar
                 : kind == LapKind::Del       ? Slot::LapDel
                 : kind == LapKind::BottChern ? Slot::LapBC
                                              : Slot::LapA;
        return get(s, p, q, [&] { return laplacian(kind, alg_, metric_, p, q).m; });
    }
    const GreenPair<K>& green_for(LapKind kind, int p, int q) {
        std::lock_guard<std::mutex> lock(green_mu_);
        auto key = std::make_tuple(static_cast<int>(kind), p, q);
        auto it = greens_.find(key);
        if (it == greens_.end()) {
            GreenPair<K> gp =
                green_pair(laplacian(kind, alg_, metric_, p, q).m, gram_matrix(metric_, p, q));
            it = greens_.emplace(key, std::move(gp)).first;
        }
        return it->second;
    }

  private:
    enum class Slot { Del, Delbar, Gram, LapDbar, LapDel, LapBC, LapA };

    template <class F>
    const Mat<K>& get(Slot s, int p, int q, F&& build) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(static_cast<int>(s), p, q);
        auto it = store_.find(key);
        if (it == store_.end()) it = store_.emplace(key, build()).first;
        return it->second;
    }

    LieAlgebra<K> alg_;
    HermitianMetric<K> metric_;
    std::mutex mu_, green_mu_;
    std::map<std::tuple<int, int, int>, Mat<K>> store_;
    std::map<std::tuple<int, int, int>, GreenPair<K>> greens_;
};

}  // namespace deforge
