#pragma once

// Positivity toolkit for invariant (p,p)-forms: hermitian representations,
// canonical forms with exact inertia, Pluecker codimension, transversality
// verdicts with margins and witnesses, the index lower bound, the two extremal
// constructions, and the persistence estimate along a deformation family.
//
// All decision procedures work over GQ so that verdicts are exact; floating
// point appears only as a guess generator inside canonical_form's fallback
// backend (the reported indices stay exact even there).  Margins are reported
// for the normalized objective
//     f(tau) = top(omega ^ sigma_q tau ^ conj(tau)) / (|tau|^2 * vol)
// which is linear in omega, so verdicts are invariant under positive scaling.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "deforge/deformation.hpp"
#include "deforge/rng.hpp"

namespace deforge {

// ---------------------------------------------------------------------------
// Normalization constants.

// sigma_d = 2^{-d} i^{d^2}; purely real for even d, purely imaginary for odd.
inline GQ positivity_sigma(int d) {
    if (d < 0) throw InvariantViolation("sigma of negative degree");
    mpq_class pw(mpz_class(1), mpz_class(1) << d);
    return (d & 1) ? GQ(mpq_class(0), pw) : GQ(pw, mpq_class(0));
}

inline long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long out = 1;
    for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
    return out;
}

// Codimension of the Pluecker-embedded Grassmannian rho(G(q,n)) inside
// P(Lambda^{q,0}): k = (N-1) - pq with N = C(n,q) and p = n-q.
inline long pluecker_codim(int n, int q) {
    if (q < 1 || q > n - 1) throw InvariantViolation("pluecker_codim needs 1 <= q <= n-1");
    return (binom(n, q) - 1) - static_cast<long>(n - q) * q;
}

namespace posdetail {

inline Mask full_mask(int n) { return (Mask(1) << n) - 1; }

inline void require_pp(const Form<GQ>& omega, int p) {
    for (const auto& [key, v] : omega.c) {
        (void)v;
        if (mask_size(key.P) != p || mask_size(key.Q) != p)
            throw DegreeMismatch("form is not of the requested bidegree (p,p)");
    }
}

inline void require_degree_range(int n, int p) {
    if (p < 1 || p > n - 1) throw InvariantViolation("positivity operations need 1 <= p <= n-1");
}

inline Mat<CD> to_float_mat(const Mat<GQ>& m) {
    Mat<CD> out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out.at(i, j) = CD(m.at(i, j).approx());
    return out;
}

inline std::string brief_form(const Form<GQ>& f, size_t max_terms = 6) {
    std::ostringstream os;
    size_t shown = 0;
    for (const auto& [key, v] : f.c) {
        if (shown++ >= max_terms) {
            os << " ...";
            break;
        }
        os << (shown > 1 ? " + " : "") << "(" << v.str() << ")*dz[";
        for (int b : mask_bits(key.P)) os << b + 1;
        os << "|";
        for (int b : mask_bits(key.Q)) os << b + 1;
        os << "]";
    }
    if (f.c.empty()) os << "0";
    return os.str();
}

}  // namespace posdetail

// ---------------------------------------------------------------------------
// Hermitian representation of a (p,p)-form.

// omega = sigma * sum Theta_{i jbar} beta_i ^ conj(beta_j), where beta_i are
// the columns of `basis_columns` expressed in the monomial basis of (p,0)
// covectors (identity for the canonical monomial representation).
struct PPFormRep {
    int n = 0, p = 0, q = 0, N = 0;
    std::vector<FKey> monomials;  // canonical (p,0) monomial keys
    Mat<GQ> basis_columns;        // declared basis, columns in monomial coordinates
    Mat<GQ> theta;
    GQ sigma;

    bool hermitian() const { return theta == theta.conj_transpose(); }
};

inline PPFormRep hermitian_rep(const Form<GQ>& omega, int p) {
    const int n = omega.n;
    posdetail::require_degree_range(n, p);
    posdetail::require_pp(omega, p);
    PPFormRep rep;
    rep.n = n;
    rep.p = p;
    rep.q = n - p;
    rep.monomials = bidegree_keys(n, p, 0);
    rep.N = static_cast<int>(rep.monomials.size());
    rep.basis_columns = Mat<GQ>::identity(rep.N);
    rep.sigma = positivity_sigma(p);
    rep.theta = Mat<GQ>(rep.N, rep.N);
    const GQ sigma_inv = rep.sigma.inverse();
    std::map<Mask, int> index;
    for (int i = 0; i < rep.N; ++i) index[rep.monomials[i].P] = i;
    for (const auto& [key, v] : omega.c) rep.theta.at(index.at(key.P), index.at(key.Q)) = sigma_inv * v;
    return rep;
}

// Same decomposition relative to a declared basis beta_i = sum_a B(a,i) dz^{P_a}.
inline PPFormRep hermitian_rep(const Form<GQ>& omega, int p, const Mat<GQ>& basis_columns) {
    PPFormRep rep = hermitian_rep(omega, p);
    if (basis_columns.rows != rep.N || basis_columns.cols != rep.N || rank(basis_columns) != rep.N)
        throw InvariantViolation("declared basis does not span the (p,0) covectors");
    Mat<GQ> binv = *inverse(basis_columns);
    rep.theta = binv * rep.theta * binv.conj_transpose();
    rep.basis_columns = basis_columns;
    return rep;
}

inline Form<GQ> reassemble(const PPFormRep& rep) {
    Mat<GQ> theta_mono = rep.basis_columns * rep.theta * rep.basis_columns.conj_transpose();
    Form<GQ> out(rep.n);
    for (int i = 0; i < rep.N; ++i)
        for (int j = 0; j < rep.N; ++j) {
            GQ v = rep.sigma * theta_mono.at(i, j);
            if (!v.is_zero()) out.add_term(rep.monomials[i].P, rep.monomials[j].P, v);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Top-degree ratio against the canonical positive volume sigma_n dz^[n]^dzb^[n].

inline GQ top_ratio(const Form<GQ>& f) {
    const Mask full = posdetail::full_mask(f.n);
    const GQ scale = positivity_sigma(f.n).inverse();
    GQ out(0);
    for (const auto& [key, v] : f.c) {
        if (key.P != full || key.Q != full) throw DegreeMismatch("top_ratio expects an (n,n)-form");
        out = scale * v;
    }
    return out;
}

// Ratio of the metric volume omega_g^n / n! to the canonical volume (2^n det h
// for a constant metric); strictly positive.
inline GQ metric_volume_ratio(const HermitianMetric<GQ>& g) {
    Form<GQ> w = fundamental_form(g);
    Form<GQ> top = wedge_power(w, g.n);
    mpz_class fact(1);
    for (int i = 2; i <= g.n; ++i) fact *= i;
    GQ ratio = top_ratio(top) * GQ(mpq_class(mpz_class(1), fact), mpq_class(0));
    if (!ratio.is_real() || ratio.re <= 0) throw InvariantViolation("metric volume is not positive");
    return ratio;
}

// ---------------------------------------------------------------------------
// Pairing matrices: the transversality objective as a quadratic form.

// M(i,j) = top_ratio(omega ^ sigma_q dz^{K_i} ^ dzb^{K_j}) over (q,0) keys, so
// that top_ratio(omega ^ sigma_q tau ^ conj(tau)) = inner_vec(v, v, M) for tau
// with coordinates v.  Hermitian whenever omega is real.
inline Mat<GQ> pairing_matrix(const Form<GQ>& omega, int p) {
    const int n = omega.n, q = n - p;
    posdetail::require_degree_range(n, p);
    posdetail::require_pp(omega, p);
    std::vector<FKey> keys = bidegree_keys(n, q, 0);
    const int D = static_cast<int>(keys.size());
    const GQ scale = positivity_sigma(q) * positivity_sigma(n).inverse();
    const Mask full = posdetail::full_mask(n);
    Mat<GQ> M(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            Form<GQ> w = wedge(omega, Form<GQ>::monomial(n, keys[i].P, keys[j].P));
            auto it = w.c.find(FKey{full, full});
            if (it != w.c.end()) M.at(i, j) = scale * it->second;
        }
    return M;
}

// Same objective over the full total-degree-q monomial space; needed when tau
// is transported by a Beltrami differential and acquires mixed bidegree.
inline Mat<GQ> total_pairing_matrix(const Form<GQ>& omega, int q) {
    const int n = omega.n;
    std::vector<FKey> keys = total_degree_keys(n, q);
    const int D = static_cast<int>(keys.size());
    const GQ scale = positivity_sigma(q) * positivity_sigma(n).inverse();
    const Mask full = posdetail::full_mask(n);
    Mat<GQ> M(D, D);
    for (int i = 0; i < D; ++i) {
        Form<GQ> mi = Form<GQ>::monomial(n, keys[i].P, keys[i].Q);
        for (int j = 0; j < D; ++j) {
            Form<GQ> pair = wedge(mi, conj(Form<GQ>::monomial(n, keys[j].P, keys[j].Q)));
            if (pair.is_zero()) continue;
            Form<GQ> w = wedge(omega, pair);
            auto it = w.c.find(FKey{full, full});
            if (it != w.c.end()) M.at(i, j) = scale * it->second;
        }
    }
    return M;
}

// ---------------------------------------------------------------------------
// Decomposable (q,0)-forms: sampling and the decomposability oracle.

// Interior product e_k _| f on the holomorphic slots (enough for (q,0)-forms).
inline Form<GQ> hook_z(int k, const Form<GQ>& f) {
    Form<GQ> out(f.n);
    const Mask bit = Mask(1) << k;
    for (const auto& [key, v] : f.c) {
        if (!(key.P & bit)) continue;
        int pos = 0;
        for (int b : mask_bits(key.P)) {
            if (b == k) break;
            ++pos;
        }
        out.add_term(key.P & ~bit, key.Q, (pos & 1) ? -v : v);
    }
    return out;
}

// Pluecker relations: a (q,0)-form tau is a single wedge of q covectors iff
// (xi _| tau) ^ tau = 0 for every coordinate (q-1)-multivector xi.  Contraction
// by single vectors is not enough: for q = 1 it would reject every form.
inline bool is_decomposable(const Form<GQ>& tau) {
    if (tau.is_zero()) return true;
    const int q = mask_size(tau.c.begin()->first.P);
    for (const FKey& key : bidegree_keys(tau.n, q - 1, 0)) {
        Form<GQ> hooked = tau;
        for (int b : mask_bits(key.P)) hooked = hook_z(b, hooked);
        if (!wedge(hooked, tau).is_zero()) return false;
    }
    return true;
}

struct SampledTau {
    Form<GQ> tau;               // nonzero decomposable (q,0)-form
    std::vector<Vec<GQ>> legs;  // its (1,0) factors when known (empty for user input)
};

namespace posdetail {

// Exact unit complex rationals used by the low-discrepancy sweep and the
// persistence grid (Pythagorean phases, |u| = 1 exactly).
inline const std::vector<GQ>& unit_phases() {
    static const std::vector<GQ> table = {
        GQ(1),
        GQ(mpq_class(3, 5), mpq_class(4, 5)),
        GQ(mpq_class(-4, 5), mpq_class(3, 5)),
        GQ(mpq_class(0), mpq_class(1)),
        GQ(mpq_class(5, 13), mpq_class(12, 13)),
        GQ(mpq_class(-12, 13), mpq_class(5, 13)),
        GQ(mpq_class(8, 17), mpq_class(15, 17)),
        GQ(mpq_class(-1), mpq_class(0)),
    };
    return table;
}

inline Form<GQ> leg_form(int n, const Vec<GQ>& leg) {
    Form<GQ> out(n);
    for (int k = 0; k < n; ++k)
        if (!leg[k].is_zero()) out.add_term(Mask(1) << k, 0, leg[k]);
    return out;
}

inline Form<GQ> wedge_legs(int n, const std::vector<Vec<GQ>>& legs) {
    Form<GQ> acc = Form<GQ>::monomial(n, 0, 0);
    for (const Vec<GQ>& leg : legs) {
        acc = wedge(acc, leg_form(n, leg));
        if (acc.is_zero()) break;
    }
    return acc;
}

}  // namespace posdetail

// Deterministic sample of nonzero decomposable (q,0)-forms: the coordinate
// q-planes, a low-discrepancy two-index rotation sweep, then seeded random
// wedges of q independent (1,0)-forms.  Legs are kept un-normalized; the
// objective is scale-invariant in tau.  User-supplied forms are validated and
// placed first.
inline std::vector<SampledTau> sample_decomposable(int n, int q, int count, std::uint64_t seed,
                                                   const std::vector<Form<GQ>>& user = {}) {
    if (q < 1 || q > n) throw InvariantViolation("sample_decomposable needs 1 <= q <= n");
    std::vector<SampledTau> out;
    for (const Form<GQ>& f : user) {
        if (f.n != n || f.is_zero()) throw InvariantViolation("user tau must be a nonzero form on the same space");
        for (const auto& [key, v] : f.c) {
            (void)v;
            if (mask_size(key.P) != q || key.Q != 0) throw DegreeMismatch("user tau is not of bidegree (q,0)");
        }
        if (!is_decomposable(f)) throw InvariantViolation("user tau is not decomposable");
        out.push_back({f, {}});
    }
    // Coordinate planes.
    for (const FKey& key : bidegree_keys(n, q, 0)) {
        if (static_cast<int>(out.size()) >= count + static_cast<int>(user.size())) return out;
        std::vector<Vec<GQ>> legs;
        for (int b : mask_bits(key.P)) {
            Vec<GQ> leg(n, GQ(0));
            leg[b] = GQ(1);
            legs.push_back(leg);
        }
        out.push_back({Form<GQ>::monomial(n, key.P, 0), std::move(legs)});
    }
    // Low-discrepancy rotations: mix pairs of coordinates with exact unit phases.
    const auto& phases = posdetail::unit_phases();
    std::uint64_t sweep = 0;
    for (int a = 0; a < n && static_cast<int>(out.size()) < count + static_cast<int>(user.size()); ++a)
        for (int b = 0; b < n; ++b) {
            if (b == a) continue;
            if (static_cast<int>(out.size()) >= count + static_cast<int>(user.size())) break;
            std::vector<Vec<GQ>> legs;
            Vec<GQ> first(n, GQ(0));
            first[a] = GQ(mpq_class(3, 5), mpq_class(0));
            first[b] = GQ(mpq_class(4, 5), mpq_class(0)) * phases[sweep++ % phases.size()];
            legs.push_back(first);
            for (int c = 0, taken = 1; c < n && taken < q; ++c) {
                if (c == a || c == b) continue;
                Vec<GQ> leg(n, GQ(0));
                leg[c] = phases[(sweep + taken) % phases.size()];
                legs.push_back(leg);
                ++taken;
            }
            if (static_cast<int>(legs.size()) < q) continue;
            Form<GQ> tau = posdetail::wedge_legs(n, legs);
            if (!tau.is_zero()) out.push_back({std::move(tau), std::move(legs)});
        }
    // Seeded random wedges.
    Rng rng(seed);
    while (static_cast<int>(out.size()) < count + static_cast<int>(user.size())) {
        std::vector<Vec<GQ>> legs;
        for (int j = 0; j < q; ++j) {
            Vec<GQ> leg(n, GQ(0));
            for (int k = 0; k < n; ++k) leg[k] = rng.gq(3, 2);
            legs.push_back(std::move(leg));
        }
        Form<GQ> tau = posdetail::wedge_legs(n, legs);
        if (tau.is_zero()) continue;  // dependent draw; redraw
        out.push_back({std::move(tau), std::move(legs)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact congruence diagonalization and inertia of hermitian matrices.

struct Congruence {
    Mat<GQ> X;   // invertible: X^H M X = diag(d)
    Vec<GQ> d;   // real diagonal entries
};

struct Inertia {
    int pos = 0, neg = 0, zero = 0;

    bool operator==(const Inertia&) const = default;
};

inline Congruence hermitian_congruence(const Mat<GQ>& m) {
    const int N = m.rows;
    if (m.cols != N) throw InvariantViolation("congruence of a non-square matrix");
    if (!(m == m.conj_transpose())) throw InvariantViolation("congruence needs a hermitian matrix");
    Mat<GQ> A = m;
    Mat<GQ> X = Mat<GQ>::identity(N);
    auto add_col = [&](int i, int j, const GQ& s) {
        // basis update x_i += s x_j, i.e. A <- E^H A E with E = 1 + s e_j e_i^T
        for (int k = 0; k < N; ++k) A.at(i, k) += conj_val(s) * A.at(j, k);
        for (int k = 0; k < N; ++k) A.at(k, i) += s * A.at(k, j);
        for (int k = 0; k < N; ++k) X.at(k, i) += s * X.at(k, j);
    };
    auto swap_cols = [&](int i, int j) {
        if (i == j) return;
        for (int k = 0; k < N; ++k) std::swap(A.at(i, k), A.at(j, k));
        for (int k = 0; k < N; ++k) std::swap(A.at(k, i), A.at(k, j));
        for (int k = 0; k < N; ++k) std::swap(X.at(k, i), X.at(k, j));
    };
    for (int r = 0; r < N; ++r) {
        int piv = -1;
        double best = 0.0;
        for (int i = r; i < N; ++i) {
            double mag = std::abs(A.at(i, i).approx());
            if (!A.at(i, i).is_zero() && (piv < 0 || mag > best)) {
                piv = i;
                best = mag;
            }
        }
        if (piv < 0) {
            // All trailing diagonal entries vanish; manufacture a pivot from the
            // largest off-diagonal entry, if any.
            int bi = -1, bj = -1;
            double bmag = 0.0;
            for (int i = r; i < N; ++i)
                for (int j = i + 1; j < N; ++j) {
                    double mag = std::abs(A.at(i, j).approx());
                    if (!A.at(i, j).is_zero() && mag > bmag) {
                        bi = i;
                        bj = j;
                        bmag = mag;
                    }
                }
            if (bi < 0) break;  // trailing block is zero: remaining d entries are 0
            add_col(bi, bj, conj_val(A.at(bi, bj)));
            piv = bi;
        }
        swap_cols(r, piv);
        for (int i = r + 1; i < N; ++i) {
            if (A.at(i, r).is_zero()) continue;
            add_col(i, r, -conj_val(A.at(i, r) * A.at(r, r).inverse()));
        }
    }
    Congruence out{std::move(X), Vec<GQ>(N, GQ(0))};
    for (int r = 0; r < N; ++r) {
        if (!A.at(r, r).is_real()) throw InvariantViolation("congruence pivot came out complex");
        out.d[r] = A.at(r, r);
    }
    return out;
}

inline Inertia inertia(const Mat<GQ>& m) {
    Congruence c = hermitian_congruence(m);
    Inertia out;
    for (const GQ& d : c.d) {
        if (d.re > 0)
            ++out.pos;
        else if (d.re < 0)
            ++out.neg;
        else
            ++out.zero;
    }
    return out;
}

inline bool is_positive_definite(const Mat<GQ>& m) {
    Inertia in = inertia(m);
    return in.neg == 0 && in.zero == 0;
}

// ---------------------------------------------------------------------------
// Transversality.

enum class Verdict { transverse, not_transverse, inconclusive };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::transverse: return "transverse";
        case Verdict::not_transverse: return "not-transverse";
        default: return "inconclusive";
    }
}

struct TransversalityVerdict {
    Verdict verdict = Verdict::inconclusive;
    GQ margin;           // minimum of the normalized objective over the samples
    Form<GQ> witness;    // tau attaining the minimum (objective <= 0 when not transverse)
    int samples = 0;
    bool exact = false;  // verdict decided by the eigenvalue route (p = 1 or p = n-1)
    std::string note;
    std::uint64_t seed = 0;
};

struct TransversalityParams {
    int samples = 600;
    bool refine = true;
    std::uint64_t seed = 1729;
    mpq_class rel_threshold = mpq_class(1, 1000000);  // inconclusive band, relative to scale
    std::vector<Form<GQ>> extra_taus;
};

namespace posdetail {

struct Objective {
    const Mat<GQ>* M;
    const Mat<GQ>* gram;
    GQ vol;

    GQ eval(const Vec<GQ>& v) const {
        GQ num = inner_vec(v, v, *M);
        GQ den = inner_vec(v, v, *gram) * vol;
        return num * den.inverse();
    }
};

// Local descent around the current minimizer: perturb the legs with shrinking
// exact rationals and keep strict improvements.  Best-effort polish; verdict
// soundness never depends on it.
inline void refine_minimum(int n, const Objective& obj, const BidegreeBasis& basis, Rng& rng,
                           SampledTau& best, GQ& best_val, int rounds = 3, int tries_per_round = 24) {
    if (best.legs.empty()) return;
    for (int round = 0; round < rounds; ++round) {
        mpq_class eps(1, 4L << (2 * round));
        for (int t = 0; t < tries_per_round; ++t) {
            std::vector<Vec<GQ>> legs = best.legs;
            for (Vec<GQ>& leg : legs)
                for (GQ& c : leg) c += GQ(eps, mpq_class(0)) * rng.gq(2, 3);
            Form<GQ> tau = wedge_legs(n, legs);
            if (tau.is_zero()) continue;
            GQ val = obj.eval(to_vec(basis, tau));
            if (val.re < best_val.re) {
                best_val = val;
                best = {std::move(tau), std::move(legs)};
            }
        }
    }
}

inline GQ matrix_scale(const Mat<GQ>& m) {
    GQ out(0);
    for (const GQ& v : m.a) {
        mpq_class s = max_norm(v);
        if (s > out.re) out = GQ(s, mpq_class(0));
    }
    return out;
}

}  // namespace posdetail

inline TransversalityVerdict transversality(const Form<GQ>& omega, const HermitianMetric<GQ>& g,
                                            int p, const TransversalityParams& params = {}) {
    const int n = omega.n, q = n - p;
    posdetail::require_degree_range(n, p);
    posdetail::require_pp(omega, p);
    if (!is_real(omega)) throw InvariantViolation("transversality is defined for real forms");

    Mat<GQ> M = pairing_matrix(omega, p);
    Mat<GQ> gram = gram_matrix(g, q, 0);
    BidegreeBasis basis = make_basis(n, q, 0);
    posdetail::Objective obj{&M, &gram, metric_volume_ratio(g)};

    TransversalityVerdict out;
    out.seed = params.seed;

    // Sampled sweep (also the cross-check for the exact route).
    std::vector<SampledTau> taus = sample_decomposable(n, q, params.samples, params.seed, params.extra_taus);
    out.samples = static_cast<int>(taus.size());
    SampledTau best;
    GQ best_val;
    bool have = false;
    for (SampledTau& s : taus) {
        GQ val = obj.eval(to_vec(basis, s.tau));
        if (!have || val.re < best_val.re) {
            best_val = val;
            best = std::move(s);
            have = true;
        }
    }
    if (params.refine && have) {
        Rng rng(params.seed ^ 0x5eedULL);
        posdetail::refine_minimum(n, obj, basis, rng, best, best_val);
    }
    out.margin = best_val;
    out.witness = best.tau;

    if (p == 1 || p == n - 1) {
        // Every (q,0)-form is decomposable here, so transversality is exactly
        // positive-definiteness of the pairing matrix.
        Inertia in = inertia(M);
        out.exact = true;
        if (in.neg == 0 && in.zero == 0) {
            if (have && !(best_val.re > 0))
                throw InvariantViolation("sampler contradicts the exact transversality verdict");
            out.verdict = Verdict::transverse;
            out.note = "exact: pairing matrix positive definite";
        } else {
            Congruence c = hermitian_congruence(M);
            int j = 0;
            while (c.d[j].re > 0) ++j;
            Vec<GQ> v = c.X.column(j);
            Form<GQ> tau(n);
            for (size_t a = 0; a < basis.keys.size(); ++a)
                if (!v[a].is_zero()) tau.add_term(basis.keys[a].P, basis.keys[a].Q, v[a]);
            GQ val = obj.eval(v);
            if (val.re <= best_val.re || !have) {
                out.margin = val;
                out.witness = tau;
            }
            out.verdict = Verdict::not_transverse;
            out.note = "exact: pairing matrix has a non-positive direction";
        }
        return out;
    }

    // Interior p: semi-decidable by sampling with an explicit inconclusive band.
    GQ threshold = GQ(params.rel_threshold, mpq_class(0)) * posdetail::matrix_scale(M);
    if (!have) {
        out.verdict = Verdict::inconclusive;
        out.note = "no samples";
    } else if (!(best_val.re > 0)) {
        out.verdict = Verdict::not_transverse;
        out.note = "sampled witness with non-positive objective";
    } else if (best_val.re <= threshold.re) {
        out.verdict = Verdict::inconclusive;
        out.note = "sampled minimum inside the tolerance band";
    } else {
        out.verdict = Verdict::transverse;
        out.note = "sampled: minimum clears the tolerance band";
    }
    return out;
}

inline TransversalityVerdict transversality(const Form<GQ>& omega, int p,
                                            const TransversalityParams& params = {}) {
    return transversality(omega, make_metric(Mat<GQ>::identity(omega.n)), p, params);
}

// ---------------------------------------------------------------------------
// Canonical form of a real (p,p)-form relative to a metric.

// omega = sigma_p sum_j lambda_j eta_j ^ conj(eta_j) with eta_j pairwise
// orthogonal.  lambda is reported in the normalization |eta_j|^2 = 2^p, which
// coincides with unit norm in this engine's gram convention; the stored eta
// columns are left un-normalized (rational), with |eta_j|^2 recorded, so the
// exact backend reassembles omega exactly: Theta = sum_j (lambda_j / norm2_j)
// eta_j eta_j^H.
struct CanonicalForm {
    std::vector<GQ> lambda;     // descending
    std::vector<Vec<GQ>> eta;   // metric-orthogonal columns in the monomial basis
    std::vector<GQ> eta_norm2;  // |eta_j|^2 in the metric
    Inertia index;              // exact, backend-independent
    bool exact = true;
    std::string note;

    int positive_index() const { return index.pos; }
    int negative_index() const { return index.neg; }
};

namespace posdetail {

// Continued-fraction convergents of x with denominators up to max_den,
// smallest denominator first.
inline std::vector<mpq_class> convergents(double x, long max_den = 1000000) {
    std::vector<mpq_class> out;
    mpz_class p0(1), q0(0), p1(0), q1(1);  // p0/q0 previous, p1/q1 before that
    double rem = x;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(rem);
        if (fl > 9e18 || fl < -9e18) break;
        mpz_class a(static_cast<long>(fl));
        mpz_class p = a * p0 + p1, q = a * q0 + q1;
        if (q > max_den) break;
        out.emplace_back(p, q == 0 ? mpz_class(1) : q);
        out.back().canonicalize();
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
        double frac = rem - fl;
        if (frac < 1e-15) break;
        rem = 1.0 / frac;
    }
    return out;
}

}  // namespace posdetail

inline CanonicalForm canonical_form(const Form<GQ>& omega, const HermitianMetric<GQ>& g, int p) {
    const int n = omega.n;
    posdetail::require_degree_range(n, p);
    posdetail::require_pp(omega, p);
    if (!is_real(omega)) throw InvariantViolation("canonical form requires a real form");

    PPFormRep rep = hermitian_rep(omega, p);
    const int N = rep.N;
    Mat<GQ> G = gram_matrix(g, p, 0);
    Mat<GQ> A = rep.theta * G;  // eigenvectors are the eta coordinate columns

    CanonicalForm out;
    out.index = inertia(rep.theta);  // Sylvester: metric-independent index

    // Float spectrum of the congruent hermitian matrix G^{1/2} Theta G^{1/2}.
    Mat<CD> Gf = posdetail::to_float_mat(G);
    HermEigen ge = jacobi_hermitian(Gf);
    Mat<CD> ghalf(N, N), ghalf_inv(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            CD acc(0.0), acc_inv(0.0);
            for (int k = 0; k < N; ++k) {
                double root = std::sqrt(std::max(ge.values[k], 0.0));
                CD outer = ge.vectors.at(i, k) * CD(std::conj(ge.vectors.at(j, k).v));
                acc += CD(root) * outer;
                acc_inv += CD(root > 0 ? 1.0 / root : 0.0) * outer;
            }
            ghalf.at(i, j) = acc;
            ghalf_inv.at(i, j) = acc_inv;
        }
    HermEigen ce = jacobi_hermitian(ghalf * posdetail::to_float_mat(rep.theta) * ghalf);

    // Cluster the float eigenvalues and try to certify rational values exactly.
    std::vector<double> vals = ce.values;
    std::sort(vals.begin(), vals.end());
    double scale = 1.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    std::vector<std::pair<double, int>> clusters;  // (center, count)
    for (double v : vals) {
        if (!clusters.empty() && std::abs(v - clusters.back().first) <= 1e-7 * scale) {
            auto& [c, m] = clusters.back();
            c = (c * m + v) / (m + 1);
            ++m;
        } else {
            clusters.push_back({v, 1});
        }
    }
    std::vector<std::pair<GQ, Mat<GQ>>> spaces;  // (eigenvalue, kernel columns)
    int total_dim = 0;
    for (const auto& [center, mult] : clusters) {
        (void)mult;
        // Only accept candidates close to this cluster: an early convergent of
        // one center can coincide with a genuine eigenvalue of another cluster
        // (nonzero kernel), which would mis-assign the eigenspace.
        const double accept_tol = 1e-9 * scale;
        std::vector<mpq_class> cands;
        if (std::abs(center) <= accept_tol) cands.push_back(mpq_class(0));
        for (const mpq_class& c : posdetail::convergents(center)) {
            if (std::abs(c.get_d() - center) <= accept_tol) cands.push_back(c);
        }
        for (const mpq_class& cand : cands) {
            Mat<GQ> shifted = A;
            for (int i = 0; i < N; ++i) shifted.at(i, i) -= GQ(cand, mpq_class(0));
            Mat<GQ> ker = kernel_basis(shifted);
            if (ker.cols > 0) {
                bool seen = false;
                for (const auto& [v, m] : spaces) {
                    (void)m;
                    if (v == GQ(cand, mpq_class(0))) seen = true;
                }
                if (!seen) {
                    spaces.push_back({GQ(cand, mpq_class(0)), ker});
                    total_dim += ker.cols;
                }
                break;
            }
        }
    }

    if (total_dim == N) {
        // Exact backend: rational spectrum certified.
        std::vector<std::tuple<GQ, Vec<GQ>, GQ>> triples;
        for (auto& [val, ker] : spaces) {
            std::vector<Vec<GQ>> ortho;
            for (int j = 0; j < ker.cols; ++j) {
                Vec<GQ> u = ker.column(j);
                for (const Vec<GQ>& prev : ortho) {
                    GQ c = inner_vec(u, prev, G) * inner_vec(prev, prev, G).inverse();
                    for (int i = 0; i < N; ++i) u[i] -= c * prev[i];
                }
                ortho.push_back(u);
                triples.emplace_back(val, u, inner_vec(u, u, G));
            }
        }
        std::sort(triples.begin(), triples.end(),
                  [](const auto& x, const auto& y) { return std::get<0>(y).re < std::get<0>(x).re; });
        Inertia check;
        for (auto& [val, u, d] : triples) {
            out.lambda.push_back(val);
            out.eta.push_back(std::move(u));
            out.eta_norm2.push_back(d);
            if (val.re > 0)
                ++check.pos;
            else if (val.re < 0)
                ++check.neg;
            else
                ++check.zero;
        }
        if (check.pos != out.index.pos || check.neg != out.index.neg)
            throw InvariantViolation("canonical spectrum disagrees with the inertia");
        out.exact = true;
        out.note = "exact rational spectrum";
        return out;
    }

    // Float fallback: dyadic approximations of the spectral data; the index
    // stays exact via the congruence above.
    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < N; ++j) order.push_back({ce.values[j], j});
    std::sort(order.begin(), order.end(), [](auto& x, auto& y) { return y.first < x.first; });
    for (const auto& [val, j] : order) {
        out.lambda.push_back(GQ(mpq_class(val), mpq_class(0)));
        Vec<GQ> u(N, GQ(0));
        for (int i = 0; i < N; ++i) {
            CD x(0.0);
            for (int k = 0; k < N; ++k) x += ghalf_inv.at(i, k) * ce.vectors.at(k, j);
            u[i] = GQ(mpq_class(x.v.real()), mpq_class(x.v.imag()));
        }
        out.eta_norm2.push_back(inner_vec(u, u, G));
        out.eta.push_back(std::move(u));
    }
    out.exact = false;
    out.note = "irrational spectrum: float eigenvalue backend (indices remain exact)";
    return out;
}

// Rebuild the form from canonical data; exact when the backend was exact.
inline Form<GQ> reassemble(const CanonicalForm& cf, int n, int p) {
    PPFormRep rep;
    rep.n = n;
    rep.p = p;
    rep.q = n - p;
    rep.monomials = bidegree_keys(n, p, 0);
    rep.N = static_cast<int>(rep.monomials.size());
    rep.basis_columns = Mat<GQ>::identity(rep.N);
    rep.sigma = positivity_sigma(p);
    rep.theta = Mat<GQ>(rep.N, rep.N);
    for (size_t j = 0; j < cf.lambda.size(); ++j) {
        GQ w = cf.lambda[j] * cf.eta_norm2[j].inverse();
        if (w.is_zero()) continue;
        for (int a = 0; a < rep.N; ++a)
            for (int b = 0; b < rep.N; ++b) rep.theta.at(a, b) += w * cf.eta[j][a] * conj_val(cf.eta[j][b]);
    }
    return reassemble(rep);
}

// ---------------------------------------------------------------------------
// Positive index lower bound: transverse => index >= N - k.

struct IndexBoundReport {
    TransversalityVerdict verdict;
    int positive_index = 0;
    long lower_bound = 0;  // N - k
    bool asserted = false; // bound claimed only for transverse forms
    bool holds = false;
};

inline IndexBoundReport positive_index_bound_check(const Form<GQ>& omega, const HermitianMetric<GQ>& g,
                                                   int p, const TransversalityParams& params = {}) {
    const int n = omega.n, q = n - p;
    IndexBoundReport rep;
    rep.verdict = transversality(omega, g, p, params);
    rep.positive_index = inertia(hermitian_rep(omega, p).theta).pos;
    rep.lower_bound = binom(n, q) - pluecker_codim(n, q);
    rep.asserted = rep.verdict.verdict == Verdict::transverse;
    rep.holds = rep.positive_index >= rep.lower_bound;
    return rep;
}

// ---------------------------------------------------------------------------
// Extremal constructions.

enum class ExtremalKind { exact_index, negative_index };

struct ExtremalConstruction {
    Form<GQ> omega;
    std::vector<Vec<GQ>> etas;  // orthonormal basis columns actually used
    std::vector<GQ> lambdas;    // N-k positive weights (+ one negative for negative_index)
    long target_index = 0;      // N - k
    GQ a_estimate;              // sampled minimum of the ratio objective (negative_index)
    int retries = 0;
    std::uint64_t seed = 0;
};

struct ExtremalParams {
    int samples = 600;
    int max_retries = 8;
    bool refine = true;
};

inline ExtremalConstruction construct_extremal(int n, int p, ExtremalKind kind, std::uint64_t seed,
                                               const ExtremalParams& params = {}) {
    posdetail::require_degree_range(n, p);
    const int q = n - p;
    const long N = binom(n, q);
    const long k = pluecker_codim(n, q);
    if (kind == ExtremalKind::negative_index && k == 0)
        throw InvariantViolation("negative-index construction needs positive Pluecker codimension");

    BidegreeBasis qbasis = make_basis(n, q, 0);
    BidegreeBasis pbasis = make_basis(n, p, 0);
    const Mask full = posdetail::full_mask(n);

    Form<GQ> witness_record;
    for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
        Rng rng(seed + 7919ULL * static_cast<std::uint64_t>(attempt));
        // Exactly unitary perturbation of the monomial basis via a Cayley
        // transform of a random skew-hermitian matrix.
        Mat<GQ> B(static_cast<int>(N), static_cast<int>(N));
        for (GQ& v : B.a) v = rng.gq(2, 3);
        Mat<GQ> S(static_cast<int>(N), static_cast<int>(N));
        const GQ eighth(mpq_class(1, 8), mpq_class(0));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) S.at(i, j) = eighth * (B.at(i, j) - conj_val(B.at(j, i)));
        // 1 + S is invertible for skew-hermitian S, so the optional is present.
        Mat<GQ> Q = (Mat<GQ>::identity(static_cast<int>(N)) - S) *
                    *inverse(Mat<GQ>::identity(static_cast<int>(N)) + S);

        // Wedge pairing of each eta_i against the sampled decomposable forms:
        // eta_i ^ tau = c_i(tau) dz^[n].  The plane eta_1..eta_{N-k} must miss
        // every sampled point of the Grassmannian.
        std::vector<SampledTau> taus =
            sample_decomposable(n, q, params.samples, seed ^ 0x9e3779b97f4a7c15ULL);
        Mat<GQ> pair(static_cast<int>(N), static_cast<int>(N));  // pair(a, K): dz^{P_a} ^ dz^{K}
        for (int a = 0; a < N; ++a)
            for (int K = 0; K < N; ++K) {
                Form<GQ> w = wedge(Form<GQ>::monomial(n, pbasis.keys[a].P, 0),
                                   Form<GQ>::monomial(n, qbasis.keys[K].P, 0));
                auto it = w.c.find(FKey{full, 0});
                if (it != w.c.end()) pair.at(a, K) = it->second;
            }
        Mat<GQ> eta_pair = Q.transpose() * pair;  // row i: tau-coefficients of eta_i ^ .
        bool clean = true;
        for (const SampledTau& s : taus) {
            Vec<GQ> v = to_vec(qbasis, s.tau);
            bool all_zero = true;
            for (int i = 0; i < N - k && all_zero; ++i) {
                GQ c(0);
                for (int K = 0; K < N; ++K) c += eta_pair.at(i, K) * v[K];
                if (!c.is_zero()) all_zero = false;
            }
            if (all_zero) {
                witness_record = s.tau;
                clean = false;
                break;
            }
        }
        if (!clean) continue;

        ExtremalConstruction out;
        out.seed = seed;
        out.retries = attempt;
        out.target_index = N - k;
        const int keep = static_cast<int>(N - k) + (kind == ExtremalKind::negative_index ? 1 : 0);
        for (int i = 0; i < keep; ++i) out.etas.push_back(Q.column(i));
        for (int i = 0; i < N - k; ++i)
            out.lambdas.push_back(GQ(1 + mpq_class(static_cast<long>(rng.below(8)) + 1, 16), mpq_class(0)));

        Mat<GQ> theta(static_cast<int>(N), static_cast<int>(N));
        auto add_dyad = [&](const Vec<GQ>& u, const GQ& w) {
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) theta.at(a, b) += w * u[a] * conj_val(u[b]);
        };
        for (int i = 0; i < N - k; ++i) add_dyad(out.etas[i], out.lambdas[i]);

        PPFormRep rep;
        rep.n = n;
        rep.p = p;
        rep.q = q;
        rep.monomials = pbasis.keys;
        rep.N = static_cast<int>(N);
        rep.basis_columns = Mat<GQ>::identity(static_cast<int>(N));
        rep.sigma = positivity_sigma(p);
        rep.theta = theta;

        if (kind == ExtremalKind::exact_index) {
            out.omega = reassemble(rep);
            return out;
        }

        // Negative index: lambda_{N-k+1} = -a/2, with a the sampled minimum of
        //   f([tau]) = (sum_{i<=N-k} lambda_i |c_i|^2) / |c_{N-k+1}|^2
        // over the Grassmannian samples (f -> +infinity on the denominator's
        // zero locus, so those samples impose no constraint).
        Form<GQ> omega_plus = reassemble(rep);
        Mat<GQ> theta_den(static_cast<int>(N), static_cast<int>(N));
        {
            const Vec<GQ>& u = out.etas[static_cast<size_t>(N - k)];
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) theta_den.at(a, b) = u[a] * conj_val(u[b]);
        }
        PPFormRep rep_den = rep;
        rep_den.theta = theta_den;
        Mat<GQ> M_num = pairing_matrix(omega_plus, p);
        Mat<GQ> M_den = pairing_matrix(reassemble(rep_den), p);

        bool have = false;
        GQ best_ratio;
        SampledTau best;
        auto ratio_at = [&](const Vec<GQ>& v) -> std::optional<GQ> {
            GQ den = inner_vec(v, v, M_den);
            if (den.is_zero()) return std::nullopt;
            return inner_vec(v, v, M_num) * den.inverse();
        };
        for (SampledTau& s : taus) {
            auto r = ratio_at(to_vec(qbasis, s.tau));
            if (!r) continue;
            if (!have || r->re < best_ratio.re) {
                best_ratio = *r;
                best = std::move(s);
                have = true;
            }
        }
        if (!have || !(best_ratio.re > 0)) continue;  // degenerate draw; retry
        if (params.refine && !best.legs.empty()) {
            Rng rrng(seed ^ 0xfeedULL);
            for (int round = 0; round < 3; ++round) {
                mpq_class eps(1, 4L << (2 * round));
                for (int t = 0; t < 24; ++t) {
                    std::vector<Vec<GQ>> legs = best.legs;
                    for (Vec<GQ>& leg : legs)
                        for (GQ& c : leg) c += GQ(eps, mpq_class(0)) * rrng.gq(2, 3);
                    Form<GQ> tau = posdetail::wedge_legs(n, legs);
                    if (tau.is_zero()) continue;
                    auto r = ratio_at(to_vec(qbasis, tau));
                    if (r && r->re < best_ratio.re) {
                        best_ratio = *r;
                        best = {std::move(tau), std::move(legs)};
                    }
                }
            }
        }
        out.a_estimate = best_ratio;
        // Round a down to a dyadic rational before halving: still conservative,
        // and keeps the output's coefficients small after the descent rounds.
        mpq_class scaled = best_ratio.re * 4096;
        mpq_class floored(scaled.get_num() / scaled.get_den(), 4096);
        floored.canonicalize();
        if (floored <= 0) floored = best_ratio.re;
        GQ lam_neg(mpq_class(-floored / 2), mpq_class(0));
        out.lambdas.push_back(lam_neg);
        add_dyad(out.etas[static_cast<size_t>(N - k)], lam_neg);
        rep.theta = theta;
        out.omega = reassemble(rep);
        return out;
    }
    throw ConstructionFailed("basis perturbation search exhausted its retries; last intersection witness: " +
                             posdetail::brief_form(witness_record));
}

// ---------------------------------------------------------------------------
// Persistence of transversality along a deformation family.

struct PersistenceParams {
    int tau_samples = 160;
    int radius_levels = 8;            // radii max_radius * 2^{-(levels-1)} .. max_radius
    mpq_class max_radius = 1;
    int directions = 6;               // unit phases per radius (per parameter)
    std::uint64_t seed = 1729;
};

struct PersistenceEstimate {
    mpq_class delta;                  // largest grid radius with all objectives positive
    GQ min_objective;                 // minimum over the accepted region
    int grid_points = 0;
    int samples = 0;
    bool full_radius = false;
    std::optional<std::pair<Vec<GQ>, Form<GQ>>> failure;  // (t, tau) at first failure
    std::uint64_t seed = 0;
};

// Numeric illustration of the local stability argument: evaluate
//   f(t, tau) = top(Omega_t ^ sigma_q e(tau) ^ conj(e(tau))) / (|tau|^2 vol)
// with e(tau) the transported form under phi(t), over a grid of exact rational
// parameter values, and report the largest grid radius on which every sampled
// objective stays positive.
inline PersistenceEstimate persistence(const BiSeries<Form<GQ>>& family,
                                       const BiSeries<VectorForm<GQ>>& phi,
                                       const HermitianMetric<GQ>& g, int p,
                                       const PersistenceParams& params = {}) {
    const int n = family.zero.n;
    const int q = n - p;
    posdetail::require_degree_range(n, p);
    if (family.m != phi.m) throw InvariantViolation("family and phi have different parameter counts");

    std::vector<SampledTau> taus = sample_decomposable(n, q, params.tau_samples, params.seed);
    Mat<GQ> gram = gram_matrix(g, q, 0);
    BidegreeBasis qbasis = make_basis(n, q, 0);
    GQ vol = metric_volume_ratio(g);

    std::vector<FKey> tkeys = total_degree_keys(n, q);
    std::map<FKey, int> tindex;
    for (size_t j = 0; j < tkeys.size(); ++j) tindex[tkeys[j]] = static_cast<int>(j);
    auto total_vec = [&](const Form<GQ>& f) {
        Vec<GQ> v(tkeys.size(), GQ(0));
        for (const auto& [key, c] : f.c) v[static_cast<size_t>(tindex.at(key))] = c;
        return v;
    };

    PersistenceEstimate out;
    out.seed = params.seed;
    out.samples = static_cast<int>(taus.size());

    // Minimum of the objective at a fixed parameter value, with its minimizer.
    auto sweep_at = [&](const Vec<GQ>& t) -> std::pair<GQ, Form<GQ>> {
        Form<GQ> omega_t = eval_at(family, t);
        Mat<GQ> M = total_pairing_matrix(omega_t, q);
        VectorForm<GQ> phi_t = eval_at(phi, t);
        GQ worst;
        Form<GQ> at(n);
        bool have = false;
        for (const SampledTau& s : taus) {
            Form<GQ> moved = extend(phi_t, s.tau);
            GQ num = inner_vec(total_vec(moved), total_vec(moved), M);
            GQ den = inner_vec(to_vec(qbasis, s.tau), to_vec(qbasis, s.tau), gram) * vol;
            GQ val = num * den.inverse();
            if (!have || val.re < worst.re) {
                worst = val;
                at = s.tau;
                have = true;
            }
        }
        return {worst, at};
    };

    // Degree-0 precondition.
    {
        auto [w0, tau0] = sweep_at(Vec<GQ>(family.m, GQ(0)));
        (void)tau0;
        if (!(w0.re > 0)) throw InvariantViolation("family is not transverse at t = 0");
        out.min_objective = w0;
    }

    const auto& phases = posdetail::unit_phases();
    out.delta = 0;
    for (int level = 0; level < params.radius_levels; ++level) {
        mpq_class r = params.max_radius;
        for (int s = level; s + 1 < params.radius_levels; ++s) r /= 2;
        bool level_ok = true;
        GQ level_min = out.min_objective;
        for (int d = 0; d < params.directions && level_ok; ++d) {
            Vec<GQ> t(family.m, GQ(0));
            for (int c = 0; c < family.m; ++c)
                t[c] = GQ(r, mpq_class(0)) * phases[(d + c) % phases.size()];
            ++out.grid_points;
            auto [worst, tau_min] = sweep_at(t);
            if (!(worst.re > 0)) {
                level_ok = false;
                if (!out.failure) out.failure = {t, tau_min};
            } else if (worst.re < level_min.re) {
                level_min = worst;
            }
        }
        if (!level_ok) break;
        out.delta = r;
        out.min_objective = level_min;
    }
    out.full_radius = out.delta == params.max_radius;
    return out;
}

// ---------------------------------------------------------------------------
// Strong positivity certificates (reassembly check only; membership is not
// decided).

struct StrongCertificate {
    std::vector<GQ> gammas;                  // convex weights, real and >= 0
    std::vector<std::vector<Vec<GQ>>> legs;  // per term: p covectors alpha_{s,1..p}
};

inline Form<GQ> assemble_strong(const StrongCertificate& cert, int n, int p) {
    if (cert.gammas.size() != cert.legs.size())
        throw InvariantViolation("certificate weight/term count mismatch");
    Form<GQ> out(n);
    const GQ eye(mpq_class(0), mpq_class(1));
    for (size_t s = 0; s < cert.gammas.size(); ++s) {
        const GQ& gamma = cert.gammas[s];
        if (!gamma.is_real() || gamma.re < 0)
            throw InvariantViolation("certificate weights must be real and non-negative");
        if (static_cast<int>(cert.legs[s].size()) != p)
            throw InvariantViolation("certificate term does not have p factors");
        Form<GQ> term = Form<GQ>::monomial(n, 0, 0, gamma);
        for (const Vec<GQ>& leg : cert.legs[s]) {
            Form<GQ> a = posdetail::leg_form(n, leg);
            term = wedge(term, eye * wedge(a, conj(a)));
            if (term.is_zero()) break;
        }
        out += term;
    }
    return out;
}

inline bool check_strong_certificate(const Form<GQ>& claimed, const StrongCertificate& cert, int p) {
    return assemble_strong(cert, claimed.n, p) == claimed;
}

}  // namespace deforge
