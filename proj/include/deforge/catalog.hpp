#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deforge/calculus.hpp"

namespace deforge {

// ---------------------------------------------------------------------------
// Built-in algebras.  Coefficients are defined exactly; the float variants are
// derived by rounding.  Structure equations below use w1..wn for dz^1..dz^n
// and w~j for dzbar^j; only d(dz^i) is stored, conjugates are derived.

namespace builtin_detail {

inline Form<GQ> mono(int n, std::initializer_list<int> zs, std::initializer_list<int> zbs, GQ c = GQ(1)) {
    Mask P = 0, Q = 0;
    for (int i : zs) P |= Mask(1) << (i - 1);
    for (int j : zbs) Q |= Mask(1) << (j - 1);
    return Form<GQ>::monomial(n, P, Q, std::move(c));
}

}  // namespace builtin_detail

// torus_n: the abelian algebra, d = 0.
inline LieAlgebra<GQ> builtin_torus(int n) {
    return make_algebra<GQ>("torus_" + std::to_string(n), n, std::vector<Form<GQ>>(n, Form<GQ>(n)));
}

// iwasawa: n = 3 complex-parallelizable; d w3 = w1^w2.
inline LieAlgebra<GQ> builtin_iwasawa() {
    using builtin_detail::mono;
    int n = 3;
    std::vector<Form<GQ>> d(n, Form<GQ>(n));
    d[2] = mono(n, {1, 2}, {});
    return make_algebra<GQ>("iwasawa", n, std::move(d));
}

// i_lambda(lambda): n = 3 family; d w3 = lambda*w1^w2 + w1^w~1 - w2^w~2.
// lambda = 0 is the abelian member.
inline LieAlgebra<GQ> builtin_i_lambda(const mpq_class& lambda) {
    using builtin_detail::mono;
    int n = 3;
    std::vector<Form<GQ>> d(n, Form<GQ>(n));
    d[2] = mono(n, {1}, {1}) - mono(n, {2}, {2});
    if (lambda != 0) d[2] += mono(n, {1, 2}, {}, GQ(lambda));
    std::string name = lambda == 0 ? "abelian_I0" : "i_lambda(" + GQ(lambda).str() + ")";
    return make_algebra<GQ>(std::move(name), n, std::move(d));
}

inline LieAlgebra<GQ> builtin_abelian_I0() { return builtin_i_lambda(0); }

// kodaira: n = 2; d w2 = w1^w~1.  Abelian complex structure with nonzero d,
// mainly useful as a small non-parallelizable instance.
inline LieAlgebra<GQ> builtin_kodaira() {
    using builtin_detail::mono;
    int n = 2;
    std::vector<Form<GQ>> d(n, Form<GQ>(n));
    d[1] = mono(n, {1}, {1});
    return make_algebra<GQ>("kodaira", n, std::move(d));
}

// kodaira_x_torus: n = 4 product of the above with a 2-torus factor.
inline LieAlgebra<GQ> builtin_kodaira_x_torus() {
    using builtin_detail::mono;
    int n = 4;
    std::vector<Form<GQ>> d(n, Form<GQ>(n));
    d[1] = mono(n, {1}, {1});
    return make_algebra<GQ>("kodaira_x_torus", n, std::move(d));
}

// category_iii: n = 3 non-nilpotent representative;
// d w2 = w1^w3 + w1^w~3, d w3 = i*(w1^w~2 - w2^w~1).
inline LieAlgebra<GQ> builtin_category_iii() {
    using builtin_detail::mono;
    int n = 3;
    std::vector<Form<GQ>> d(n, Form<GQ>(n));
    d[1] = mono(n, {1, 3}, {}) + mono(n, {1}, {3});
    d[2] = mono(n, {1}, {2}, GQ::i()) - mono(n, {2}, {1}, GQ::i());
    return make_algebra<GQ>("category_iii", n, std::move(d));
}

// Names accepted by builtin lookup; i_lambda is parameterized by a rational.
inline std::vector<std::string> builtin_names() {
    return {"torus_1", "torus_2",        "torus_3",      "torus_4",  "iwasawa",
            "abelian_I0", "kodaira", "kodaira_x_torus", "category_iii", "i_lambda(<rational>)"};
}

inline std::optional<LieAlgebra<GQ>> try_builtin_algebra(const std::string& name) {
    if (name.rfind("torus_", 0) == 0) {
        std::string suffix = name.substr(6);
        if (!suffix.empty() && suffix.find_first_not_of("0123456789") == std::string::npos) {
            int n = std::stoi(suffix);
            if (n >= 1 && n <= 16) return builtin_torus(n);
        }
        return std::nullopt;
    }
    if (name == "iwasawa") return builtin_iwasawa();
    if (name == "abelian_I0") return builtin_abelian_I0();
    if (name == "kodaira") return builtin_kodaira();
    if (name == "kodaira_x_torus") return builtin_kodaira_x_torus();
    if (name == "category_iii") return builtin_category_iii();
    if (name.rfind("i_lambda(", 0) == 0 && name.back() == ')') {
        GQ lambda = parse_gq(name.substr(9, name.size() - 10));
        if (!lambda.is_real()) throw ParseError("i_lambda parameter must be a real rational");
        return builtin_i_lambda(lambda.re);
    }
    return std::nullopt;
}

inline LieAlgebra<GQ> builtin_algebra(const std::string& name) {
    auto alg = try_builtin_algebra(name);
    if (!alg) throw UnknownName("no builtin algebra named '" + name + "'");
    return *alg;
}

// ---------------------------------------------------------------------------
// Scalar-backend conversion (exact -> float).

inline CD to_cd(const GQ& v) { return CD(v.approx()); }

inline Form<CD> to_float(const Form<GQ>& f) {
    Form<CD> out(f.n);
    for (const auto& [key, v] : f.c) out.add_term(key.P, key.Q, to_cd(v));
    return out;
}

inline VectorForm<CD> to_float(const VectorForm<GQ>& vf) {
    VectorForm<CD> out(vf.n, vf.barred);
    for (const auto& [k, f] : vf.comp) out.add_component(k, to_float(f));
    return out;
}

inline LieAlgebra<CD> to_float(const LieAlgebra<GQ>& alg) {
    LieAlgebra<CD> out;
    out.n = alg.n;
    out.name = alg.name;
    for (const Form<GQ>& f : alg.d_z) out.d_z.push_back(to_float(f));
    for (const Form<GQ>& f : alg.d_zb) out.d_zb.push_back(to_float(f));
    return out;
}

}  // namespace deforge
