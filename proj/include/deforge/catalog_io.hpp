#pragma once

#include <string>
#include <vector>

#include "deforge/catalog.hpp"
#include "deforge/hodge.hpp"
#include "deforge/lemmata.hpp"

namespace deforge {

// ---------------------------------------------------------------------------
// Structure-constant file format (text, line-oriented):
//
//   name=<id>
//   n=<int>
//   d w<k> = <poly>
//
// <poly> is `0` or a +/- separated sum of terms `(<scalar>)*w<i>^w<j>`, where
// the scalar is a Gaussian rational literal (`parse_gq` grammar, e.g. `1/2`,
// `-3*i`, `1+1/4*i`) and `w~<j>` denotes the conjugate generator.  A bare
// monomial means coefficient 1.  Only d(dz^k) is stated; conjugate
// differentials are derived.  Missing `d w<k>` lines default to zero; blank
// lines and `#` comments are ignored.

LieAlgebra<GQ> parse_presentation(const std::string& text);
LieAlgebra<GQ> load_presentation(const std::string& path);
std::string serialize_presentation(const LieAlgebra<GQ>& alg);

// Form literals use the same term syntax with arbitrary wedge arity,
// e.g. `(1/2+3*i)*w1^w2^w~1 + w3^w~3`; `1` is the empty wedge (scalar term)
// and `0` the zero form.  Factors are reordered into canonical position with
// the corresponding sign.
Form<GQ> parse_form_literal(const std::string& text, int n);
std::string form_literal(const Form<GQ>& f);

// Standalone form file: `n=<int>` header, then one `form = <poly>` line.
std::pair<int, Form<GQ>> parse_form_file(const std::string& text);
std::string serialize_form_file(const Form<GQ>& f);

// ---------------------------------------------------------------------------
// Catalog entries: a presentation plus its default invariant metric and the
// expected facts shipped with it, each carrying a provenance tag.

enum class Provenance { paper, derived, external, trivial };

std::string provenance_name(Provenance p);
Provenance parse_provenance(const std::string& text);

struct KnownFact {
    std::string key;       // fact name, e.g. "lemma.mild" or "classification"
    std::string expected;  // canonical value string
    Provenance provenance = Provenance::derived;
    std::string note;      // convention or source remark

    bool operator==(const KnownFact&) const = default;
};

struct CatalogEntry {
    LieAlgebra<GQ> algebra;
    HermitianMetric<GQ> metric;  // default: identity coframe metric
    StructureClass classification = StructureClass::Abelian;
    std::vector<KnownFact> facts;
};

// Recomputes one fact of the entry from scratch (lemma checks, classification,
// metric properties).  UnknownName for an unrecognized key.
std::string evaluate_fact(const CatalogEntry& entry, const std::string& key);

// Re-derives every fact except the [external] ones; InvariantViolation naming
// the first mismatching fact.
void verify_entry(const CatalogEntry& entry);

// Entry lookup with load-time self-check (verify_entry) by default.
CatalogEntry builtin_catalog(const std::string& name, bool self_check = true);
std::vector<std::string> catalog_names();

}  // namespace deforge
