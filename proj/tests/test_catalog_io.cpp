#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "deforge/catalog_io.hpp"
#include "deforge/report.hpp"
#include "deforge/rng.hpp"

using namespace deforge;

namespace {

bool same_presentation(const LieAlgebra<GQ>& a, const LieAlgebra<GQ>& b) {
    if (a.name != b.name || a.n != b.n) return false;
    for (int k = 0; k < a.n; ++k)
        if (!(a.d_z[k] == b.d_z[k]) || !(a.d_zb[k] == b.d_zb[k])) return false;
    return true;
}

}  // namespace

TEST_CASE("presentation files round-trip every builtin") {
    for (const char* name : {"torus_1", "torus_3", "iwasawa", "abelian_I0", "kodaira",
                             "kodaira_x_torus", "category_iii", "i_lambda(1/2)", "i_lambda(-2)"}) {
        LieAlgebra<GQ> alg = builtin_algebra(name);
        LieAlgebra<GQ> back = parse_presentation(serialize_presentation(alg));
        CHECK(same_presentation(alg, back));
    }
}

TEST_CASE("torus file with explicit zeros parses") {
    LieAlgebra<GQ> alg = parse_presentation(
        "name=torus_3\n"
        "n=3\n"
        "d w1 = 0\n"
        "d w2 = 0\n"
        "d w3 = 0\n");
    CHECK(same_presentation(alg, builtin_torus(3)));
}

TEST_CASE("parser accepts the documented grammar shapes") {
    // Comments, blank lines, missing zero lines, spacing.
    LieAlgebra<GQ> iwa = parse_presentation(
        "# three-step nilpotent, parallelizable\n"
        "name = iwasawa\n"
        "\n"
        "n = 3\n"
        "d w3 = (1)*w1^w2   # only the nonzero differential\n");
    CHECK(same_presentation(iwa, builtin_iwasawa()));

    // Bare monomials carry coefficient 1; signs and factor order fold in.
    LieAlgebra<GQ> a = parse_presentation(
        "name=abelian_I0\n"
        "n=3\n"
        "d w3 = -(1)*w~1^w1 - w2^w~2\n");
    CHECK(same_presentation(a, builtin_abelian_I0()));

    LieAlgebra<GQ> flipped = parse_presentation(
        "name=iwasawa\n"
        "n=3\n"
        "d w3 = -(1)*w2^w1\n");
    CHECK(same_presentation(flipped, builtin_iwasawa()));

    // Complex coefficients in the scalar grammar.
    LieAlgebra<GQ> c3 = parse_presentation(
        "name=category_iii\n"
        "n=3\n"
        "d w2 = w1^w3 + w1^w~3\n"
        "d w3 = (i)*w1^w~2 + (-i)*w2^w~1\n");
    CHECK(same_presentation(c3, builtin_category_iii()));

    // A repeated generator inside one term contributes nothing.
    LieAlgebra<GQ> degenerate = parse_presentation(
        "name=t\n"
        "n=2\n"
        "d w1 = w2^w2\n");
    CHECK(degenerate.d_z[0].is_zero());
}

TEST_CASE("parse errors carry line and column") {
    auto line_of = [](const std::string& text) {
        try {
            parse_presentation(text);
        } catch (const ParseError& e) {
            return e.line;
        }
        return -1;
    };

    CHECK(line_of("") > 0);                          // missing name
    CHECK(line_of("name=x\n") > 0);                  // missing n
    CHECK(line_of("n=3\nname=x\n") == 1);            // wrong header order
    CHECK(line_of("name=x\nn=0\n") == 2);            // n out of range
    CHECK(line_of("name=x\nn=two\n") == 2);          // bad integer
    CHECK(line_of("name=x\nn=2\nd w5 = 0\n") == 3);  // generator out of range
    CHECK(line_of("name=x\nn=2\nd w~1 = 0\n") == 3); // conjugates are derived
    CHECK(line_of("name=x\nn=2\nd w1 = 0\nd w1 = 0\n") == 4);  // duplicate
    CHECK(line_of("name=x\nn=2\nd w1 = w1&w2\n") == 3);        // bad separator
    CHECK(line_of("name=x\nn=2\nd w1 = (1/0)*w1^w2\n") == 3);  // bad scalar
    CHECK(line_of("name=x\nn=2\nd w1 = (1*w1^w2\n") == 3);     // unbalanced paren
    CHECK(line_of("name=x\nn=2\nd w1 = 0 junk\n") == 3);       // trailing input

    try {
        parse_presentation("name=x\nn=2\nd w1 = w1&w2\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.col == 10);  // the `&`
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("presentation invariants are checked after parsing") {
    // (0,2) component: non-integrable almost-complex structure.
    CHECK_THROWS_AS(parse_presentation("name=x\n"
                                       "n=2\n"
                                       "d w1 = w~1^w~2\n"),
                    InvariantViolation);
    // d^2 != 0.
    CHECK_THROWS_AS(parse_presentation("name=x\n"
                                       "n=3\n"
                                       "d w1 = w2^w3\n"
                                       "d w2 = w1^w~1\n"),
                    InvariantViolation);
}

TEST_CASE("load reads files from disk") {
    std::string path = "/tmp/deforge_test_catalog.alg";
    {
        std::ofstream out(path);
        out << serialize_presentation(builtin_iwasawa());
    }
    LieAlgebra<GQ> alg = load_presentation(path);
    CHECK(same_presentation(alg, builtin_iwasawa()));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_presentation("/tmp/deforge_no_such_file.alg"), ParseError);
}

TEST_CASE("builtin catalog entries pass their self-checks") {
    for (const char* name : {"torus_2", "torus_3", "iwasawa", "abelian_I0", "kodaira",
                             "kodaira_x_torus", "category_iii", "i_lambda(1)"}) {
        CatalogEntry entry = builtin_catalog(name);  // verify_entry runs here
        CHECK(!entry.facts.empty());
        CHECK(entry.metric.n == entry.algebra.n);
    }

    CHECK(builtin_catalog("iwasawa").classification == StructureClass::ComplexParallelizable);
    CHECK(builtin_catalog("category_iii").classification == StructureClass::NonNilpotent);
    CHECK(builtin_catalog("i_lambda(1)").classification == StructureClass::Nilpotent);

    // torus_3: every lemma verdict ships as "holds".
    CatalogEntry torus = builtin_catalog("torus_3");
    int lemma_facts = 0;
    for (const KnownFact& fact : torus.facts)
        if (fact.key.rfind("lemma.", 0) == 0) {
            ++lemma_facts;
            CHECK(fact.expected == "holds");
        }
    CHECK(lemma_facts == 4);

    CatalogEntry ab = builtin_catalog("abelian_I0");
    for (const KnownFact& fact : ab.facts) {
        if (fact.key == "lemma.mild") CHECK(fact.expected == "holds");
        if (fact.key == "lemma.dual_mild") CHECK(fact.expected == "fails");
    }

    // The external entry's stated pattern agrees with recomputation too,
    // even though the self-check does not rely on it.
    CatalogEntry il = builtin_catalog("i_lambda(1)");
    CHECK(evaluate_fact(il, "lemma.weak") == "fails");
    CHECK(evaluate_fact(il, "metric.balanced") == "holds");
    for (const KnownFact& fact : il.facts) CHECK(fact.provenance == Provenance::external);

    CHECK_THROWS_AS(builtin_catalog("nope"), UnknownName);
    CHECK_THROWS_AS(evaluate_fact(torus, "lemma.imaginary"), UnknownName);

    // A tampered expected value trips the self-check.
    CatalogEntry broken = builtin_catalog("iwasawa");
    for (KnownFact& fact : broken.facts)
        if (fact.key == "lemma.mild") fact.expected = "holds";
    CHECK_THROWS_AS(verify_entry(broken), InvariantViolation);
}

TEST_CASE("provenance tags") {
    CHECK(provenance_name(Provenance::paper) == "paper");
    CHECK(parse_provenance("derived") == Provenance::derived);
    CHECK(parse_provenance("external") == Provenance::external);
    CHECK(parse_provenance("trivial") == Provenance::trivial);
    CHECK_THROWS_AS(parse_provenance("rumor"), ParseError);
}

TEST_CASE("reports emit deterministically and round-trip") {
    Report r;
    r.command = "lemma iwasawa --kind mild";
    r.seed = 7;
    r.add("lemma.mild.holds", "false", "paper");
    r.add("lemma.mild.witness", "(1)*w3^w~1^w~2^w~3", "paper");
    r.add("margin", "-22/7", "derived");
    r.add("note", "counterexample reproduced exactly");

    std::string text = emit_report(r);
    CHECK(text.find(report_schema) != std::string::npos);
    CHECK(text == emit_report(r));

    Report back = parse_report(text);
    CHECK(back == r);
    CHECK(emit_report(back) == text);
    CHECK(back.value_of("margin") == "-22/7");
    CHECK(back.has("note"));
    CHECK(!back.has("absent"));
    CHECK_THROWS_AS(back.value_of("absent"), UnknownName);

    // Item order is caller-controlled and preserved.
    Report swapped = r;
    std::swap(swapped.items[0], swapped.items[2]);
    CHECK(emit_report(swapped) != text);
    CHECK(parse_report(emit_report(swapped)) == swapped);
}

TEST_CASE("report validation") {
    Report r;
    r.add("x", "1");
    CHECK_THROWS_AS(r.add("x", "2"), InvariantViolation);
    CHECK_THROWS_AS(r.add("y", "1", "rumor"), InvariantViolation);

    CHECK_THROWS_AS(parse_report("not json"), ParseError);
    CHECK_THROWS_AS(parse_report("{}"), ParseError);
    CHECK_THROWS_AS(parse_report(R"({"schema":"deform-forge-report/2","command":"","seed":0,"items":[]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_report(R"({"schema":"deform-forge-report/1","command":"","seed":0,"items":[{"key":"a","value":"b","provenance":"rumor"}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_report(R"({"schema":"deform-forge-report/1","command":"","seed":0,"items":[{"key":"a"}]})"),
                    ParseError);

    Report ok = parse_report(R"({"schema":"deform-forge-report/1","command":"c","seed":3,"items":[]})");
    CHECK(ok.command == "c");
    CHECK(ok.seed == 3);
    CHECK(ok.items.empty());
}

TEST_CASE("form literals round-trip") {
    Rng rng(5);
    for (int n : {1, 2, 3, 4}) {
        for (int rep = 0; rep < 25; ++rep) {
            Form<GQ> f(n);
            int terms = 1 + static_cast<int>(rng.below(3));
            for (int t = 0; t < terms; ++t)
                f.add_term(static_cast<Mask>(rng.below(std::uint64_t(1) << n)),
                           static_cast<Mask>(rng.below(std::uint64_t(1) << n)), rng.gq_nonzero());
            CHECK(parse_form_literal(form_literal(f), n) == f);
        }
    }
    CHECK(form_literal(Form<GQ>(3)) == "0");
    CHECK(parse_form_literal("0", 3).is_zero());
    CHECK(parse_form_literal("  0  ", 3).is_zero());

    // Scalar terms and the empty wedge.
    Form<GQ> scal = parse_form_literal("(5/2)*1 - w1^w~2", 2);
    CHECK(scal.c.at(FKey{0, 0}) == GQ(mpq_class(5, 2)));
    CHECK(form_literal(scal) == "(5/2)*1 + (-1)*w1^w~2");
    CHECK(parse_form_literal(form_literal(scal), 2) == scal);
    CHECK(parse_form_literal("1 + 1", 2) == Form<GQ>::monomial(2, 0, 0, GQ(2)));
}

TEST_CASE("form literal factors canonicalize with signs") {
    // Barred-before-unbarred swaps once: w~1^w1 = -w1^w~1.
    CHECK(parse_form_literal("w~1^w1", 2) == Form<GQ>::monomial(2, 1, 1, GQ(-1)));
    // Odd permutation of three factors.
    CHECK(parse_form_literal("w2^w1^w~1", 2) == Form<GQ>::monomial(2, 3, 1, GQ(-1)));
    // Even permutation (a 3-cycle) keeps the sign.
    CHECK(parse_form_literal("w2^w~1^w1", 2) == Form<GQ>::monomial(2, 3, 1, GQ(1)));
    // Repeated factor kills the term.
    CHECK(parse_form_literal("w1^w2^w1", 3).is_zero());
    CHECK(parse_form_literal("w~2^w~2", 3).is_zero());
    // Cancellation across terms.
    CHECK(parse_form_literal("w1^w~1 + w~1^w1", 2).is_zero());
}

TEST_CASE("form literal parse errors") {
    CHECK_THROWS_AS(parse_form_literal("1^w1", 2), ParseError);
    CHECK_THROWS_AS(parse_form_literal("w1^1", 2), ParseError);
    CHECK_THROWS_AS(parse_form_literal("w3", 2), ParseError);
    CHECK_THROWS_AS(parse_form_literal("(1/2*w1", 2), ParseError);
    CHECK_THROWS_AS(parse_form_literal("w1 w2", 2), ParseError);
    CHECK_THROWS_AS(parse_form_literal("", 2), ParseError);
    CHECK_THROWS_AS(parse_form_literal("w1", 0), InvariantViolation);
}

TEST_CASE("form files round-trip") {
    Form<GQ> f(3);
    f.add_term(0b011, 0, GQ(1));
    f.add_term(0b100, 0b100, GQ(0, mpq_class(-1, 3)));
    auto [n, back] = parse_form_file(serialize_form_file(f));
    CHECK(n == 3);
    CHECK(back == f);

    auto [n2, g] = parse_form_file("# comment\nn = 2\n\nform = (2)*w1^w~1 # trailing\n");
    CHECK(n2 == 2);
    CHECK(g == Form<GQ>::monomial(2, 1, 1, GQ(2)));

    CHECK_THROWS_AS(parse_form_file(""), ParseError);
    CHECK_THROWS_AS(parse_form_file("n=2\n"), ParseError);
    CHECK_THROWS_AS(parse_form_file("form = w1\nn=2\n"), ParseError);
    CHECK_THROWS_AS(parse_form_file("n=2\nform = w1\nform = w2\n"), ParseError);
    CHECK_THROWS_AS(parse_form_file("n=2\nbogus = w1\n"), ParseError);
}
