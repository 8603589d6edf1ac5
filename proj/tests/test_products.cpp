// Product systems: synchronized runs, matching and global-move annotations,
// their structural checks, union decomposition, and the annotation
// replacements, against oracles and the golden corpus.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kleenefc/json_io.hpp"
#include "kleenefc/products.hpp"
#include "kleenefc/regex.hpp"
#include "oracle.hpp"

using namespace kfc;

namespace {

ProductSystem load(const std::string& name) {
	return load_ps(oracle::data_path(name));
}

FiniteAcceptor regex_over(const std::string& text, AlphabetPtr alphabet) {
	return regex_to_acceptor(parse_regex(text), alphabet);
}

}  // namespace

TEST_CASE("validation catches malformed systems") {
	ProductSystem ps = load("twin_globals.ps.json");
	CHECK_NOTHROW(ps.validate());

	ProductSystem bad = ps;
	bad.components[0].moves.push_back({"r1", "z", "r2"});
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ps;
	bad.components[0].moves.push_back({"r1", "a", "ghost"});
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ps;
	bad.initials.clear();
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ps;
	bad.components[1].moves.push_back({"s1", "b", "s2"});
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ps;
	(*bad.globals)["a"].push_back(
			{{"r1", "a", "r2"}, {"s2", "a", "s1"}});  // not a move of component 2
	CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("run graphs match the brute-force tuple oracle") {
	for (const auto& name :
	     {"twin_globals.ps.json", "twin_globals_product.ps.json",
	      "mix_direct.ps.json", "mix_direct_product.ps.json",
	      "mix_globals.ps.json", "mix_globals_product.ps.json"}) {
		ProductSystem ps = load(name);
		FiniteAcceptor acc = run_graph(ps);
		REQUIRE_MESSAGE(oracle::acceptor_language(acc, 5) ==
		                oracle::ps_language(ps, 5), "system ", name);
	}
}

TEST_CASE("the golden systems denote the four paired-choice languages") {
	auto check_lang = [](const std::string& file, const std::string& regex) {
		ProductSystem ps = load(file);
		LanguageComparison cmp =
				acceptor_equal(run_graph(ps), regex_over(regex, ps.alphabet));
		REQUIRE_MESSAGE(cmp.equal, file, " differs from ", regex, " at ",
		                word_text(*cmp.witness));
	};
	check_lang("twin_globals.ps.json", "(a(bd+db)+a(ce+ec))*(1+a)");
	check_lang("twin_globals_product.ps.json",
	           "(a(bd+db)+a(ce+ec))*(1+a+ab+ad)");
	check_lang("mix_direct.ps.json",
	           "(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a)");
	check_lang("mix_direct_product.ps.json",
	           "(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a+ab+ac+ad+ae)");
	check_lang("mix_globals.ps.json",
	           "(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a)");
	check_lang("mix_globals_product.ps.json",
	           "(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a+ab+ac+ad+ae)");
}

TEST_CASE("component acceptors speak the per-location languages") {
	ProductSystem ps = load("twin_globals.ps.json");
	CHECK(acceptor_equal(component_acceptor(ps, 0),
	                     regex_over("(ab+ac)*(1+a)",
	                                make_alphabet({{"a", "b", "c"}}))).equal);
	CHECK(acceptor_equal(component_acceptor(ps, 1),
	                     regex_over("(ad+ae)*(1+a)",
	                                make_alphabet({{"a", "d", "e"}}))).equal);
}

TEST_CASE("joint moves default to every recombination without globals") {
	ProductSystem free = load("mix_direct.ps.json");
	CHECK(free.joint_moves("a").size() == 4);
	ProductSystem held = load("twin_globals.ps.json");
	CHECK(held.joint_moves("a").size() == 2);
}

TEST_CASE("matching checks pass on the matched mixing system") {
	ProductSystem ps = load("mix_direct_product.ps.json");
	REQUIRE(ps.matchings.has_value());
	CHECK(check_matchings_wellformed(ps).ok);
	CHECK(check_conflict_equivalent(ps).ok);
	CHECK(check_consistent_matchings(ps).ok);
}

TEST_CASE("a matching missing an enabled state is rejected") {
	ProductSystem ps = load("mix_direct_product.ps.json");
	(*ps.matchings)["a"] = {};
	CHECK_FALSE(check_matchings_wellformed(ps).ok);
}

TEST_CASE("conflict equivalence fails when matched states offer different letters") {
	ProductSystem ps = load("mix_direct_product.ps.json");
	// Give r1 an extra local letter that s1 does not offer.
	ps.alphabet = make_alphabet({{"a", "b", "c", "x"}, {"a", "d", "e"}});
	ps.components[0].moves.push_back({"r1", "x", "r1"});
	Verdict v = check_conflict_equivalent(ps);
	REQUIRE_FALSE(v.ok);
	CHECK(v.text().find("x") != std::string::npos);
}

TEST_CASE("consistency fails when a reachable tuple escapes the matching") {
	ProductSystem ps = load("mix_direct_product.ps.json");
	(*ps.matchings)["a"] = {{"r2", "s2"}};
	// Now (r1,s1) still enables a in both components but is not matched;
	// wellformedness already fails, and consistency reports the tuple.
	Verdict v = check_consistent_matchings(ps);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("(r1,s1)") != std::string::npos);
}

TEST_CASE("same source holds for the twin globals and fails on skew") {
	ProductSystem ps = load("twin_globals.ps.json");
	CHECK(check_same_source(ps).ok);
	ProductSystem skew = ps;
	(*skew.globals)["a"] = {
			{{"r1", "a", "r2"}, {"s1", "a", "s2"}},
			{{"r1", "a", "r3"}, {"s2", "a", "s1"}},
	};
	skew.components[1].moves.push_back({"s2", "a", "s1"});
	Verdict v = check_same_source(skew);
	REQUIRE_FALSE(v.ok);
}

TEST_CASE("compartments group joint moves by their source set") {
	ProductSystem ps = load("twin_globals.ps.json");
	auto parts = compartments(ps);
	REQUIRE(parts.size() == 1);
	CHECK(parts[0].letter == "a");
	CHECK(parts[0].moves.size() == 2);
	CHECK(parts[0].sources ==
	      std::set<std::pair<int, std::string>>{{0, "r1"}, {1, "s1"}});
}

TEST_CASE("product moves hold exactly when the recombinations exist") {
	CHECK_FALSE(check_product_moves(load("twin_globals.ps.json")).ok);
	CHECK(check_product_moves(load("mix_globals.ps.json")).ok);
	Verdict v = check_product_moves(load("twin_globals_product.ps.json"));
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("recombination") != std::string::npos);
}

TEST_CASE("liveness of the golden systems") {
	CHECK(check_ps_live(load("twin_globals.ps.json")).ok);
	CHECK(check_ps_live(load("mix_direct.ps.json")).ok);
	ProductSystem dead = load("twin_globals.ps.json");
	dead.components[0].states.push_back("r4");
	dead.components[0].moves.push_back({"r4", "b", "r1"});
	Verdict v = check_ps_live(dead);
	REQUIRE_FALSE(v.ok);
}

TEST_CASE("union decomposition splits the twin system by final tuple") {
	ProductSystem ps = load("twin_globals.ps.json");
	auto parts = decompose_union(ps);
	REQUIRE(parts.size() == 2);
	for (const auto& part : parts) {
		CHECK(part.acceptance == Acceptance::product);
		CHECK(part.initials.size() == 1);
	}
	CHECK(acceptor_equal(run_graph(parts[0]),
	                     regex_over("(a(bd+db)+a(ce+ec))*", ps.alphabet)).equal);
	CHECK(acceptor_equal(run_graph(parts[1]),
	                     regex_over("(a(bd+db)+a(ce+ec))*a", ps.alphabet)).equal);
}

TEST_CASE("decomposition requires subset acceptance") {
	CHECK_THROWS_AS(decompose_union(load("twin_globals_product.ps.json")),
	                PreconditionError);
}

TEST_CASE("combining the decomposition restores the language") {
	ProductSystem ps = load("twin_globals.ps.json");
	ProductSystem back = union_combine(decompose_union(ps));
	CHECK(back.acceptance == Acceptance::subset);
	CHECK(back.initials.size() == 2);
	CHECK(acceptor_equal(run_graph(ps), run_graph(back)).equal);
}

TEST_CASE("combining rejects degenerate unions") {
	CHECK_THROWS_AS(union_combine({}), PreconditionError);
	ProductSystem a = load("twin_globals.ps.json");
	ProductSystem b = a;
	b.alphabet = make_alphabet({{"a", "b", "c", "x"}, {"a", "d", "e"}});
	CHECK_THROWS_AS(union_combine({a, b}), PreconditionError);
}

TEST_CASE("globals from matchings lists every recombination over matched tuples") {
	ProductSystem ps = load("mix_direct_product.ps.json");
	ProductSystem out = globals_from_matchings(ps);
	REQUIRE(out.globals.has_value());
	CHECK_FALSE(out.matchings.has_value());
	CHECK(out.globals->at("a").size() == 4);
	CHECK(acceptor_equal(run_graph(ps), run_graph(out)).equal);
	CHECK(check_same_source(out).ok);
	CHECK(check_product_moves(out).ok);
}

TEST_CASE("matchings from globals keeps the language when moves recombine") {
	ProductSystem ps = load("mix_globals.ps.json");
	ProductSystem out = matchings_from_globals(ps);
	REQUIRE(out.matchings.has_value());
	CHECK_FALSE(out.globals.has_value());
	CHECK(out.matchings->at("a") == std::vector<StateTuple>{{"r1", "s1"}});
	CHECK(check_matchings_wellformed(out).ok);
	CHECK(check_conflict_equivalent(out).ok);
	CHECK(check_consistent_matchings(out).ok);
	CHECK(acceptor_equal(run_graph(ps), run_graph(out)).equal);
}

TEST_CASE("matchings cannot retain a restricted recombination") {
	// The twin system is live and same source, but its two globals refuse two
	// of the four recombinations; the matching view frees them again. The
	// conflict-equivalence and consistency conclusions still hold.
	ProductSystem ps = load("twin_globals.ps.json");
	ProductSystem out = matchings_from_globals(ps);
	CHECK(check_matchings_wellformed(out).ok);
	CHECK(check_conflict_equivalent(out).ok);
	CHECK(check_consistent_matchings(out).ok);
	LanguageComparison cmp = acceptor_equal(run_graph(ps), run_graph(out));
	REQUIRE_FALSE(cmp.equal);
	CHECK(*cmp.witness == oracle::make_word("abe"));
	CHECK_FALSE(cmp.witness_in_first);
}

TEST_CASE("acceptance modes read the same tuples differently") {
	ProductSystem subset = load("twin_globals.ps.json");
	ProductSystem product = load("twin_globals_product.ps.json");
	StateTuple mixed{"r1", "s2"};
	CHECK_FALSE(subset.accepting_tuple(mixed));
	CHECK(product.accepting_tuple(mixed));
	CHECK(subset.accepting_tuple({"r2", "s2"}));
	CHECK(product.accepting_tuple({"r2", "s2"}));
}
