// Acceptor equivalence, bounded enumeration, synchronized shuffle and the
// recombination-closure check, cross-checked against brute-force oracles.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kleenefc/acceptor.hpp"
#include "kleenefc/json_io.hpp"
#include "kleenefc/nets.hpp"
#include "kleenefc/products.hpp"
#include "oracle.hpp"

using namespace kfc;

namespace {

// (ab)* over one location.
FiniteAcceptor loop_ab() {
	FiniteAcceptor a;
	a.alphabet = make_alphabet({{"a", "b"}});
	a.add_state("even", true);
	a.add_state("odd", false);
	a.add_edge(0, "a", 1);
	a.add_edge(1, "b", 0);
	return a;
}

// Nondeterministic: a(a+b)*a + a, same alphabet.
FiniteAcceptor loose_a() {
	FiniteAcceptor a;
	a.alphabet = make_alphabet({{"a", "b"}});
	a.add_state("s", false);
	a.add_state("mid", false);
	a.add_state("hit", true);
	a.add_edge(0, "a", 1);
	a.add_edge(0, "a", 2);
	a.add_edge(1, "a", 1);
	a.add_edge(1, "b", 1);
	a.add_edge(1, "a", 2);
	return a;
}

}  // namespace

TEST_CASE("bounded enumeration is shortlex sorted and matches the oracle") {
	FiniteAcceptor a = loose_a();
	auto words = acceptor_language_bounded(a, 4);
	CHECK(std::is_sorted(words.begin(), words.end(), shortlex_less));
	WordSet got(words.begin(), words.end());
	CHECK(got == oracle::acceptor_language(a, 4));
	CHECK(got.count(oracle::make_word("a")) == 1);
	CHECK(got.count(oracle::make_word("aba")) == 1);
	CHECK(got.count(oracle::make_word("ab")) == 0);
}

TEST_CASE("determinization preserves the language") {
	FiniteAcceptor a = loose_a();
	FiniteAcceptor d = determinize(a);
	CHECK(oracle::acceptor_language(d, 5) == oracle::acceptor_language(a, 5));
	for (const auto& m : d.edges)
		for (const auto& [letter, targets] : m)
			CHECK(targets.size() == 1);
}

TEST_CASE("equal acceptors compare equal both ways") {
	FiniteAcceptor a = loop_ab();
	FiniteAcceptor d = determinize(a);
	CHECK(acceptor_equal(a, d).equal);
	CHECK(acceptor_equal(d, a).equal);
	CHECK(acceptor_subset(a, d).equal);
}

TEST_CASE("inequality reports the shortlex-least separating word") {
	FiniteAcceptor a = loop_ab();
	FiniteAcceptor b = loose_a();
	LanguageComparison cmp = acceptor_equal(a, b);
	REQUIRE_FALSE(cmp.equal);
	REQUIRE(cmp.witness.has_value());
	// () is in (ab)* only; a is in the other only; () is shortlex-least.
	CHECK(*cmp.witness == Word{});
	CHECK(cmp.witness_in_first);

	LanguageComparison sub = acceptor_subset(b, a);
	REQUIRE_FALSE(sub.equal);
	CHECK(*sub.witness == oracle::make_word("a"));
}

TEST_CASE("subset holds for a genuine sublanguage") {
	FiniteAcceptor a = loop_ab();
	FiniteAcceptor all;  // (a+b)*
	all.alphabet = a.alphabet;
	all.add_state("s", true);
	all.add_edge(0, "a", 0);
	all.add_edge(0, "b", 0);
	CHECK(acceptor_subset(a, all).equal);
	LanguageComparison back = acceptor_subset(all, a);
	REQUIRE_FALSE(back.equal);
	CHECK(*back.witness == oracle::make_word("a"));
}

TEST_CASE("shuffle of word sets matches the projection oracle") {
	auto alphabet = make_alphabet({{"a", "b"}, {"a", "c"}});
	std::vector<WordSet> locals{
			oracle::make_words({"", "ab"}),
			oracle::make_words({"", "ac", "a"})};
	auto words = shuffle_bounded(locals, *alphabet, 3);
	WordSet got(words.begin(), words.end());
	CHECK(got == oracle::shuffle_words(locals, *alphabet, 3));
	CHECK(got.count(oracle::make_word("abc")) == 1);
	CHECK(got.count(oracle::make_word("acb")) == 1);
	CHECK(got.count(oracle::make_word("ab")) == 1);
	CHECK(got.count(oracle::make_word("ac")) == 0);  // location 1 lacks "a" alone
}

TEST_CASE("shuffle over acceptors agrees with shuffle over word sets") {
	ProductSystem ps = load_ps(oracle::data_path("twin_globals.ps.json"));
	std::vector<FiniteAcceptor> locals;
	std::vector<WordSet> sets;
	for (size_t i = 0; i < ps.alphabet->width(); ++i) {
		FiniteAcceptor a = component_acceptor(ps, (int)i);
		locals.push_back(a);
		WordSet w = oracle::acceptor_language(a, 4);
		sets.push_back(w);
	}
	auto via_acceptors = shuffle_bounded(locals, *ps.alphabet, 4);
	auto via_sets = shuffle_bounded(sets, *ps.alphabet, 4);
	CHECK(via_acceptors == via_sets);
	CHECK(WordSet(via_sets.begin(), via_sets.end()) ==
	      oracle::shuffle_words(sets, *ps.alphabet, 4));
}

TEST_CASE("closure check matches the oracle on the paired-choice languages") {
	NetSystem subset_net = load_net(oracle::data_path("twin.net.json"));
	FiniteAcceptor subset_acc = net_acceptor(subset_net);
	ClosureCheck c1 = direct_product_closure(subset_acc, 3);
	REQUIRE_FALSE(c1.closed);
	CHECK(*c1.counterexample == oracle::make_word("ab"));
	CHECK(*c1.counterexample == *oracle::closure_counterexample(subset_acc, 3));

	NetSystem product_net = load_net(oracle::data_path("twin_product.net.json"));
	FiniteAcceptor product_acc = net_acceptor(product_net);
	ClosureCheck c2 = direct_product_closure(product_acc, 3);
	REQUIRE_FALSE(c2.closed);
	CHECK(*c2.counterexample == oracle::make_word("ac"));
	CHECK(*c2.counterexample == *oracle::closure_counterexample(product_acc, 3));
}

TEST_CASE("the freely mixing product language is closed") {
	NetSystem net = load_net(oracle::data_path("mix_product.net.json"));
	FiniteAcceptor acc = net_acceptor(net);
	CHECK(direct_product_closure(acc, 6).closed);
	CHECK_FALSE(oracle::closure_counterexample(acc, 5).has_value());
}

TEST_CASE("canonical form drops unreachable states and preserves language") {
	FiniteAcceptor a = loose_a();
	a.add_state("island", true);
	a.add_edge(3, "b", 3);
	FiniteAcceptor c = canonical_form(a);
	CHECK(c.size() == 3);
	CHECK(oracle::acceptor_language(c, 4) == oracle::acceptor_language(loose_a(), 4));
}

TEST_CASE("canonical form gives equal results for renamed copies") {
	FiniteAcceptor a = loop_ab();
	FiniteAcceptor b;
	b.alphabet = a.alphabet;
	b.add_state("odd", false);
	b.add_state("even", true);
	b.add_edge(1, "a", 0);
	b.add_edge(0, "b", 1);
	b.initial = 1;
	FiniteAcceptor ca = canonical_form(a);
	FiniteAcceptor cb = canonical_form(b);
	CHECK(ca.names == cb.names);
	CHECK(ca.accepting == cb.accepting);
	CHECK(ca.edges == cb.edges);
	CHECK(ca.initial == cb.initial);
}

TEST_CASE("exploration caps abort instead of running away") {
	FiniteAcceptor a = loose_a();
	CHECK_THROWS_AS(determinize(a, 1), ExplorationLimit);
	CHECK_THROWS_AS(acceptor_equal(a, loop_ab(), 1), ExplorationLimit);
}

TEST_CASE("validate rejects malformed acceptors") {
	FiniteAcceptor a = loop_ab();
	a.edges[0]["z"].push_back(1);
	CHECK_THROWS_AS(a.validate(), ValidationError);
	FiniteAcceptor b = loop_ab();
	b.initial = 9;
	CHECK_THROWS_AS(b.validate(), ValidationError);
}
