// Connected and sum expressions: synchronized derivative steps under cable
// and pairing annotations, the relation checks, annotation conversions, and
// the golden expression files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <set>
#include <utility>

#include "kleenefc/connected.hpp"
#include "kleenefc/json_io.hpp"
#include "kleenefc/regex.hpp"
#include "oracle.hpp"

using namespace kfc;

namespace {

Block block(const std::string& text) {
	return Block{parse_regex(text)};
}

RxSet effects(std::initializer_list<std::string> texts) {
	RxSet out;
	for (const auto& t : texts) out.insert(parse_regex(t));
	return out;
}

// fsync((ab+ac)*, (ad+ae)*) with the two matched cables: b with d, c with e.
ConnectedExpression twin_loop() {
	ConnectedExpression ce;
	ce.alphabet = make_alphabet({{"a", "b", "c"}, {"a", "d", "e"}});
	ce.parts = {parse_regex("(ab+ac)*"), parse_regex("(ad+ae)*")};
	ce.annotation = Annotation::cables;
	ce.cables["a"] = {
			{CableDuct{block("(ab+ac)*"), effects({"b(ab+ac)*"})},
			 CableDuct{block("(ad+ae)*"), effects({"d(ad+ae)*"})}},
			{CableDuct{block("(ab+ac)*"), effects({"c(ab+ac)*"})},
			 CableDuct{block("(ad+ae)*"), effects({"e(ad+ae)*"})}},
	};
	return ce;
}

// The same parts fused by one pairing tuple: steps recombine freely.
ConnectedExpression mix_loop() {
	ConnectedExpression ce;
	ce.alphabet = make_alphabet({{"a", "b", "c"}, {"a", "d", "e"}});
	ce.parts = {parse_regex("(ab+ac)*"), parse_regex("(ad+ae)*")};
	ce.annotation = Annotation::pairings;
	ce.pairings["a"] = {{block("(ab+ac)*"), block("(ad+ae)*")}};
	return ce;
}

// Two-block partition at the first location: site_partition(ab+ba, a)
// is {ab+ba} and {a}.
ConnectedExpression two_block() {
	ConnectedExpression ce;
	ce.alphabet = make_alphabet({{"a", "b"}, {"a", "d"}});
	ce.parts = {parse_regex("ab+ba"), parse_regex("(ad)*")};
	return ce;
}

std::set<std::pair<std::string, std::string>> step_texts(
		const ConnectedExpression& ce, const DerivativeTuple& t,
		const std::string& letter) {
	std::set<std::pair<std::string, std::string>> out;
	for (const auto& next : ce_step(ce, t, letter))
		out.emplace(rx_text(next[0]), rx_text(next[1]));
	return out;
}

FiniteAcceptor regex_over(const std::string& text, AlphabetPtr alphabet) {
	return regex_to_acceptor(parse_regex(text), alphabet);
}

}  // namespace

TEST_CASE("validation rejects malformed expressions") {
	ConnectedExpression ce = twin_loop();
	CHECK_NOTHROW(ce.validate());

	ConnectedExpression bad = ce;
	bad.parts.pop_back();
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.parts[0] = parse_regex("ad");
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.annotation = Annotation::none;
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.pairings["a"] = {{block("(ab+ac)*"), block("(ad+ae)*")}};
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.cables["a"][0][0].pre = block("b");
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.cables["a"][0][0].effects = effects({"1"});
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.cables["a"][0][0].effects.clear();
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = ce;
	bad.cables["b"] = bad.cables["a"];
	CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("cable steps keep only the matched derivative pairs") {
	ConnectedExpression ce = twin_loop();
	auto got = step_texts(ce, ce.parts, "a");
	std::set<std::pair<std::string, std::string>> want{
			{"b(ab+ac)*", "d(ad+ae)*"},
			{"c(ab+ac)*", "e(ad+ae)*"},
	};
	CHECK(got == want);
}

TEST_CASE("pairing steps recombine freely") {
	ConnectedExpression ce = mix_loop();
	auto got = step_texts(ce, ce.parts, "a");
	std::set<std::pair<std::string, std::string>> want{
			{"b(ab+ac)*", "d(ad+ae)*"},
			{"b(ab+ac)*", "e(ad+ae)*"},
			{"c(ab+ac)*", "d(ad+ae)*"},
			{"c(ab+ac)*", "e(ad+ae)*"},
	};
	CHECK(got == want);
}

TEST_CASE("local steps touch one part only") {
	ConnectedExpression ce = twin_loop();
	DerivativeTuple t{parse_regex("b(ab+ac)*"), parse_regex("d(ad+ae)*")};
	auto got = step_texts(ce, t, "b");
	CHECK(got == std::set<std::pair<std::string, std::string>>{
			{"(ab+ac)*", "d(ad+ae)*"}});
	CHECK(ce_step(ce, t, "a").empty());
	CHECK(ce_step(ce, t, "c").empty());
}

TEST_CASE("the cable loop denotes the matched recombinations only") {
	ConnectedExpression ce = twin_loop();
	FiniteAcceptor acc = ce_acceptor(ce);
	CHECK(acc.size() == 7);
	CHECK(acceptor_equal(acc,
	                     regex_over("(a(bd+db)+a(ce+ec))*", ce.alphabet)).equal);
	LanguageComparison cmp = acceptor_equal(
			acc, regex_over("(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*", ce.alphabet));
	REQUIRE_FALSE(cmp.equal);
	CHECK(word_text(*cmp.witness) == "abe");
}

TEST_CASE("the pairing loop denotes all recombinations") {
	ConnectedExpression ce = mix_loop();
	CHECK(acceptor_equal(
			ce_acceptor(ce),
			regex_over("(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*", ce.alphabet)).equal);
}

TEST_CASE("acceptors agree with word-level derivative stepping") {
	for (auto make : {twin_loop, mix_loop}) {
		ConnectedExpression ce = make();
		FiniteAcceptor acc = ce_acceptor(ce);
		auto words = oracle::acceptor_language(acc, 4);
		std::set<Word> direct;
		std::function<void(DerivativeTuple, Word, size_t)> walk =
				[&](DerivativeTuple t, Word w, size_t depth) {
					bool all = true;
					for (const auto& d : t) all = all && nullable(d);
					if (all) direct.insert(w);
					if (depth == 4) return;
					for (const auto& letter : ce.alphabet->letters)
						for (const auto& next : ce_step(ce, t, letter)) {
							Word nw = w;
							nw.push_back(letter);
							walk(next, nw, depth + 1);
						}
				};
		walk(ce.parts, {}, 0);
		CHECK(words == direct);
	}
}

TEST_CASE("cable wellformedness needs every block cabled and disjoint effects") {
	CHECK(check_cables_wellformed(twin_loop()).ok);

	ConnectedExpression ce = two_block();
	ce.annotation = Annotation::cables;
	ce.cables["a"] = {
			{CableDuct{block("ab+ba"), effects({"b"})},
			 CableDuct{block("(ad)*"), effects({"d(ad)*"})}},
	};
	Verdict v = check_cables_wellformed(ce);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("not cabled") != std::string::npos);

	ConnectedExpression shared = twin_loop();
	shared.cables["a"][1][0].effects = effects({"b(ab+ac)*", "c(ab+ac)*"});
	v = check_cables_wellformed(shared);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("share the effect") != std::string::npos);
}

TEST_CASE("equal source holds when cables share whole pre tuples") {
	CHECK(check_equal_source(twin_loop()).ok);

	ConnectedExpression ce = two_block();
	ce.annotation = Annotation::cables;
	ce.cables["a"] = {
			{CableDuct{block("ab+ba"), effects({"b"})},
			 CableDuct{block("(ad)*"), effects({"d(ad)*"})}},
			{CableDuct{block("a"), effects({"1"})},
			 CableDuct{block("(ad)*"), effects({"d(ad)*"})}},
	};
	Verdict v = check_equal_source(ce);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("share a pre-block") != std::string::npos);
}

TEST_CASE("product derivatives hold for full duct recombination") {
	ConnectedExpression full = pairings_to_cables(mix_loop());
	REQUIRE(full.cables["a"].size() == 4);
	CHECK(check_product_derivatives(full).ok);

	Verdict v = check_product_derivatives(twin_loop());
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("recombination") != std::string::npos);
}

TEST_CASE("pairing wellformedness covers blocks exactly once") {
	CHECK(check_pairings_wellformed(mix_loop()).ok);

	ConnectedExpression ce = mix_loop();
	ce.pairings["a"].push_back(ce.pairings["a"][0]);
	Verdict v = check_pairings_wellformed(ce);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("two pairing tuples") != std::string::npos);

	ConnectedExpression missing = two_block();
	missing.annotation = Annotation::pairings;
	missing.pairings["a"] = {{block("ab+ba"), block("(ad)*")}};
	v = check_pairings_wellformed(missing);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("not paired") != std::string::npos);
}

TEST_CASE("equal choice compares initial letter sets across a tuple") {
	CHECK(check_equal_choice(mix_loop()).ok);

	ConnectedExpression ce;
	ce.alphabet = make_alphabet({{"a", "b"}, {"a", "d"}});
	ce.parts = {parse_regex("ab+b"), parse_regex("ad")};
	ce.annotation = Annotation::pairings;
	ce.pairings["a"] = {{block("ab+b"), block("ad")}};
	Verdict v = check_equal_choice(ce);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("different initial letter sets") != std::string::npos);
}

TEST_CASE("consistency finds reachable co-enabled tuples left unpaired") {
	CHECK(check_consistent_pairings(mix_loop()).ok);

	ConnectedExpression ce = two_block();
	ce.annotation = Annotation::pairings;
	ce.pairings["a"] = {{block("ab+ba"), block("(ad)*")}};
	Verdict v = check_consistent_pairings(ce);
	REQUIRE_FALSE(v.ok);
	REQUIRE(v.witness.has_value());
	CHECK(word_text(*v.witness) == "b");
}

TEST_CASE("action liveness passes on loops and fails past a final step") {
	CHECK(check_action_live(twin_loop()).ok);
	CHECK(check_action_live(mix_loop()).ok);

	ConnectedExpression tail;
	tail.alphabet = make_alphabet({{"a", "b", "c"}, {"a", "d", "e"}});
	tail.parts = {parse_regex("(ab+ac)*a"), parse_regex("(ad+ae)*a")};
	tail.annotation = Annotation::cables;
	tail.cables["a"] = {
			{CableDuct{block("(ab+ac)*a"), effects({"b(ab+ac)*a"})},
			 CableDuct{block("(ad+ae)*a"), effects({"d(ad+ae)*a"})}},
			{CableDuct{block("(ab+ac)*a"), effects({"c(ab+ac)*a"})},
			 CableDuct{block("(ad+ae)*a"), effects({"e(ad+ae)*a"})}},
			{CableDuct{block("(ab+ac)*a"), effects({"1"})},
			 CableDuct{block("(ad+ae)*a"), effects({"1"})}},
	};
	Verdict v = check_action_live(tail);
	REQUIRE_FALSE(v.ok);
	REQUIRE(v.witness.has_value());
	CHECK(word_text(*v.witness) == "a");

	ConnectedExpression stuck = twin_loop();
	stuck.cables.clear();
	v = check_action_live(stuck);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("never fire") != std::string::npos);
}

TEST_CASE("pairings expand to one single-effect cable per recombination") {
	ConnectedExpression out = pairings_to_cables(mix_loop());
	CHECK(out.annotation == Annotation::cables);
	CHECK(out.pairings.empty());
	REQUIRE(out.cables["a"].size() == 4);
	for (const auto& c : out.cables["a"])
		for (const auto& d : c) CHECK(d.effects.size() == 1);
	CHECK(acceptor_equal(ce_acceptor(out), ce_acceptor(mix_loop())).equal);
	CHECK(check_product_derivatives(out).ok);
	CHECK(check_equal_source(out).ok);
}

TEST_CASE("cables collapse to their pre tuples as pairings") {
	ConnectedExpression out = cables_to_pairings(twin_loop());
	CHECK(out.annotation == Annotation::pairings);
	CHECK(out.cables.empty());
	REQUIRE(out.pairings["a"].size() == 1);
	CHECK(out.pairings["a"][0][0].size() == 1);
	CHECK(rx_equal(*out.pairings["a"][0][0].begin(), parse_regex("(ab+ac)*")));

	// The pairing view recombines freely, so a restricted cable set widens.
	LanguageComparison cmp =
			acceptor_equal(ce_acceptor(twin_loop()), ce_acceptor(out));
	REQUIRE_FALSE(cmp.equal);
	CHECK(word_text(*cmp.witness) == "abe");
	CHECK_FALSE(cmp.witness_in_first);
}

TEST_CASE("the annotation round trip is stable on the pairing side") {
	ConnectedExpression back = cables_to_pairings(pairings_to_cables(mix_loop()));
	REQUIRE(back.pairings["a"].size() == 1);
	CHECK(acceptor_equal(ce_acceptor(back), ce_acceptor(mix_loop())).equal);
}

TEST_CASE("the golden twin expression file speaks the restricted language") {
	ExpressionInput e = load_expression(oracle::data_path("twin.sce.txt"));
	REQUIRE(e.sum.has_value());
	REQUIRE(e.sum->summands.size() == 2);
	CHECK(e.sum->summands[0].annotation == Annotation::cables);
	CHECK(e.sum->summands[0].cables.at("a").size() == 2);
	CHECK(e.sum->summands[1].cables.at("a").size() == 3);
	CHECK(sce_text(*e.sum) ==
	      "fsync((ab+ac)*, (ad+ae)*) + fsync((ab+ac)*a, (ad+ae)*a)");
	CHECK(acceptor_equal(sce_acceptor(*e.sum),
	                     regex_over("(a(bd+db)+a(ce+ec))*(1+a)",
	                                e.alphabet)).equal);
}

TEST_CASE("the golden mixing expression file speaks the free language") {
	ExpressionInput e = load_expression(oracle::data_path("mix.sce.txt"));
	REQUIRE(e.sum.has_value());
	REQUIRE(e.sum->summands.size() == 2);
	CHECK(e.sum->summands[0].annotation == Annotation::pairings);
	CHECK(acceptor_equal(
			sce_acceptor(*e.sum),
			regex_over("(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a)",
			           e.alphabet)).equal);
}

TEST_CASE("sum acceptance is the union of the summands") {
	ExpressionInput e = load_expression(oracle::data_path("twin.sce.txt"));
	auto whole = oracle::acceptor_language(sce_acceptor(*e.sum), 4);
	auto first = oracle::acceptor_language(ce_acceptor(e.sum->summands[0]), 4);
	auto second = oracle::acceptor_language(ce_acceptor(e.sum->summands[1]), 4);
	std::set<Word> both = first;
	both.insert(second.begin(), second.end());
	CHECK(whole == both);
}

TEST_CASE("checks demand the matching annotation kind") {
	CHECK_THROWS_AS(check_pairings_wellformed(twin_loop()), PreconditionError);
	CHECK_THROWS_AS(check_equal_choice(twin_loop()), PreconditionError);
	CHECK_THROWS_AS(check_consistent_pairings(twin_loop()), PreconditionError);
	CHECK_THROWS_AS(check_cables_wellformed(mix_loop()), PreconditionError);
	CHECK_THROWS_AS(check_equal_source(mix_loop()), PreconditionError);
	CHECK_THROWS_AS(check_product_derivatives(mix_loop()), PreconditionError);
	CHECK_THROWS_AS(pairings_to_cables(twin_loop()), PreconditionError);
	CHECK_THROWS_AS(cables_to_pairings(mix_loop()), PreconditionError);
}
