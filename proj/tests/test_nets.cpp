// Net semantics: firing, reachability, clusters, place covers and the
// structural checks, against oracles and the paired-choice golden systems.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kleenefc/json_io.hpp"
#include "kleenefc/nets.hpp"
#include "kleenefc/regex.hpp"
#include "oracle.hpp"

using namespace kfc;

namespace {

NetSystem twin() { return load_net(oracle::data_path("twin.net.json")); }
NetSystem mix() { return load_net(oracle::data_path("mix.net.json")); }

// Two letters, one shared place feeding both transitions plus a private
// second input for one of them: not free choice.
NetSystem skewed() {
	NetSystem sys;
	sys.net.alphabet = make_alphabet({{"a", "b"}});
	sys.net.places = {"p", "q", "r"};
	sys.net.transitions = {
			{"t1", "a", {"p"}, {"r"}},
			{"t2", "b", {"p", "q"}, {"r", "q"}},
	};
	sys.initial = {"p", "q"};
	sys.finals = {{"r", "q"}};
	return sys;
}

}  // namespace

TEST_CASE("validation catches malformed nets") {
	NetSystem sys = twin();
	CHECK_NOTHROW(sys.validate());

	NetSystem bad = twin();
	bad.net.transitions[0].pre.insert("nowhere");
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = twin();
	bad.net.transitions[1].id = "t1";
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = twin();
	bad.net.transitions[0].label = "z";
	CHECK_THROWS_AS(bad.validate(), ValidationError);

	bad = twin();
	bad.initial.insert("ghost");
	CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("firing consumes and produces exactly the declared tokens") {
	NetSystem sys = twin();
	const Transition& t1 = sys.net.transition("t1");
	CHECK(enabled(sys.net, sys.initial, t1));
	Marking after = fire(sys.net, sys.initial, t1);
	CHECK(after == Marking{"r2", "s2"});
	const Transition& t3 = sys.net.transition("t3");
	CHECK_FALSE(enabled(sys.net, sys.initial, t3));
	CHECK_THROWS_AS(fire(sys.net, sys.initial, t3), NotEnabled);
}

TEST_CASE("firing onto a marked place violates the bound") {
	NetSystem sys;
	sys.net.alphabet = make_alphabet({{"a"}});
	sys.net.places = {"p", "q"};
	sys.net.transitions = {{"t", "a", {"p"}, {"q"}}};
	sys.initial = {"p", "q"};
	sys.finals = {};
	CHECK_THROWS_AS(fire(sys.net, sys.initial, sys.net.transitions[0]),
	                BoundViolation);
}

TEST_CASE("reachability graph of the twin system has seven markings") {
	ReachabilityGraph g = reachability_graph(twin());
	CHECK(g.markings.size() == 7);
	CHECK(g.markings[0] == twin().initial);
	for (const auto& [m, id] : g.index) CHECK(g.markings[id] == m);
}

TEST_CASE("net language matches the brute-force firing oracle") {
	for (const auto& name : {"twin.net.json", "twin_product.net.json",
	                         "mix.net.json", "mix_product.net.json"}) {
		NetSystem sys = load_net(oracle::data_path(name));
		FiniteAcceptor acc = net_acceptor(sys);
		REQUIRE_MESSAGE(oracle::acceptor_language(acc, 5) ==
		                oracle::net_language(sys, 5), "net ", name);
	}
}

TEST_CASE("twin and mix nets denote the paired and mixed languages") {
	auto check_net = [](const std::string& file, const std::string& regex) {
		NetSystem sys = load_net(oracle::data_path(file));
		FiniteAcceptor net = net_acceptor(sys);
		FiniteAcceptor rx = regex_to_acceptor(parse_regex(regex), sys.net.alphabet);
		LanguageComparison cmp = acceptor_equal(net, rx);
		REQUIRE_MESSAGE(cmp.equal, file, " differs from ", regex, " at ",
		                word_text(*cmp.witness));
	};
	check_net("twin.net.json", "(a(bd+db)+a(ce+ec))*(1+a)");
	check_net("twin_product.net.json", "(a(bd+db)+a(ce+ec))*(1+a+ab+ad)");
	check_net("mix.net.json",
	          "(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a)");
	check_net("mix_product.net.json",
	          "(a(bd+db)+a(be+eb)+a(cd+dc)+a(ce+ec))*(1+a+ab+ac+ad+ae)");
}

TEST_CASE("twin words up to length three") {
	FiniteAcceptor acc = net_acceptor(twin());
	auto words = acceptor_language_bounded(acc, 3);
	std::vector<Word> want{{}, oracle::make_word("a"), oracle::make_word("abd"),
	                       oracle::make_word("ace"), oracle::make_word("adb"),
	                       oracle::make_word("aec")};
	CHECK(words == want);
}

TEST_CASE("clusters partition the nodes and group borrowed choices") {
	NetSystem sys = twin();
	auto c = cluster_of(sys.net, "t1");
	CHECK(c == std::set<std::string>{"r1", "s1", "t1", "t2"});
	CHECK(cluster_of(sys.net, "r1") == c);
	auto all = clusters(sys.net);
	std::set<std::string> seen;
	size_t total = 0;
	for (const auto& cl : all) {
		for (const auto& node : cl) CHECK(seen.insert(node).second);
		total += cl.size();
	}
	CHECK(total == sys.net.places.size() + sys.net.transitions.size());
}

TEST_CASE("free choice holds for the golden nets and fails for shared input") {
	CHECK(check_free_choice(twin().net).ok);
	CHECK(check_free_choice(mix().net).ok);
	Verdict v = check_free_choice(skewed().net);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("p") != std::string::npos);
}

TEST_CASE("place cover splits the twin net by location") {
	CoverResult cover = find_place_cover(twin());
	REQUIRE(cover.ok);
	REQUIRE(cover.cover.components.size() == 2);
	CHECK(cover.cover.components[0] == std::set<std::string>{"r1", "r2", "r3"});
	CHECK(cover.cover.components[1] == std::set<std::string>{"s1", "s2", "s3"});
}

TEST_CASE("place cover fails when a location has no transitions") {
	NetSystem sys = twin();
	sys.net.alphabet = make_alphabet({{"a", "b", "c"}, {"a", "d", "e"}, {"z"}});
	CoverResult cover = find_place_cover(sys);
	CHECK_FALSE(cover.ok);
	CHECK_FALSE(cover.reason.empty());
}

TEST_CASE("marking and tuple views are inverse on reachable markings") {
	NetSystem sys = twin();
	CoverResult cover = find_place_cover(sys);
	REQUIRE(cover.ok);
	ReachabilityGraph g = reachability_graph(sys);
	for (const auto& m : g.markings) {
		auto t = marking_tuple(m, cover.cover);
		REQUIRE(t.size() == 2);
		CHECK(tuple_marking(t, cover.cover) == m);
	}
}

TEST_CASE("the twin net offers choices that do not recombine") {
	NetSystem sys = twin();
	CoverResult cover = find_place_cover(sys);
	REQUIRE(cover.ok);
	Verdict v = check_distributed_choice(sys.net, cover.cover);
	REQUIRE_FALSE(v.ok);
	bool named = v.reason.find("(r2,s3)") != std::string::npos ||
	             v.reason.find("(r3,s2)") != std::string::npos;
	CHECK(named);
}

TEST_CASE("the mixing net recombines every choice") {
	NetSystem sys = mix();
	CoverResult cover = find_place_cover(sys);
	REQUIRE(cover.ok);
	CHECK(check_distributed_choice(sys.net, cover.cover).ok);
	auto analysis = cluster_post_analysis(sys.net, cover.cover);
	bool found = false;
	for (const auto& choice : analysis) {
		if (choice.letter != "a") continue;
		found = true;
		CHECK(choice.transition_ids.size() == 4);
		CHECK(choice.post.size() == 4);
		CHECK(choice.recombined.size() == 4);
	}
	CHECK(found);
}

TEST_CASE("final markings of the product variants form products") {
	auto check_sys = [](const std::string& file, bool want) {
		NetSystem sys = load_net(oracle::data_path(file));
		CoverResult cover = find_place_cover(sys);
		REQUIRE(cover.ok);
		Verdict v = check_finals_product(sys, cover.cover);
		CHECK_MESSAGE(v.ok == want, file, ": ", v.reason);
	};
	check_sys("twin.net.json", false);
	check_sys("twin_product.net.json", true);
	check_sys("mix.net.json", false);
	check_sys("mix_product.net.json", true);
}

TEST_CASE("liveness holds for the golden nets and fails with a dead label") {
	CHECK(check_net_live(twin()).ok);
	CHECK(check_net_live(mix()).ok);
	NetSystem sys = twin();
	sys.net.places.push_back("x");
	sys.net.transitions.push_back({"t9", "b", {"x"}, {"x"}});
	Verdict v = check_net_live(sys);
	REQUIRE_FALSE(v.ok);
	CHECK(v.reason.find("t9") != std::string::npos);
}
