#pragma once
// Product systems over a distributed alphabet: one sequential component per
// location, synchronizing on shared letters, with optional matching or
// global-move annotations and two acceptance modes.

#include "kleenefc/acceptor.hpp"
#include "kleenefc/core.hpp"

namespace kfc {

struct LocalMove {
	std::string from;
	std::string letter;
	std::string to;
	auto operator<=>(const LocalMove&) const = default;
};

struct SequentialComponent {
	std::vector<std::string> states;
	std::vector<std::string> initials;  // singleton except in combined systems
	std::set<std::string> finals;
	std::vector<LocalMove> moves;

	bool has_state(const std::string& s) const;
	std::vector<LocalMove> moves_from(const std::string& s) const;
	std::vector<LocalMove> moves_on(const std::string& letter) const;
	std::set<std::string> labels_from(const std::string& s) const;
};

enum class Acceptance { product, subset };

using StateTuple = std::vector<std::string>;
// One local move per location of the letter, in location order.
using GlobalMove = std::vector<LocalMove>;

struct ProductSystem {
	AlphabetPtr alphabet;
	std::vector<SequentialComponent> components;
	Acceptance acceptance = Acceptance::product;
	std::vector<StateTuple> finals;    // used in subset mode
	std::vector<StateTuple> initials;  // at least one tuple
	// Optional annotations, kept for global letters only. A matching lists
	// the state tuples from which the letter may fire jointly; globals list
	// the joint moves themselves.
	std::optional<std::map<std::string, std::vector<StateTuple>>> matchings;
	std::optional<std::map<std::string, std::vector<GlobalMove>>> globals;

	void validate() const;
	bool accepting_tuple(const StateTuple& t) const;
	// All joint moves of a global letter: the globals annotation when
	// present, otherwise every combination of per-location moves.
	std::vector<GlobalMove> joint_moves(const std::string& letter) const;
};

std::string tuple_name(const StateTuple& t);

// The synchronized run graph as an acceptor. Multiple initial tuples are
// realized by a synthetic start state copying their outgoing edges.
FiniteAcceptor run_graph(const ProductSystem& ps, size_t cap = state_cap());

// Per-location acceptor of one component (its own letters only).
FiniteAcceptor component_acceptor(const ProductSystem& ps, int location,
                                  size_t cap = state_cap());

// Matching shape: for each global letter, the matched tuples project onto
// exactly the letter-enabled states of every location, and no state sits in
// two tuples.
Verdict check_matchings_wellformed(const ProductSystem& ps);

// Matched states offer the same letter sets.
Verdict check_conflict_equivalent(const ProductSystem& ps);

// Every reachable tuple that enables a global letter in every location
// projects into the letter's matching.
Verdict check_consistent_matchings(const ProductSystem& ps,
                                   size_t cap = state_cap());

// Two joint moves whose source-state sets meet have equal source-state sets
// (states tagged by location).
Verdict check_same_source(const ProductSystem& ps);

struct Compartment {
	std::string letter;
	std::set<std::pair<int, std::string>> sources;  // location-tagged states
	std::vector<GlobalMove> moves;
};
std::vector<Compartment> compartments(const ProductSystem& ps);

// Within every compartment the recombinations of per-location targets are
// all present as joint moves.
Verdict check_product_moves(const ProductSystem& ps);

// From every reachable tuple every joint move can be brought back to its
// source tuple and fired.
Verdict check_ps_live(const ProductSystem& ps, size_t cap = state_cap());

// Splits a subset-acceptance system into one product-acceptance system per
// final tuple.
std::vector<ProductSystem> decompose_union(const ProductSystem& ps);

// Disjoint union of systems over the same alphabet into one subset-
// acceptance system; summand j's states are tagged "j:".
ProductSystem union_combine(const std::vector<ProductSystem>& parts);

// Replaces the globals annotation by the matching of source tuples.
ProductSystem matchings_from_globals(const ProductSystem& ps);

// Replaces the matching annotation by all joint moves over matched tuples.
ProductSystem globals_from_matchings(const ProductSystem& ps);

}  // namespace kfc
