#pragma once
// One-bounded labelled Petri nets: firing, reachability, clusters, place
// covers by sequential components, and the structural checks used before
// converting to product systems.

#include "kleenefc/acceptor.hpp"
#include "kleenefc/core.hpp"

namespace kfc {

struct Transition {
	std::string id;
	std::string label;
	std::set<std::string> pre;
	std::set<std::string> post;
};

struct LabelledNet {
	AlphabetPtr alphabet;
	std::vector<std::string> places;
	std::vector<Transition> transitions;

	void validate() const;
	bool has_place(const std::string& p) const;
	const Transition& transition(const std::string& id) const;
	std::set<std::string> pre_places(const std::string& place) const;   // •p, ids
	std::set<std::string> post_places(const std::string& place) const;  // p•, ids
};

using Marking = std::set<std::string>;

struct NetSystem {
	LabelledNet net;
	Marking initial;
	std::vector<Marking> finals;

	void validate() const;
};

bool enabled(const LabelledNet& net, const Marking& m, const Transition& t);
// Fires the transition; throws NotEnabled, and BoundViolation when a token
// would be produced on a still-marked place outside the consumed set.
Marking fire(const LabelledNet& net, const Marking& m, const Transition& t);

struct ReachabilityGraph {
	std::vector<Marking> markings;  // index 0 is the initial marking
	std::map<Marking, int> index;
	// per marking: (transition index, letter, target marking index)
	std::vector<std::vector<std::tuple<int, std::string, int>>> steps;
};

ReachabilityGraph reachability_graph(const NetSystem& sys,
                                     size_t cap = state_cap());

// The reachability graph as an acceptor; accepting states are the declared
// final markings. State names render markings as sorted place sets.
FiniteAcceptor net_acceptor(const NetSystem& sys, size_t cap = state_cap());

std::string marking_text(const Marking& m);

// The cluster of a node: smallest set of places and transitions closed under
// taking pre-places of transitions and output transitions of places. Nodes
// are place names or transition ids; the two share a namespace here and must
// not collide.
std::set<std::string> cluster_of(const LabelledNet& net, const std::string& node);
std::vector<std::set<std::string>> clusters(const LabelledNet& net);

// Free choice: transitions sharing an input place have equal pre-sets.
Verdict check_free_choice(const LabelledNet& net);

// A place cover assigns every location a set of places forming a sequential
// (one-token) component whose transitions are exactly those labelled by that
// location's letters.
struct PlaceCover {
	std::vector<std::set<std::string>> components;
};

struct CoverResult {
	bool ok = false;
	PlaceCover cover;
	std::string reason;
};

CoverResult find_place_cover(const NetSystem& sys);

// Marking-tuple bijection induced by a cover: one marked place per location.
std::vector<std::string> marking_tuple(const Marking& m, const PlaceCover& cover);
Marking tuple_marking(const std::vector<std::string>& tuple,
                      const PlaceCover& cover);

// For one cluster and letter: the per-transition tuples of produced places,
// split by location, and the componentwise recombination of those tuples.
struct ClusterChoice {
	std::set<std::string> cluster_places;
	std::string letter;
	std::vector<std::string> transition_ids;
	std::vector<std::vector<std::string>> post;       // one tuple per transition
	std::vector<std::vector<std::string>> recombined; // componentwise product
};

std::vector<ClusterChoice> cluster_post_analysis(const LabelledNet& net,
                                                 const PlaceCover& cover);

// Distributed choice: each cluster-letter recombination stays within the
// declared post tuples.
Verdict check_distributed_choice(const LabelledNet& net, const PlaceCover& cover);

// Final markings form a product: the set of final tuples equals the product
// of its per-location projections.
Verdict check_finals_product(const NetSystem& sys, const PlaceCover& cover);

// Liveness: from every reachable marking every transition can be enabled
// again somewhere downstream.
Verdict check_net_live(const NetSystem& sys, size_t cap = state_cap());

}  // namespace kfc
