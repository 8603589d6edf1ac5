#pragma once
// Connected expressions: one regular expression per location, fused on the
// shared letters, optionally annotated per global letter with pairings
// (matched partition blocks) or cables (matched ducts) that steer the
// synchronized derivative steps. A sum expression is a finite union.

#include "kleenefc/acceptor.hpp"
#include "kleenefc/core.hpp"
#include "kleenefc/regex.hpp"

namespace kfc {

struct CableDuct {
	Block pre;
	RxSet effects;
};

// One duct per location of the letter, in location order.
using Cable = std::vector<CableDuct>;
// One block per location of the letter, in location order.
using PairingTuple = std::vector<Block>;

enum class Annotation { none, pairings, cables };

struct ConnectedExpression {
	AlphabetPtr alphabet;
	std::vector<RxPtr> parts;  // one per location
	Annotation annotation = Annotation::none;
	std::map<std::string, std::vector<PairingTuple>> pairings;
	std::map<std::string, std::vector<Cable>> cables;

	void validate() const;
};

struct SumExpression {
	AlphabetPtr alphabet;
	std::vector<ConnectedExpression> summands;

	void validate() const;
};

using DerivativeTuple = std::vector<RxPtr>;

// One synchronized derivative step. Local letters derive one part; global
// letters derive all their locations jointly, restricted by cables when the
// expression carries them (pairings never restrict steps).
std::vector<DerivativeTuple> ce_step(const ConnectedExpression& ce,
                                     const DerivativeTuple& t,
                                     const std::string& letter);

std::string derivative_tuple_text(const ConnectedExpression& ce,
                                  const DerivativeTuple& t);

// Acceptor of the reachable derivative tuples; a tuple accepts when every
// part is nullable.
FiniteAcceptor ce_acceptor(const ConnectedExpression& ce,
                           size_t cap = state_cap());
FiniteAcceptor sce_acceptor(const SumExpression& e, size_t cap = state_cap());

std::string ce_text(const ConnectedExpression& ce);
std::string sce_text(const SumExpression& e);

// Pairing shape: for each global letter every partition block of every
// location appears in some tuple, and no block sits in two tuples.
Verdict check_pairings_wellformed(const ConnectedExpression& ce);

// Members of each paired block agree on their initial letter sets, and the
// paired blocks' initial letter sets are equal across each tuple.
Verdict check_equal_choice(const ConnectedExpression& ce);

// Every reachable tuple that can derive a global letter in every location
// has its blocks paired together.
Verdict check_consistent_pairings(const ConnectedExpression& ce,
                                  size_t cap = state_cap());

// Cable shape: every block of every location appears in some cable, and two
// distinct ducts used on the same block have disjoint effects.
Verdict check_cables_wellformed(const ConnectedExpression& ce);

// Cables sharing a pre-block have the same pre-block tuple.
Verdict check_equal_source(const ConnectedExpression& ce);

// Within every group of cables over the same pre-blocks, recombinations of
// the per-location ducts are again cables.
Verdict check_product_derivatives(const ConnectedExpression& ce);

// From every reachable derivative tuple, every letter with a reachable step
// stays fireable somewhere downstream.
Verdict check_action_live(const ConnectedExpression& ce,
                          size_t cap = state_cap());

// Annotation conversions. Pairings become families of single-effect ducts;
// cables collapse to their pre-block tuples.
ConnectedExpression pairings_to_cables(const ConnectedExpression& ce);
ConnectedExpression cables_to_pairings(const ConnectedExpression& ce);

}  // namespace kfc
