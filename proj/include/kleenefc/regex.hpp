#pragma once
// Regular expressions with partial-derivative machinery: normalized syntax
// trees, derivative sets and closures, site partitions, ducts, and the
// bounded bifurcation and funnel checks built on them.

#include "kleenefc/acceptor.hpp"
#include "kleenefc/core.hpp"

namespace kfc {

enum class RxKind { zero, one, letter, sum, cat, star };

struct Rx;
using RxPtr = std::shared_ptr<const Rx>;

// Immutable node. Sums hold at least two distinct children in canonical
// order; concatenations are binary and right-nested; stars hold one child.
struct Rx {
	RxKind kind;
	std::string letter;
	std::vector<RxPtr> parts;
	size_t digest = 0;
};

// Smart constructors. They normalize: units and the empty expression are
// absorbed in concatenations, sums are flattened, deduplicated and sorted
// with empty summands dropped, 0* and 1* collapse to 1.
RxPtr rx_zero();
RxPtr rx_one();
RxPtr rx_letter(const std::string& name);
RxPtr rx_sum(std::vector<RxPtr> parts);
RxPtr rx_cat(RxPtr head, RxPtr tail);
RxPtr rx_star(RxPtr inner);

int rx_compare(const RxPtr& a, const RxPtr& b);
bool rx_equal(const RxPtr& a, const RxPtr& b);
struct RxLess {
	bool operator()(const RxPtr& a, const RxPtr& b) const {
		return rx_compare(a, b) < 0;
	}
};
using RxSet = std::set<RxPtr, RxLess>;

bool nullable(const RxPtr& r);
std::set<std::string> initials(const RxPtr& r);
std::set<std::string> occurring_letters(const RxPtr& r);

std::string rx_text(const RxPtr& r);
// Single-character letters; grammar: 0, 1, letters, juxtaposition, +, *, ().
RxPtr parse_regex(const std::string& text);

// Partial derivative step: the finite set of expressions r' with
// letter-then-r' summing to the letter-prefixed part of r.
RxSet derive(const RxPtr& r, const std::string& letter);
RxSet derive(const RxSet& set, const std::string& letter);
RxSet derive_word(const RxPtr& r, const Word& w);

// Every derivative reachable from r (by nonempty words, plus the root when
// include_root is set). Finite by the partial-derivative bound; the result
// is canonically ordered.
RxSet reachable_derivatives(const RxPtr& r, bool include_root);

// The nondeterministic acceptor whose states are the reachable derivatives.
FiniteAcceptor regex_to_acceptor(const RxPtr& r, AlphabetPtr alphabet);

using Block = RxSet;
using SitePartition = std::vector<Block>;  // blocks ordered by least member

// The a-sites of r: reachable derivatives (root included) that can start
// with the letter.
RxSet sites(const RxPtr& r, const std::string& letter);

// Recursive partition of the a-sites. The construction follows the shape of
// the expression; the result is checked to be a disjoint cover of the exact
// site set and an internal error is raised otherwise.
SitePartition site_partition(const RxPtr& r, const std::string& letter);

std::string block_text(const Block& b);

struct Duct {
	Block pre;
	RxSet effects;  // nonempty subset of derive(pre, letter)
};

// All ducts of all blocks for the letter: every (block, nonempty effect
// subset) pair. Guarded by a cap on the subset count per block.
std::vector<Duct> site_ducts(const RxPtr& r, const std::string& letter,
                             size_t subset_cap = 4096);

// Suggested bound for the bounded checks below.
size_t default_check_bound(const RxPtr& r);

// Bounded check that the block splits the letter-through-the-block part of
// the language into independent prefix and suffix parts: words of length at
// most n factoring as prefix-letter-suffix with both parts witnessed must be
// in the block's through-language.
Verdict check_bifurcates(const RxPtr& r, const std::string& letter,
                         const Block& block, size_t n);

// Same factorization check for one duct: effects restrict the suffix side.
Verdict check_funnels(const RxPtr& r, const std::string& letter,
                      const Block& block, const RxSet& effects, size_t n);

}  // namespace kfc
