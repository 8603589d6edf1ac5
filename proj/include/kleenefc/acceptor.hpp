#pragma once
// Finite word acceptors over distributed alphabets, plus the exact
// equivalence and bounded enumeration operations every conversion in the
// library is certified against.

#include "kleenefc/core.hpp"

namespace kfc {

// A nondeterministic acceptor with one initial state. Letters live in the
// attached alphabet; the distribution only matters for projections and the
// recombination-closure check.
struct FiniteAcceptor {
	AlphabetPtr alphabet;
	std::vector<std::string> names;
	std::vector<bool> accepting;
	std::vector<std::map<std::string, std::vector<int>>> edges;
	int initial = 0;

	int add_state(const std::string& name, bool acc);
	void add_edge(int from, const std::string& letter, int to);
	size_t size() const { return names.size(); }
	void validate() const;
};

FiniteAcceptor determinize(const FiniteAcceptor& a, size_t cap = state_cap());

struct LanguageComparison {
	bool equal = true;
	std::optional<Word> witness;   // shortlex-least word in exactly one language
	bool witness_in_first = false;
};

LanguageComparison acceptor_equal(const FiniteAcceptor& a,
                                  const FiniteAcceptor& b,
                                  size_t cap = state_cap());

// True when Lang(a) is contained in Lang(b); otherwise returns the
// shortlex-least word of Lang(a) \ Lang(b).
LanguageComparison acceptor_subset(const FiniteAcceptor& a,
                                   const FiniteAcceptor& b,
                                   size_t cap = state_cap());

// All accepted words of length at most n, shortlex sorted.
std::vector<Word> acceptor_language_bounded(const FiniteAcceptor& a, size_t n,
                                            size_t cap = state_cap());

// Bounded synchronized shuffle: words over the full alphabet, length at most
// n, whose projection to every location lies in that location's word set.
// The second overload runs on per-location acceptors instead; the two paths
// agree and are cross-checked in the tests.
std::vector<Word> shuffle_bounded(const std::vector<WordSet>& locals,
                                  const DistributedAlphabet& alphabet, size_t n);
std::vector<Word> shuffle_bounded(const std::vector<FiniteAcceptor>& locals,
                                  const DistributedAlphabet& alphabet, size_t n,
                                  size_t cap = state_cap());

struct ClosureCheck {
	bool closed = true;
	std::optional<Word> counterexample;
};

// Bounded recombination-closure check: E = Lang(a) restricted to length at
// most n; a word w of length at most n whose every projection matches the
// projection of some word of E must itself be in E. Reports the
// shortlex-least offender.
ClosureCheck direct_product_closure(const FiniteAcceptor& a, size_t n,
                                    size_t cap = state_cap());

// Renames states canonically (sorted by name) and drops unreachable states;
// used for isomorphism-style comparisons in tests.
FiniteAcceptor canonical_form(const FiniteAcceptor& a);

}  // namespace kfc
