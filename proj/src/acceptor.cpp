#include "kleenefc/acceptor.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace kfc {

int FiniteAcceptor::add_state(const std::string& name, bool acc) {
	names.push_back(name);
	accepting.push_back(acc);
	edges.emplace_back();
	return static_cast<int>(names.size()) - 1;
}

void FiniteAcceptor::add_edge(int from, const std::string& letter, int to) {
	auto& targets = edges.at(from)[letter];
	auto it = std::lower_bound(targets.begin(), targets.end(), to);
	if (it == targets.end() || *it != to) targets.insert(it, to);
}

void FiniteAcceptor::validate() const {
	if (!alphabet) throw ValidationError("acceptor has no alphabet");
	if (names.size() != accepting.size() || names.size() != edges.size())
		throw ValidationError("acceptor table sizes disagree");
	if (names.empty()) throw ValidationError("acceptor has no states");
	if (initial < 0 || static_cast<size_t>(initial) >= names.size())
		throw ValidationError("acceptor initial state out of range");
	for (const auto& row : edges) {
		for (const auto& [letter, targets] : row) {
			if (!alphabet->has(letter))
				throw ValidationError("acceptor edge letter not in alphabet: " + letter);
			for (int t : targets)
				if (t < 0 || static_cast<size_t>(t) >= names.size())
					throw ValidationError("acceptor edge target out of range");
		}
	}
}

namespace {

std::string subset_name(const FiniteAcceptor& a, const std::vector<int>& subset) {
	std::string out = "{";
	for (size_t i = 0; i < subset.size(); ++i) {
		if (i) out += ",";
		out += a.names[subset[i]];
	}
	out += "}";
	return out;
}

}  // namespace

FiniteAcceptor determinize(const FiniteAcceptor& a, size_t cap) {
	a.validate();
	FiniteAcceptor d;
	d.alphabet = a.alphabet;
	std::map<std::vector<int>, int> index;
	std::deque<std::vector<int>> work;

	auto intern = [&](const std::vector<int>& subset) {
		auto it = index.find(subset);
		if (it != index.end()) return it->second;
		if (d.size() >= cap)
			throw ExplorationLimit("determinization exceeded the state cap of " +
			                       std::to_string(cap));
		bool acc = false;
		for (int s : subset) acc = acc || a.accepting[s];
		int id = d.add_state(subset_name(a, subset), acc);
		index.emplace(subset, id);
		work.push_back(subset);
		return id;
	};

	intern({a.initial});
	while (!work.empty()) {
		std::vector<int> subset = work.front();
		work.pop_front();
		int from = index.at(subset);
		for (const auto& letter : a.alphabet->letters) {
			std::set<int> next;
			for (int s : subset) {
				auto it = a.edges[s].find(letter);
				if (it == a.edges[s].end()) continue;
				next.insert(it->second.begin(), it->second.end());
			}
			std::vector<int> nv(next.begin(), next.end());
			int to = intern(nv);
			d.add_edge(from, letter, to);
		}
	}
	return d;
}

namespace {

// Complete DFA over an explicit letter list, with a guaranteed sink row.
struct Dfa {
	std::vector<bool> accepting;
	std::vector<std::vector<int>> step;  // [state][letter index]
	int initial = 0;
};

Dfa determinize_over(const FiniteAcceptor& a,
                     const std::vector<std::string>& letters, size_t cap) {
	a.validate();
	Dfa d;
	std::map<std::vector<int>, int> index;
	std::deque<std::vector<int>> work;

	auto intern = [&](const std::vector<int>& subset) {
		auto it = index.find(subset);
		if (it != index.end()) return it->second;
		if (d.accepting.size() >= cap)
			throw ExplorationLimit("determinization exceeded the state cap of " +
			                       std::to_string(cap));
		bool acc = false;
		for (int s : subset) acc = acc || a.accepting[s];
		d.accepting.push_back(acc);
		d.step.emplace_back(letters.size(), -1);
		int id = static_cast<int>(d.accepting.size()) - 1;
		index.emplace(subset, id);
		work.push_back(subset);
		return id;
	};

	intern({a.initial});
	while (!work.empty()) {
		std::vector<int> subset = work.front();
		work.pop_front();
		int from = index.at(subset);
		for (size_t li = 0; li < letters.size(); ++li) {
			std::set<int> next;
			for (int s : subset) {
				auto it = a.edges[s].find(letters[li]);
				if (it == a.edges[s].end()) continue;
				next.insert(it->second.begin(), it->second.end());
			}
			std::vector<int> nv(next.begin(), next.end());
			d.step[from][li] = intern(nv);
		}
	}
	return d;
}

std::vector<std::string> letter_union(const FiniteAcceptor& a,
                                      const FiniteAcceptor& b) {
	std::set<std::string> all(a.alphabet->letters.begin(),
	                          a.alphabet->letters.end());
	all.insert(b.alphabet->letters.begin(), b.alphabet->letters.end());
	return {all.begin(), all.end()};
}

// Product-DFA search for the shortlex-least word on which `bad` holds.
LanguageComparison product_search(
		const FiniteAcceptor& a, const FiniteAcceptor& b, size_t cap,
		const std::function<bool(bool, bool)>& bad) {
	std::vector<std::string> letters = letter_union(a, b);
	Dfa da = determinize_over(a, letters, cap);
	Dfa db = determinize_over(b, letters, cap);

	struct Node {
		int pa, pb;
		int parent;
		int letter;
	};
	std::vector<Node> nodes;
	std::map<std::pair<int, int>, int> seen;
	std::deque<int> queue;

	auto emit = [&](int at) {
		Word w;
		for (int cur = at; nodes[cur].parent >= 0; cur = nodes[cur].parent)
			w.push_back(letters[nodes[cur].letter]);
		std::reverse(w.begin(), w.end());
		LanguageComparison r;
		r.equal = false;
		r.witness = w;
		r.witness_in_first = da.accepting[nodes[at].pa];
		return r;
	};

	nodes.push_back({da.initial, db.initial, -1, -1});
	seen.emplace(std::make_pair(da.initial, db.initial), 0);
	if (bad(da.accepting[da.initial], db.accepting[db.initial])) return emit(0);
	queue.push_back(0);

	while (!queue.empty()) {
		int cur = queue.front();
		queue.pop_front();
		for (size_t li = 0; li < letters.size(); ++li) {
			int na = da.step[nodes[cur].pa][li];
			int nb = db.step[nodes[cur].pb][li];
			auto key = std::make_pair(na, nb);
			if (seen.count(key)) continue;
			int id = static_cast<int>(nodes.size());
			nodes.push_back({na, nb, cur, static_cast<int>(li)});
			seen.emplace(key, id);
			if (bad(da.accepting[na], db.accepting[nb])) return emit(id);
			queue.push_back(id);
		}
	}
	return LanguageComparison{};
}

}  // namespace

LanguageComparison acceptor_equal(const FiniteAcceptor& a,
                                  const FiniteAcceptor& b, size_t cap) {
	return product_search(a, b, cap,
	                      [](bool xa, bool xb) { return xa != xb; });
}

LanguageComparison acceptor_subset(const FiniteAcceptor& a,
                                   const FiniteAcceptor& b, size_t cap) {
	return product_search(a, b, cap,
	                      [](bool xa, bool xb) { return xa && !xb; });
}

std::vector<Word> acceptor_language_bounded(const FiniteAcceptor& a, size_t n,
                                            size_t cap) {
	a.validate();
	(void)cap;
	std::vector<Word> out;
	Word current;
	std::set<int> start{a.initial};

	std::function<void(const std::set<int>&)> walk =
			[&](const std::set<int>& states) {
				bool acc = false;
				for (int s : states) acc = acc || a.accepting[s];
				if (acc) out.push_back(current);
				if (current.size() == n) return;
				for (const auto& letter : a.alphabet->letters) {
					std::set<int> next;
					for (int s : states) {
						auto it = a.edges[s].find(letter);
						if (it == a.edges[s].end()) continue;
						next.insert(it->second.begin(), it->second.end());
					}
					if (next.empty()) continue;
					current.push_back(letter);
					walk(next);
					current.pop_back();
				}
			};
	walk(start);
	std::sort(out.begin(), out.end(), shortlex_less);
	return out;
}

std::vector<Word> shuffle_bounded(const std::vector<WordSet>& locals,
                                  const DistributedAlphabet& alphabet,
                                  size_t n) {
	if (locals.size() != alphabet.width())
		throw ValidationError("one word set per location is required");
	std::vector<WordSet> prefixes(locals.size());
	for (size_t i = 0; i < locals.size(); ++i) {
		for (const auto& w : locals[i]) {
			for (size_t len = 0; len <= w.size(); ++len)
				prefixes[i].insert(Word(w.begin(), w.begin() + len));
		}
	}

	std::vector<Word> out;
	Word current;
	std::vector<Word> proj(locals.size());

	std::function<void()> walk = [&]() {
		bool member = true;
		for (size_t i = 0; i < locals.size(); ++i)
			member = member && locals[i].count(proj[i]);
		if (member) out.push_back(current);
		if (current.size() == n) return;
		for (const auto& letter : alphabet.letters) {
			const auto& locs = alphabet.locations(letter);
			bool viable = true;
			for (int i : locs) {
				proj[i].push_back(letter);
				if (!prefixes[i].count(proj[i])) viable = false;
			}
			if (viable) {
				current.push_back(letter);
				walk();
				current.pop_back();
			}
			for (int i : locs) proj[i].pop_back();
		}
	};
	walk();
	std::sort(out.begin(), out.end(), shortlex_less);
	return out;
}

std::vector<Word> shuffle_bounded(const std::vector<FiniteAcceptor>& locals,
                                  const DistributedAlphabet& alphabet, size_t n,
                                  size_t cap) {
	if (locals.size() != alphabet.width())
		throw ValidationError("one acceptor per location is required");
	std::vector<Dfa> dfas;
	for (size_t i = 0; i < locals.size(); ++i)
		dfas.push_back(determinize_over(locals[i], alphabet.components[i], cap));

	FiniteAcceptor product;
	product.alphabet =
			std::make_shared<const DistributedAlphabet>(alphabet);
	std::map<std::vector<int>, int> index;
	std::deque<std::vector<int>> work;

	auto intern = [&](const std::vector<int>& tuple) {
		auto it = index.find(tuple);
		if (it != index.end()) return it->second;
		if (product.size() >= cap)
			throw ExplorationLimit("shuffle product exceeded the state cap of " +
			                       std::to_string(cap));
		bool acc = true;
		for (size_t i = 0; i < tuple.size(); ++i)
			acc = acc && dfas[i].accepting[tuple[i]];
		std::string name = "(";
		for (size_t i = 0; i < tuple.size(); ++i) {
			if (i) name += ",";
			name += std::to_string(tuple[i]);
		}
		name += ")";
		int id = product.add_state(name, acc);
		index.emplace(tuple, id);
		work.push_back(tuple);
		return id;
	};

	std::vector<int> start(locals.size());
	for (size_t i = 0; i < locals.size(); ++i) start[i] = dfas[i].initial;
	intern(start);
	while (!work.empty()) {
		std::vector<int> tuple = work.front();
		work.pop_front();
		int from = index.at(tuple);
		for (const auto& letter : alphabet.letters) {
			std::vector<int> next = tuple;
			for (int i : alphabet.locations(letter)) {
				const auto& comp = alphabet.components[i];
				size_t li = std::lower_bound(comp.begin(), comp.end(), letter) -
				            comp.begin();
				next[i] = dfas[i].step[tuple[i]][li];
			}
			product.add_edge(from, letter, intern(next));
		}
	}
	return acceptor_language_bounded(product, n, cap);
}

ClosureCheck direct_product_closure(const FiniteAcceptor& a, size_t n,
                                    size_t cap) {
	std::vector<Word> bounded = acceptor_language_bounded(a, n, cap);
	WordSet accepted(bounded.begin(), bounded.end());

	const DistributedAlphabet& alphabet = *a.alphabet;
	std::vector<WordSet> proj(alphabet.width());
	for (const auto& w : bounded)
		for (size_t i = 0; i < alphabet.width(); ++i)
			proj[i].insert(project(w, alphabet, static_cast<int>(i)));

	std::vector<Word> closure = shuffle_bounded(proj, alphabet, n);
	ClosureCheck r;
	for (const auto& w : closure) {
		if (!accepted.count(w)) {
			r.closed = false;
			r.counterexample = w;
			return r;
		}
	}
	return r;
}

FiniteAcceptor canonical_form(const FiniteAcceptor& a) {
	a.validate();
	std::vector<bool> reach(a.size(), false);
	std::deque<int> work{a.initial};
	reach[a.initial] = true;
	while (!work.empty()) {
		int s = work.front();
		work.pop_front();
		for (const auto& [letter, targets] : a.edges[s])
			for (int t : targets)
				if (!reach[t]) {
					reach[t] = true;
					work.push_back(t);
				}
	}
	std::vector<int> order;
	for (size_t s = 0; s < a.size(); ++s)
		if (reach[s]) order.push_back(static_cast<int>(s));
	std::sort(order.begin(), order.end(), [&](int x, int y) {
		if (a.names[x] != a.names[y]) return a.names[x] < a.names[y];
		return x < y;
	});
	std::vector<int> remap(a.size(), -1);
	FiniteAcceptor out;
	out.alphabet = a.alphabet;
	for (int s : order) remap[s] = out.add_state(a.names[s], a.accepting[s]);
	out.initial = remap[a.initial];
	for (int s : order)
		for (const auto& [letter, targets] : a.edges[s])
			for (int t : targets) out.add_edge(remap[s], letter, remap[t]);
	return out;
}

}  // namespace kfc
