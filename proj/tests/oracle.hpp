#pragma once
// Test-only reference implementations, deliberately written from the
// definitions rather than through the library's derivative, reachability or
// determinization machinery, so the two sides can certify each other.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "kleenefc/json_io.hpp"
#include "kleenefc/nets.hpp"
#include "kleenefc/products.hpp"
#include "kleenefc/regex.hpp"

namespace oracle {

using kfc::Word;
using kfc::WordSet;

// Structural membership by splitting the word, memoized on (node, span).
inline bool rx_member(const kfc::RxPtr& r, const Word& w) {
	using Key = std::tuple<const kfc::Rx*, size_t, size_t>;
	std::map<Key, bool> memo;
	auto go = [&](auto&& self, const kfc::RxPtr& e, size_t b, size_t n) -> bool {
		Key key{e.get(), b, n};
		auto it = memo.find(key);
		if (it != memo.end()) return it->second;
		bool out = false;
		switch (e->kind) {
			case kfc::RxKind::zero:
				out = false;
				break;
			case kfc::RxKind::one:
				out = n == 0;
				break;
			case kfc::RxKind::letter:
				out = n == 1 && w[b] == e->letter;
				break;
			case kfc::RxKind::sum:
				for (const auto& p : e->parts)
					if (self(self, p, b, n)) { out = true; break; }
				break;
			case kfc::RxKind::cat:
				for (size_t m = 0; m <= n && !out; ++m)
					out = self(self, e->parts[0], b, m) &&
					      self(self, e->parts[1], b + m, n - m);
				break;
			case kfc::RxKind::star:
				if (n == 0) {
					out = true;
				} else {
					for (size_t m = 1; m <= n && !out; ++m)
						out = self(self, e->parts[0], b, m) &&
						      self(self, e, b + m, n - m);
				}
				break;
		}
		memo[key] = out;
		return out;
	};
	return go(go, r, 0, w.size());
}

inline WordSet rx_language(const kfc::RxPtr& r,
                           const std::vector<std::string>& letters, size_t n) {
	WordSet out;
	std::vector<Word> frontier{Word{}};
	for (size_t len = 0; len <= n; ++len) {
		for (const auto& w : frontier)
			if (rx_member(r, w)) out.insert(w);
		if (len == n) break;
		std::vector<Word> next;
		for (const auto& w : frontier)
			for (const auto& l : letters) {
				Word e = w;
				e.push_back(l);
				next.push_back(std::move(e));
			}
		frontier = std::move(next);
	}
	return out;
}

// Brute-force net language: explore every firing sequence up to the length
// bound, with firing computed straight from the pre and post sets.
inline WordSet net_language(const kfc::NetSystem& sys, size_t n) {
	std::set<kfc::Marking> finals(sys.finals.begin(), sys.finals.end());
	WordSet out;
	std::vector<std::pair<kfc::Marking, Word>> frontier{{sys.initial, {}}};
	for (size_t len = 0; len <= n; ++len) {
		std::set<std::pair<kfc::Marking, Word>> next;
		for (const auto& [m, w] : frontier) {
			if (finals.count(m)) out.insert(w);
			if (len == n) continue;
			for (const auto& t : sys.net.transitions) {
				bool en = true;
				for (const auto& p : t.pre)
					if (!m.count(p)) { en = false; break; }
				if (!en) continue;
				kfc::Marking m2 = m;
				for (const auto& p : t.pre) m2.erase(p);
				for (const auto& p : t.post) m2.insert(p);
				Word w2 = w;
				w2.push_back(t.label);
				next.insert({std::move(m2), std::move(w2)});
			}
		}
		if (len == n) break;
		frontier.assign(next.begin(), next.end());
	}
	return out;
}

// Brute-force product-system language: tuples step by the globals lists when
// present, otherwise by every combination of enabled per-location moves.
inline WordSet ps_language(const kfc::ProductSystem& ps, size_t n) {
	const auto& alphabet = *ps.alphabet;
	auto accepts = [&](const kfc::StateTuple& t) {
		if (ps.acceptance == kfc::Acceptance::subset) {
			for (const auto& f : ps.finals)
				if (f == t) return true;
			return false;
		}
		for (size_t i = 0; i < t.size(); ++i)
			if (!ps.components[i].finals.count(t[i])) return false;
		return true;
	};
	auto successors = [&](const kfc::StateTuple& t, const std::string& letter) {
		std::set<kfc::StateTuple> out;
		const auto& locs = alphabet.locations(letter);
		bool use_globals = locs.size() > 1 && ps.globals &&
		                   ps.globals->count(letter);
		if (use_globals) {
			for (const auto& gm : ps.globals->at(letter)) {
				bool ok = true;
				for (size_t pos = 0; pos < locs.size(); ++pos)
					if (gm[pos].from != t[locs[pos]]) ok = false;
				if (!ok) continue;
				kfc::StateTuple t2 = t;
				for (size_t pos = 0; pos < locs.size(); ++pos)
					t2[locs[pos]] = gm[pos].to;
				out.insert(t2);
			}
			return out;
		}
		std::vector<std::vector<std::string>> targets(locs.size());
		for (size_t pos = 0; pos < locs.size(); ++pos)
			for (const auto& mv : ps.components[locs[pos]].moves)
				if (mv.letter == letter && mv.from == t[locs[pos]])
					targets[pos].push_back(mv.to);
		for (const auto& tg : targets)
			if (tg.empty()) return out;
		std::vector<size_t> pick(locs.size(), 0);
		while (true) {
			kfc::StateTuple t2 = t;
			for (size_t pos = 0; pos < locs.size(); ++pos)
				t2[locs[pos]] = targets[pos][pick[pos]];
			out.insert(t2);
			size_t pos = 0;
			while (pos < locs.size() && ++pick[pos] == targets[pos].size())
				pick[pos++] = 0;
			if (pos == locs.size()) break;
		}
		return out;
	};
	WordSet out;
	std::set<std::pair<kfc::StateTuple, Word>> frontier;
	for (const auto& t : ps.initials) frontier.insert({t, {}});
	for (size_t len = 0; len <= n; ++len) {
		std::set<std::pair<kfc::StateTuple, Word>> next;
		for (const auto& [t, w] : frontier) {
			if (accepts(t)) out.insert(w);
			if (len == n) continue;
			for (const auto& letter : alphabet.letters)
				for (const auto& t2 : successors(t, letter)) {
					Word w2 = w;
					w2.push_back(letter);
					next.insert({t2, std::move(w2)});
				}
		}
		if (len == n) break;
		frontier = std::move(next);
	}
	return out;
}

// NFA language by stepping state sets directly on the stored edges.
inline WordSet acceptor_language(const kfc::FiniteAcceptor& a, size_t n) {
	auto accepts = [&](const std::set<int>& states) {
		for (int s : states)
			if (a.accepting[s]) return true;
		return false;
	};
	WordSet out;
	std::vector<std::pair<std::set<int>, Word>> frontier{
			{{a.initial}, Word{}}};
	for (size_t len = 0; len <= n; ++len) {
		std::vector<std::pair<std::set<int>, Word>> next;
		for (const auto& [states, w] : frontier) {
			if (accepts(states)) out.insert(w);
			if (len == n) continue;
			for (const auto& letter : a.alphabet->letters) {
				std::set<int> to;
				for (int s : states) {
					auto it = a.edges[s].find(letter);
					if (it == a.edges[s].end()) continue;
					to.insert(it->second.begin(), it->second.end());
				}
				if (to.empty()) continue;
				Word w2 = w;
				w2.push_back(letter);
				next.push_back({std::move(to), std::move(w2)});
			}
		}
		if (len == n) break;
		frontier = std::move(next);
	}
	return out;
}

inline Word proj(const Word& w, const kfc::DistributedAlphabet& alphabet,
                    int location) {
	std::set<std::string> mine(alphabet.components[location].begin(),
	                           alphabet.components[location].end());
	Word out;
	for (const auto& l : w)
		if (mine.count(l)) out.push_back(l);
	return out;
}

// Every word of length at most n whose projections all lie in the
// corresponding location's word set.
inline WordSet shuffle_words(const std::vector<WordSet>& locals,
                             const kfc::DistributedAlphabet& alphabet,
                             size_t n) {
	std::vector<WordSet> projected(alphabet.width());
	for (size_t i = 0; i < alphabet.width(); ++i) projected[i] = locals[i];
	WordSet out;
	std::vector<Word> frontier{Word{}};
	for (size_t len = 0; len <= n; ++len) {
		for (const auto& w : frontier) {
			bool ok = true;
			for (size_t i = 0; i < alphabet.width() && ok; ++i)
				ok = projected[i].count(proj(w, alphabet, (int)i)) > 0;
			if (ok) out.insert(w);
		}
		if (len == n) break;
		std::vector<Word> next;
		for (const auto& w : frontier)
			for (const auto& l : alphabet.letters) {
				Word e = w;
				e.push_back(l);
				next.push_back(std::move(e));
			}
		frontier = std::move(next);
	}
	return out;
}

// Recombination closure from the definitions: E is the bounded language, C
// the words whose projections match projections of E members.
inline std::optional<Word> closure_counterexample(
		const kfc::FiniteAcceptor& a, size_t n) {
	WordSet e = acceptor_language(a, n);
	std::vector<WordSet> projections(a.alphabet->width());
	for (const auto& w : e)
		for (size_t i = 0; i < a.alphabet->width(); ++i)
			projections[i].insert(proj(w, *a.alphabet, (int)i));
	WordSet c = shuffle_words(projections, *a.alphabet, n);
	std::vector<Word> gap;
	for (const auto& w : c)
		if (!e.count(w)) gap.push_back(w);
	if (gap.empty()) return std::nullopt;
	std::sort(gap.begin(), gap.end(), kfc::shortlex_less);
	return gap.front();
}

inline Word make_word(const std::string& compact) {
	Word w;
	for (char c : compact) w.push_back(std::string(1, c));
	return w;
}

inline WordSet make_words(const std::vector<std::string>& compact) {
	WordSet out;
	for (const auto& s : compact) out.insert(make_word(s));
	return out;
}

inline std::string data_path(const std::string& name) {
	return std::string(KLEENEFC_DATA_DIR) + "/" + name;
}

}  // namespace oracle
