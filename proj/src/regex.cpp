#include "kleenefc/regex.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>

namespace kfc {

namespace {

size_t mix(size_t h, size_t v) {
	h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
	return h;
}

RxPtr make_node(RxKind kind, std::string letter, std::vector<RxPtr> parts) {
	auto node = std::make_shared<Rx>();
	node->kind = kind;
	node->letter = std::move(letter);
	node->parts = std::move(parts);
	size_t h = static_cast<size_t>(kind) + 0x51ull;
	h = mix(h, fnv1a(node->letter));
	for (const auto& p : node->parts) h = mix(h, p->digest);
	node->digest = h;
	return node;
}

}  // namespace

RxPtr rx_zero() {
	static const RxPtr z = make_node(RxKind::zero, "", {});
	return z;
}

RxPtr rx_one() {
	static const RxPtr o = make_node(RxKind::one, "", {});
	return o;
}

RxPtr rx_letter(const std::string& name) {
	if (name.empty()) throw ValidationError("empty letter name");
	return make_node(RxKind::letter, name, {});
}

int rx_compare(const RxPtr& a, const RxPtr& b) {
	if (a.get() == b.get()) return 0;
	if (a->kind != b->kind)
		return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
	if (a->letter != b->letter) return a->letter < b->letter ? -1 : 1;
	if (a->parts.size() != b->parts.size())
		return a->parts.size() < b->parts.size() ? -1 : 1;
	for (size_t i = 0; i < a->parts.size(); ++i) {
		int c = rx_compare(a->parts[i], b->parts[i]);
		if (c != 0) return c;
	}
	return 0;
}

bool rx_equal(const RxPtr& a, const RxPtr& b) {
	if (a.get() == b.get()) return true;
	if (a->digest != b->digest) return false;
	return rx_compare(a, b) == 0;
}

RxPtr rx_sum(std::vector<RxPtr> parts) {
	std::vector<RxPtr> flat;
	std::function<void(const RxPtr&)> push = [&](const RxPtr& p) {
		if (!p) throw ValidationError("null expression");
		if (p->kind == RxKind::zero) return;
		if (p->kind == RxKind::sum) {
			for (const auto& q : p->parts) push(q);
			return;
		}
		flat.push_back(p);
	};
	for (const auto& p : parts) push(p);
	std::sort(flat.begin(), flat.end(),
	          [](const RxPtr& a, const RxPtr& b) { return rx_compare(a, b) < 0; });
	flat.erase(std::unique(flat.begin(), flat.end(),
	                       [](const RxPtr& a, const RxPtr& b) {
		                       return rx_equal(a, b);
	                       }),
	           flat.end());
	if (flat.empty()) return rx_zero();
	if (flat.size() == 1) return flat[0];
	return make_node(RxKind::sum, "", std::move(flat));
}

RxPtr rx_cat(RxPtr head, RxPtr tail) {
	if (!head || !tail) throw ValidationError("null expression");
	if (head->kind == RxKind::zero || tail->kind == RxKind::zero)
		return rx_zero();
	if (head->kind == RxKind::one) return tail;
	if (tail->kind == RxKind::one) return head;
	if (head->kind == RxKind::cat)
		return rx_cat(head->parts[0], rx_cat(head->parts[1], tail));
	return make_node(RxKind::cat, "", {std::move(head), std::move(tail)});
}

RxPtr rx_star(RxPtr inner) {
	if (!inner) throw ValidationError("null expression");
	if (inner->kind == RxKind::zero || inner->kind == RxKind::one)
		return rx_one();
	return make_node(RxKind::star, "", {std::move(inner)});
}

bool nullable(const RxPtr& r) {
	switch (r->kind) {
		case RxKind::zero: return false;
		case RxKind::one: return true;
		case RxKind::letter: return false;
		case RxKind::star: return true;
		case RxKind::cat: return nullable(r->parts[0]) && nullable(r->parts[1]);
		case RxKind::sum:
			for (const auto& p : r->parts)
				if (nullable(p)) return true;
			return false;
	}
	return false;
}

std::set<std::string> initials(const RxPtr& r) {
	std::set<std::string> out;
	std::function<void(const RxPtr&)> go = [&](const RxPtr& e) {
		switch (e->kind) {
			case RxKind::zero:
			case RxKind::one: return;
			case RxKind::letter: out.insert(e->letter); return;
			case RxKind::star: go(e->parts[0]); return;
			case RxKind::sum:
				for (const auto& p : e->parts) go(p);
				return;
			case RxKind::cat:
				go(e->parts[0]);
				if (nullable(e->parts[0])) go(e->parts[1]);
				return;
		}
	};
	go(r);
	return out;
}

std::set<std::string> occurring_letters(const RxPtr& r) {
	std::set<std::string> out;
	std::function<void(const RxPtr&)> go = [&](const RxPtr& e) {
		if (e->kind == RxKind::letter) out.insert(e->letter);
		for (const auto& p : e->parts) go(p);
	};
	go(r);
	return out;
}

namespace {

int precedence(const RxPtr& r) {
	switch (r->kind) {
		case RxKind::sum: return 0;
		case RxKind::cat: return 1;
		default: return 2;
	}
}

void print(const RxPtr& r, int context, std::string& out) {
	bool parens = precedence(r) < context;
	if (parens) out += '(';
	switch (r->kind) {
		case RxKind::zero: out += '0'; break;
		case RxKind::one: out += '1'; break;
		case RxKind::letter:
			if (r->letter.size() == 1) {
				out += r->letter;
			} else {
				out += '{';
				out += r->letter;
				out += '}';
			}
			break;
		case RxKind::sum:
			for (size_t i = 0; i < r->parts.size(); ++i) {
				if (i) out += '+';
				print(r->parts[i], 0, out);
			}
			break;
		case RxKind::cat:
			print(r->parts[0], 1, out);
			print(r->parts[1], 1, out);
			break;
		case RxKind::star:
			print(r->parts[0], 2, out);
			out += '*';
			break;
	}
	if (parens) out += ')';
}

}  // namespace

std::string rx_text(const RxPtr& r) {
	std::string out;
	print(r, 0, out);
	return out;
}

namespace {

struct Parser {
	const std::string& text;
	size_t pos = 0;

	explicit Parser(const std::string& t) : text(t) {}

	void skip() {
		while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
			++pos;
	}
	bool at_end() {
		skip();
		return pos >= text.size();
	}
	char peek() {
		skip();
		return pos < text.size() ? text[pos] : '\0';
	}

	RxPtr expression() {
		std::vector<RxPtr> terms{term()};
		while (peek() == '+') {
			++pos;
			terms.push_back(term());
		}
		return rx_sum(std::move(terms));
	}

	RxPtr term() {
		RxPtr acc = factor();
		for (;;) {
			char c = peek();
			if (c == '(' || c == '0' || c == '1' ||
			    std::isalnum(static_cast<unsigned char>(c))) {
				acc = rx_cat(acc, factor());
			} else {
				return acc;
			}
		}
	}

	RxPtr factor() {
		RxPtr base = atom();
		while (peek() == '*') {
			++pos;
			base = rx_star(base);
		}
		return base;
	}

	RxPtr atom() {
		char c = peek();
		if (c == '(') {
			++pos;
			RxPtr inner = expression();
			if (peek() != ')')
				throw ParseError("expected ')' at position " + std::to_string(pos) +
				                 " in: " + text);
			++pos;
			return inner;
		}
		if (c == '0') {
			++pos;
			return rx_zero();
		}
		if (c == '1') {
			++pos;
			return rx_one();
		}
		if (std::isalnum(static_cast<unsigned char>(c))) {
			++pos;
			return rx_letter(std::string(1, c));
		}
		throw ParseError("unexpected character '" + std::string(1, c) +
		                 "' at position " + std::to_string(pos) + " in: " + text);
	}
};

}  // namespace

RxPtr parse_regex(const std::string& text) {
	Parser p(text);
	if (p.at_end()) throw ParseError("empty expression");
	RxPtr r = p.expression();
	if (!p.at_end())
		throw ParseError("trailing input at position " + std::to_string(p.pos) +
		                 " in: " + text);
	return r;
}

RxSet derive(const RxPtr& r, const std::string& letter) {
	RxSet out;
	switch (r->kind) {
		case RxKind::zero:
		case RxKind::one: break;
		case RxKind::letter:
			if (r->letter == letter) out.insert(rx_one());
			break;
		case RxKind::sum:
			for (const auto& p : r->parts) {
				RxSet d = derive(p, letter);
				out.insert(d.begin(), d.end());
			}
			break;
		case RxKind::cat: {
			for (const auto& d : derive(r->parts[0], letter))
				out.insert(rx_cat(d, r->parts[1]));
			if (nullable(r->parts[0])) {
				RxSet d = derive(r->parts[1], letter);
				out.insert(d.begin(), d.end());
			}
			break;
		}
		case RxKind::star:
			for (const auto& d : derive(r->parts[0], letter))
				out.insert(rx_cat(d, r));
			break;
	}
	return out;
}

RxSet derive(const RxSet& set, const std::string& letter) {
	RxSet out;
	for (const auto& r : set) {
		RxSet d = derive(r, letter);
		out.insert(d.begin(), d.end());
	}
	return out;
}

RxSet derive_word(const RxPtr& r, const Word& w) {
	RxSet cur{r};
	for (const auto& a : w) cur = derive(cur, a);
	return cur;
}

RxSet reachable_derivatives(const RxPtr& r, bool include_root) {
	std::set<std::string> letters = occurring_letters(r);
	RxSet visited;
	std::deque<RxPtr> work;
	auto push = [&](const RxPtr& d) {
		if (visited.insert(d).second) work.push_back(d);
	};
	for (const auto& a : letters)
		for (const auto& d : derive(r, a)) push(d);
	while (!work.empty()) {
		RxPtr d = work.front();
		work.pop_front();
		for (const auto& a : letters)
			for (const auto& e : derive(d, a)) push(e);
	}
	if (include_root) visited.insert(r);
	return visited;
}

FiniteAcceptor regex_to_acceptor(const RxPtr& r, AlphabetPtr alphabet) {
	if (!alphabet) throw ValidationError("acceptor needs an alphabet");
	for (const auto& a : occurring_letters(r))
		if (!alphabet->has(a))
			throw ValidationError("expression letter not in alphabet: " + a);
	RxSet universe = reachable_derivatives(r, true);
	FiniteAcceptor out;
	out.alphabet = alphabet;
	std::map<RxPtr, int, RxLess> index;
	for (const auto& d : universe)
		index.emplace(d, out.add_state(rx_text(d), nullable(d)));
	out.initial = index.at(r);
	for (const auto& [d, id] : index)
		for (const auto& a : alphabet->letters)
			for (const auto& e : derive(d, a)) out.add_edge(id, a, index.at(e));
	return out;
}

RxSet sites(const RxPtr& r, const std::string& letter) {
	RxSet out;
	for (const auto& d : reachable_derivatives(r, true))
		if (initials(d).count(letter)) out.insert(d);
	return out;
}

namespace {

using Partition = std::vector<RxSet>;

// Merge intersecting blocks until pairwise disjoint.
void consolidate(Partition& p) {
	bool changed = true;
	while (changed) {
		changed = false;
		for (size_t i = 0; i < p.size() && !changed; ++i) {
			for (size_t j = i + 1; j < p.size() && !changed; ++j) {
				bool meet = false;
				for (const auto& e : p[j])
					if (p[i].count(e)) {
						meet = true;
						break;
					}
				if (meet) {
					p[i].insert(p[j].begin(), p[j].end());
					p.erase(p.begin() + static_cast<long>(j));
					changed = true;
				}
			}
		}
	}
}

Partition part_raw(const RxPtr& s, const std::string& a) {
	switch (s->kind) {
		case RxKind::zero:
		case RxKind::one:
			return {};
		case RxKind::letter:
			if (s->letter == a) return Partition{RxSet{s}};
			return {};
		case RxKind::star: {
			const RxPtr& t = s->parts[0];
			Partition inner = part_raw(t, a);
			Partition out;
			for (const auto& b : inner) {
				RxSet nb;
				for (const auto& d : b)
					nb.insert(rx_equal(d, t) ? s : rx_cat(d, s));
				out.push_back(std::move(nb));
			}
			consolidate(out);
			return out;
		}
		case RxKind::cat: {
			const RxPtr& u = s->parts[0];
			const RxPtr& v = s->parts[1];
			Partition out;
			for (const auto& b : part_raw(u, a)) {
				RxSet nb;
				for (const auto& d : b) nb.insert(rx_cat(d, v));
				out.push_back(std::move(nb));
			}
			Partition right = part_raw(v, a);
			if (nullable(u)) {
				for (const auto& b : right) {
					RxSet nb;
					for (const auto& d : b) nb.insert(rx_equal(d, v) ? s : d);
					out.push_back(std::move(nb));
				}
			} else {
				// the tail itself is a derivative of s only if some derivative
				// walk of the head lands exactly on the unit
				bool keep_tail = reachable_derivatives(s, false).count(v) != 0;
				for (const auto& b : right) {
					RxSet nb;
					for (const auto& d : b) {
						if (rx_equal(d, v) && !keep_tail) continue;
						nb.insert(d);
					}
					if (!nb.empty()) out.push_back(std::move(nb));
				}
			}
			consolidate(out);
			return out;
		}
		case RxKind::sum: {
			const RxPtr& t1 = s->parts[0];
			RxPtr t2;
			if (s->parts.size() == 2) {
				t2 = s->parts[1];
			} else {
				std::vector<RxPtr> rest(s->parts.begin() + 1, s->parts.end());
				t2 = rx_sum(std::move(rest));
			}
			Partition z1 = part_raw(t1, a);
			Partition z2 = part_raw(t2, a);
			RxSet dplus = reachable_derivatives(s, false);
			auto extract = [&](Partition& z, const RxPtr& t) {
				RxSet b;
				for (size_t i = 0; i < z.size(); ++i) {
					if (z[i].count(t)) {
						b = z[i];
						z.erase(z.begin() + static_cast<long>(i));
						if (!dplus.count(t)) b.erase(t);
						break;
					}
				}
				return b;
			};
			RxSet b1 = extract(z1, t1);
			RxSet b2 = extract(z2, t2);
			Partition out = z1;
			out.insert(out.end(), z2.begin(), z2.end());
			if (initials(s).count(a)) {
				RxSet merged = b1;
				merged.insert(b2.begin(), b2.end());
				merged.insert(s);
				out.push_back(std::move(merged));
			} else {
				if (!b1.empty()) out.push_back(std::move(b1));
				if (!b2.empty()) out.push_back(std::move(b2));
			}
			consolidate(out);
			return out;
		}
	}
	return {};
}

}  // namespace

std::string block_text(const Block& b) {
	std::string out = "{";
	bool first = true;
	for (const auto& e : b) {
		if (!first) out += ", ";
		out += rx_text(e);
		first = false;
	}
	out += "}";
	return out;
}

namespace {

std::string derivative_key(const RxPtr& e, const std::string& letter) {
	std::string key;
	for (const auto& d : derive(e, letter)) {
		key += rx_text(d);
		key += '\n';
	}
	return key;
}

}  // namespace

SitePartition site_partition(const RxPtr& r, const std::string& letter) {
	Partition p = part_raw(r, letter);
	RxSet expected = sites(r, letter);
	// The structural rules can carry non-site artifacts, lose sites reachable
	// only through nested loops, and group sites whose derivative sets differ
	// (which can break bifurcation). Restore the invariants: keep sites only,
	// split blocks by derivative set (members sharing their derivative set
	// always bifurcate together), and re-add lost sites.
	Partition repaired;
	RxSet placed;
	for (const auto& b : p) {
		std::map<std::string, RxSet> split;
		for (const auto& e : b)
			if (expected.count(e)) split[derivative_key(e, letter)].insert(e);
		for (auto& [key, nb] : split) {
			for (const auto& e : nb) placed.insert(e);
			repaired.push_back(std::move(nb));
		}
	}
	for (const auto& e : expected) {
		if (placed.count(e)) continue;
		std::string key = derivative_key(e, letter);
		bool joined = false;
		for (auto& nb : repaired)
			if (derivative_key(*nb.begin(), letter) == key) {
				nb.insert(e);
				joined = true;
				break;
			}
		if (!joined) repaired.push_back(RxSet{e});
	}
	p = std::move(repaired);
	RxSet seen;
	for (const auto& b : p) {
		for (const auto& e : b) {
			if (!expected.count(e))
				throw VerificationError("site partition of " + rx_text(r) + " by " +
				                        letter + " carries a non-site: " + rx_text(e));
			if (!seen.insert(e).second)
				throw VerificationError("site partition of " + rx_text(r) + " by " +
				                        letter + " repeats: " + rx_text(e));
		}
	}
	for (const auto& e : expected)
		if (!seen.count(e))
			throw VerificationError("site partition of " + rx_text(r) + " by " +
			                        letter + " misses the site: " + rx_text(e));
	std::sort(p.begin(), p.end(), [](const Block& x, const Block& y) {
		return rx_compare(*x.begin(), *y.begin()) < 0;
	});
	return p;
}

std::vector<Duct> site_ducts(const RxPtr& r, const std::string& letter,
                             size_t subset_cap) {
	std::vector<Duct> out;
	for (const auto& block : site_partition(r, letter)) {
		RxSet effects = derive(block, letter);
		std::vector<RxPtr> items(effects.begin(), effects.end());
		if (items.empty()) continue;
		size_t count = size_t{1} << items.size();
		if (items.size() >= 8 * sizeof(size_t) || count > subset_cap)
			throw ExplorationLimit("duct enumeration for block " + block_text(block) +
			                       " exceeds the subset cap");
		for (size_t mask = 1; mask < count; ++mask) {
			Duct d;
			d.pre = block;
			for (size_t i = 0; i < items.size(); ++i)
				if (mask & (size_t{1} << i)) d.effects.insert(items[i]);
			out.push_back(std::move(d));
		}
	}
	return out;
}

size_t default_check_bound(const RxPtr& r) {
	return 2 * reachable_derivatives(r, true).size() + 2;
}

namespace {

// Two-phase acceptor for words carrying one marked letter occurrence that
// passes through the given block. When `decoupled` is set the suffix phase
// starts from the whole block's effect pool instead of the reached element,
// which realizes the factored prefix-letter-suffix language.
FiniteAcceptor through_acceptor(const RxPtr& r, const std::string& letter,
                                const Block& block, const RxSet& effects,
                                bool decoupled) {
	std::set<std::string> occ = occurring_letters(r);
	occ.insert(letter);
	AlphabetPtr alphabet = make_alphabet(
			{std::vector<std::string>(occ.begin(), occ.end())});

	RxSet universe = reachable_derivatives(r, true);
	for (const auto& d : block)
		if (!universe.count(d))
			throw ValidationError("block element is not a derivative: " + rx_text(d));

	RxSet pool;  // suffix-phase entry set for the decoupled acceptor
	for (const auto& d : block) {
		for (const auto& e : derive(d, letter))
			if (effects.count(e)) pool.insert(e);
	}

	FiniteAcceptor out;
	out.alphabet = alphabet;
	std::map<RxPtr, int, RxLess> phase1, phase2;
	for (const auto& d : universe)
		phase1.emplace(d, out.add_state("pre:" + rx_text(d), false));
	std::deque<RxPtr> work;
	std::function<int(const RxPtr&)> intern2 = [&](const RxPtr& d) {
		auto it = phase2.find(d);
		if (it != phase2.end()) return it->second;
		int id = out.add_state("post:" + rx_text(d), nullable(d));
		phase2.emplace(d, id);
		work.push_back(d);
		return id;
	};

	out.initial = phase1.at(r);
	for (const auto& [d, id] : phase1) {
		for (const auto& a : alphabet->letters)
			for (const auto& e : derive(d, a)) out.add_edge(id, a, phase1.at(e));
		if (block.count(d)) {
			if (decoupled) {
				for (const auto& e : pool) out.add_edge(id, letter, intern2(e));
			} else {
				for (const auto& e : derive(d, letter))
					if (effects.count(e)) out.add_edge(id, letter, intern2(e));
			}
		}
	}
	while (!work.empty()) {
		RxPtr d = work.front();
		work.pop_front();
		int id = phase2.at(d);
		for (const auto& a : alphabet->letters)
			for (const auto& e : derive(d, a)) out.add_edge(id, a, intern2(e));
	}
	return out;
}

Verdict through_check(const RxPtr& r, const std::string& letter,
                      const Block& block, const RxSet& effects, size_t n,
                      const std::string& what) {
	FiniteAcceptor restricted = through_acceptor(r, letter, block, effects, false);
	FiniteAcceptor factored = through_acceptor(r, letter, block, effects, true);
	std::vector<Word> lr = acceptor_language_bounded(restricted, n);
	std::vector<Word> lf = acceptor_language_bounded(factored, n);
	WordSet rs(lr.begin(), lr.end());
	for (const auto& w : lf) {
		if (!rs.count(w)) {
			Verdict v = Verdict::fail(
					what + " fails for block " + block_text(block) + " of " + rx_text(r),
					w);
			v.details.push_back("the word factors through the block but is not in "
			                    "its through-language");
			return v;
		}
	}
	return Verdict::pass();
}

}  // namespace

Verdict check_bifurcates(const RxPtr& r, const std::string& letter,
                         const Block& block, size_t n) {
	RxSet all = derive(block, letter);
	return through_check(r, letter, block, all, n, "bifurcation");
}

Verdict check_funnels(const RxPtr& r, const std::string& letter,
                      const Block& block, const RxSet& effects, size_t n) {
	if (effects.empty()) throw ValidationError("a duct needs at least one effect");
	RxSet all = derive(block, letter);
	for (const auto& e : effects)
		if (!all.count(e))
			throw ValidationError("effect is not a derivative of the block: " +
			                      rx_text(e));
	return through_check(r, letter, block, effects, n, "funnel");
}

}  // namespace kfc
