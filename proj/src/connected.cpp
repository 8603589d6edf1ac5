#include "kleenefc/connected.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace kfc {

namespace {

int block_compare(const Block& a, const Block& b) {
	auto ia = a.begin(), ib = b.begin();
	for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
		int c = rx_compare(*ia, *ib);
		if (c != 0) return c;
	}
	if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
	return 0;
}

bool block_equal(const Block& a, const Block& b) {
	return block_compare(a, b) == 0;
}

int duct_compare(const CableDuct& a, const CableDuct& b) {
	int c = block_compare(a.pre, b.pre);
	if (c != 0) return c;
	return block_compare(a.effects, b.effects);
}

int cable_compare(const Cable& a, const Cable& b) {
	if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
	for (size_t i = 0; i < a.size(); ++i) {
		int c = duct_compare(a[i], b[i]);
		if (c != 0) return c;
	}
	return 0;
}

struct TupleLess {
	bool operator()(const DerivativeTuple& a, const DerivativeTuple& b) const {
		if (a.size() != b.size()) return a.size() < b.size();
		for (size_t i = 0; i < a.size(); ++i) {
			int c = rx_compare(a[i], b[i]);
			if (c != 0) return c < 0;
		}
		return false;
	}
};

// Partition of the letter's sites in one part, cached per validation pass.
SitePartition partition_for(const ConnectedExpression& ce, int location,
                            const std::string& letter) {
	return site_partition(ce.parts[location], letter);
}

bool block_in_partition(const SitePartition& p, const Block& b) {
	for (const auto& x : p)
		if (block_equal(x, b)) return true;
	return false;
}

const Block* block_of(const SitePartition& p, const RxPtr& d) {
	for (const auto& x : p)
		if (x.count(d)) return &x;
	return nullptr;
}

}  // namespace

void ConnectedExpression::validate() const {
	if (!alphabet) throw ValidationError("expression has no alphabet");
	if (parts.size() != alphabet->width())
		throw ValidationError("part count does not match the alphabet width");
	for (size_t i = 0; i < parts.size(); ++i) {
		if (!parts[i]) throw ValidationError("missing expression part");
		const auto& letters = alphabet->components[i];
		for (const auto& a : occurring_letters(parts[i]))
			if (!std::binary_search(letters.begin(), letters.end(), a))
				throw ValidationError("part " + std::to_string(i + 1) +
				                      " uses a letter outside its location: " + a);
	}
	if (annotation == Annotation::none) {
		if (!pairings.empty() || !cables.empty())
			throw ValidationError("unannotated expression carries relations");
		return;
	}
	if (annotation == Annotation::pairings && !cables.empty())
		throw ValidationError("pairing-annotated expression carries cables");
	if (annotation == Annotation::cables && !pairings.empty())
		throw ValidationError("cable-annotated expression carries pairings");

	auto check_letter = [&](const std::string& letter) {
		if (!alphabet->has(letter) || !alphabet->is_global(letter))
			throw ValidationError("relation declared for a non-global letter: " +
			                      letter);
	};
	for (const auto& [letter, tuples] : pairings) {
		check_letter(letter);
		const auto& locs = alphabet->locations(letter);
		std::vector<SitePartition> parts_p;
		for (int i : locs) parts_p.push_back(partition_for(*this, i, letter));
		for (const auto& t : tuples) {
			if (t.size() != locs.size())
				throw ValidationError("pairing tuple for " + letter +
				                      " has the wrong width");
			for (size_t pos = 0; pos < locs.size(); ++pos)
				if (!block_in_partition(parts_p[pos], t[pos]))
					throw ValidationError("pairing tuple for " + letter +
					                      " uses a non-block: " + block_text(t[pos]));
		}
	}
	for (const auto& [letter, cbls] : cables) {
		check_letter(letter);
		const auto& locs = alphabet->locations(letter);
		std::vector<SitePartition> parts_p;
		for (int i : locs) parts_p.push_back(partition_for(*this, i, letter));
		for (const auto& c : cbls) {
			if (c.size() != locs.size())
				throw ValidationError("cable for " + letter + " has the wrong width");
			for (size_t pos = 0; pos < locs.size(); ++pos) {
				const CableDuct& d = c[pos];
				if (!block_in_partition(parts_p[pos], d.pre))
					throw ValidationError("cable for " + letter +
					                      " uses a non-block: " + block_text(d.pre));
				if (d.effects.empty())
					throw ValidationError("cable duct for " + letter +
					                      " has no effects");
				RxSet all = derive(d.pre, letter);
				for (const auto& e : d.effects)
					if (!all.count(e))
						throw ValidationError("cable effect is not a derivative of its "
						                      "block: " + rx_text(e));
			}
		}
	}
}

void SumExpression::validate() const {
	if (!alphabet) throw ValidationError("expression has no alphabet");
	if (summands.empty()) throw ValidationError("empty sum expression");
	for (const auto& ce : summands) {
		if (!(*ce.alphabet == *alphabet))
			throw ValidationError("summands disagree on the alphabet");
		ce.validate();
	}
}

std::vector<DerivativeTuple> ce_step(const ConnectedExpression& ce,
                                     const DerivativeTuple& t,
                                     const std::string& letter) {
	const auto& locs = ce.alphabet->locations(letter);
	std::set<DerivativeTuple, TupleLess> out;
	if (locs.size() == 1) {
		int i = locs[0];
		for (const auto& d : derive(t[i], letter)) {
			DerivativeTuple next = t;
			next[i] = d;
			out.insert(std::move(next));
		}
		return {out.begin(), out.end()};
	}
	if (ce.annotation == Annotation::cables) {
		auto it = ce.cables.find(letter);
		if (it == ce.cables.end()) return {};
		for (const Cable& c : it->second) {
			std::vector<std::vector<RxPtr>> choices;
			bool ok = true;
			for (size_t pos = 0; pos < locs.size(); ++pos) {
				if (!c[pos].pre.count(t[locs[pos]])) {
					ok = false;
					break;
				}
				RxSet d = derive(t[locs[pos]], letter);
				std::vector<RxPtr> here;
				for (const auto& e : d)
					if (c[pos].effects.count(e)) here.push_back(e);
				if (here.empty()) {
					ok = false;
					break;
				}
				choices.push_back(std::move(here));
			}
			if (!ok) continue;
			DerivativeTuple next = t;
			std::function<void(size_t)> build = [&](size_t pos) {
				if (pos == locs.size()) {
					out.insert(next);
					return;
				}
				for (const auto& e : choices[pos]) {
					next[locs[pos]] = e;
					build(pos + 1);
				}
				next[locs[pos]] = t[locs[pos]];
			};
			build(0);
		}
		return {out.begin(), out.end()};
	}
	// plain and pairing-annotated expressions step by free recombination
	std::vector<std::vector<RxPtr>> choices;
	for (int i : locs) {
		RxSet d = derive(t[i], letter);
		if (d.empty()) return {};
		choices.emplace_back(d.begin(), d.end());
	}
	DerivativeTuple next = t;
	std::function<void(size_t)> build = [&](size_t pos) {
		if (pos == locs.size()) {
			out.insert(next);
			return;
		}
		for (const auto& e : choices[pos]) {
			next[locs[pos]] = e;
			build(pos + 1);
		}
		next[locs[pos]] = t[locs[pos]];
	};
	build(0);
	return {out.begin(), out.end()};
}

std::string derivative_tuple_text(const ConnectedExpression&,
                                  const DerivativeTuple& t) {
	std::string out = "(";
	for (size_t i = 0; i < t.size(); ++i) {
		if (i) out += ", ";
		out += rx_text(t[i]);
	}
	out += ")";
	return out;
}

namespace {

struct CeGraph {
	std::vector<DerivativeTuple> tuples;
	std::map<DerivativeTuple, int, TupleLess> index;
	std::vector<std::vector<std::pair<std::string, int>>> steps;
};

CeGraph ce_graph(const ConnectedExpression& ce, size_t cap) {
	ce.validate();
	CeGraph g;
	std::deque<int> work;
	auto intern = [&](const DerivativeTuple& t) {
		auto it = g.index.find(t);
		if (it != g.index.end()) return it->second;
		if (g.tuples.size() >= cap)
			throw ExplorationLimit("derivative exploration exceeded the state cap "
			                       "of " + std::to_string(cap));
		int id = static_cast<int>(g.tuples.size());
		g.tuples.push_back(t);
		g.steps.emplace_back();
		g.index.emplace(t, id);
		work.push_back(id);
		return id;
	};
	intern(ce.parts);
	while (!work.empty()) {
		int id = work.front();
		work.pop_front();
		DerivativeTuple t = g.tuples[id];
		for (const auto& letter : ce.alphabet->letters)
			for (const auto& next : ce_step(ce, t, letter)) {
				int to = intern(next);  // may grow g.steps
				g.steps[id].emplace_back(letter, to);
			}
	}
	return g;
}

bool tuple_accepting(const DerivativeTuple& t) {
	for (const auto& d : t)
		if (!nullable(d)) return false;
	return true;
}

std::vector<Word> ce_access_words(const CeGraph& g) {
	std::vector<Word> words(g.tuples.size());
	std::vector<bool> seen(g.tuples.size(), false);
	std::deque<int> work{0};
	seen[0] = true;
	while (!work.empty()) {
		int cur = work.front();
		work.pop_front();
		for (const auto& [letter, to] : g.steps[cur]) {
			if (!seen[to]) {
				seen[to] = true;
				words[to] = words[cur];
				words[to].push_back(letter);
				work.push_back(to);
			}
		}
	}
	return words;
}

}  // namespace

FiniteAcceptor ce_acceptor(const ConnectedExpression& ce, size_t cap) {
	CeGraph g = ce_graph(ce, cap);
	FiniteAcceptor out;
	out.alphabet = ce.alphabet;
	for (const auto& t : g.tuples)
		out.add_state(derivative_tuple_text(ce, t), tuple_accepting(t));
	out.initial = 0;
	for (size_t id = 0; id < g.tuples.size(); ++id)
		for (const auto& [letter, to] : g.steps[id])
			out.add_edge(static_cast<int>(id), letter, to);
	return out;
}

FiniteAcceptor sce_acceptor(const SumExpression& e, size_t cap) {
	e.validate();
	if (e.summands.size() == 1) return ce_acceptor(e.summands[0], cap);
	FiniteAcceptor out;
	out.alphabet = e.alphabet;
	std::vector<int> initial_ids;
	for (size_t j = 0; j < e.summands.size(); ++j) {
		FiniteAcceptor part = ce_acceptor(e.summands[j], cap);
		int offset = static_cast<int>(out.size());
		for (size_t s = 0; s < part.size(); ++s)
			out.add_state(std::to_string(j) + ":" + part.names[s],
			              part.accepting[s]);
		for (size_t s = 0; s < part.size(); ++s)
			for (const auto& [letter, targets] : part.edges[s])
				for (int to : targets)
					out.add_edge(offset + static_cast<int>(s), letter, offset + to);
		initial_ids.push_back(offset + part.initial);
	}
	bool acc = false;
	for (int id : initial_ids) acc = acc || out.accepting[id];
	int start = out.add_state("start", acc);
	for (int id : initial_ids)
		for (const auto& [letter, targets] : out.edges[id])
			for (int to : targets) out.add_edge(start, letter, to);
	out.initial = start;
	return out;
}

std::string ce_text(const ConnectedExpression& ce) {
	std::string out = "fsync(";
	for (size_t i = 0; i < ce.parts.size(); ++i) {
		if (i) out += ", ";
		out += rx_text(ce.parts[i]);
	}
	out += ")";
	return out;
}

std::string sce_text(const SumExpression& e) {
	std::string out;
	for (size_t j = 0; j < e.summands.size(); ++j) {
		if (j) out += " + ";
		out += ce_text(e.summands[j]);
	}
	return out;
}

Verdict check_pairings_wellformed(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::pairings)
		throw PreconditionError("the expression carries no pairings");
	for (const auto& letter : ce.alphabet->letters) {
		if (!ce.alphabet->is_global(letter)) continue;
		const auto& locs = ce.alphabet->locations(letter);
		std::vector<SitePartition> parts_p;
		bool any_blocks = false;
		for (int i : locs) {
			parts_p.push_back(partition_for(ce, i, letter));
			any_blocks = any_blocks || !parts_p.back().empty();
		}
		std::vector<PairingTuple> tuples;
		auto it = ce.pairings.find(letter);
		if (it != ce.pairings.end()) tuples = it->second;
		if (!any_blocks) {
			if (!tuples.empty())
				return Verdict::fail("letter " + letter +
				                     " has pairings but no sites");
			continue;
		}
		for (size_t pos = 0; pos < locs.size(); ++pos) {
			for (const auto& block : parts_p[pos]) {
				int used = 0;
				for (const auto& t : tuples)
					if (block_equal(t[pos], block)) ++used;
				if (used == 0)
					return Verdict::fail("block " + block_text(block) +
					                     " of part " + std::to_string(locs[pos] + 1) +
					                     " is not paired for " + letter);
				if (used > 1)
					return Verdict::fail("block " + block_text(block) +
					                     " of part " + std::to_string(locs[pos] + 1) +
					                     " sits in two pairing tuples for " + letter);
			}
		}
	}
	return Verdict::pass();
}

namespace {

std::set<std::string> block_initials(const Block& b, bool& uniform) {
	std::set<std::string> first = initials(*b.begin());
	uniform = true;
	for (const auto& d : b)
		if (initials(d) != first) uniform = false;
	std::set<std::string> all;
	for (const auto& d : b) {
		auto i = initials(d);
		all.insert(i.begin(), i.end());
	}
	(void)first;
	return all;
}

}  // namespace

Verdict check_equal_choice(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::pairings)
		throw PreconditionError("the expression carries no pairings");
	for (const auto& [letter, tuples] : ce.pairings) {
		for (const auto& t : tuples) {
			std::vector<std::set<std::string>> inits;
			for (const auto& block : t) {
				bool uniform = true;
				auto i = block_initials(block, uniform);
				if (!uniform)
					return Verdict::fail("block " + block_text(block) + " paired for " +
					                     letter +
					                     " has members with different initial letters");
				inits.push_back(std::move(i));
			}
			for (size_t pos = 1; pos < inits.size(); ++pos) {
				if (inits[pos] != inits[0]) {
					Verdict v = Verdict::fail(
							"pairing tuple for " + letter +
							" joins blocks with different initial letter sets");
					for (size_t q = 0; q < t.size(); ++q) {
						std::string s;
						for (const auto& x : inits[q]) s += x + " ";
						v.details.push_back(block_text(t[q]) + " starts: " + s);
					}
					return v;
				}
			}
		}
	}
	return Verdict::pass();
}

Verdict check_consistent_pairings(const ConnectedExpression& ce, size_t cap) {
	ce.validate();
	if (ce.annotation != Annotation::pairings)
		throw PreconditionError("the expression carries no pairings");
	CeGraph g = ce_graph(ce, cap);
	std::vector<Word> words = ce_access_words(g);
	std::map<std::string, std::vector<SitePartition>> partitions;
	for (const auto& letter : ce.alphabet->letters) {
		if (!ce.alphabet->is_global(letter)) continue;
		for (int i : ce.alphabet->locations(letter))
			partitions[letter].push_back(partition_for(ce, i, letter));
	}
	for (size_t id = 0; id < g.tuples.size(); ++id) {
		const DerivativeTuple& t = g.tuples[id];
		for (const auto& letter : ce.alphabet->letters) {
			if (!ce.alphabet->is_global(letter)) continue;
			const auto& locs = ce.alphabet->locations(letter);
			bool every = true;
			for (int i : locs) every = every && !derive(t[i], letter).empty();
			if (!every) continue;
			PairingTuple proj;
			for (size_t pos = 0; pos < locs.size(); ++pos) {
				const Block* b = block_of(partitions[letter][pos], t[locs[pos]]);
				if (!b)
					throw VerificationError("derivative outside every block: " +
					                        rx_text(t[locs[pos]]));
				proj.push_back(*b);
			}
			bool found = false;
			auto it = ce.pairings.find(letter);
			if (it != ce.pairings.end()) {
				for (const auto& declared : it->second) {
					bool same = true;
					for (size_t pos = 0; pos < proj.size(); ++pos)
						same = same && block_equal(declared[pos], proj[pos]);
					if (same) found = true;
				}
			}
			if (!found) {
				return Verdict::fail(
						"reachable tuple " + derivative_tuple_text(ce, t) + " enables " +
						letter + " everywhere but its blocks are not paired together",
						words[id]);
			}
		}
	}
	return Verdict::pass();
}

Verdict check_cables_wellformed(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::cables)
		throw PreconditionError("the expression carries no cables");
	for (const auto& letter : ce.alphabet->letters) {
		if (!ce.alphabet->is_global(letter)) continue;
		const auto& locs = ce.alphabet->locations(letter);
		std::vector<SitePartition> parts_p;
		bool any_blocks = false;
		for (int i : locs) {
			parts_p.push_back(partition_for(ce, i, letter));
			any_blocks = any_blocks || !parts_p.back().empty();
		}
		std::vector<Cable> cbls;
		auto it = ce.cables.find(letter);
		if (it != ce.cables.end()) cbls = it->second;
		if (!any_blocks) {
			if (!cbls.empty())
				return Verdict::fail("letter " + letter + " has cables but no sites");
			continue;
		}
		for (size_t pos = 0; pos < locs.size(); ++pos) {
			for (const auto& block : parts_p[pos]) {
				bool used = false;
				for (const auto& c : cbls)
					if (block_equal(c[pos].pre, block)) used = true;
				if (!used)
					return Verdict::fail("block " + block_text(block) + " of part " +
					                     std::to_string(locs[pos] + 1) +
					                     " is not cabled for " + letter);
			}
			// distinct ducts on one block must have disjoint effects
			std::vector<CableDuct> ducts;
			for (const auto& c : cbls) {
				bool fresh = true;
				for (const auto& d : ducts)
					if (duct_compare(d, c[pos]) == 0) fresh = false;
				if (fresh) ducts.push_back(c[pos]);
			}
			for (size_t x = 0; x < ducts.size(); ++x) {
				for (size_t y = x + 1; y < ducts.size(); ++y) {
					if (!block_equal(ducts[x].pre, ducts[y].pre)) continue;
					for (const auto& e : ducts[y].effects) {
						if (ducts[x].effects.count(e)) {
							Verdict v = Verdict::fail(
									"two different ducts on block " +
									block_text(ducts[x].pre) + " for " + letter +
									" share the effect " + rx_text(e));
							return v;
						}
					}
				}
			}
		}
	}
	return Verdict::pass();
}

Verdict check_equal_source(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::cables)
		throw PreconditionError("the expression carries no cables");
	for (const auto& [letter, cbls] : ce.cables) {
		const auto& locs = ce.alphabet->locations(letter);
		for (size_t x = 0; x < cbls.size(); ++x) {
			for (size_t y = x + 1; y < cbls.size(); ++y) {
				bool meet = false, same = true;
				for (size_t pos = 0; pos < locs.size(); ++pos) {
					if (block_equal(cbls[x][pos].pre, cbls[y][pos].pre)) meet = true;
					else same = false;
				}
				if (meet && !same) {
					Verdict v = Verdict::fail(
							"cables for " + letter +
							" share a pre-block without sharing all pre-blocks");
					for (size_t pos = 0; pos < locs.size(); ++pos) {
						v.details.push_back("first:  " + block_text(cbls[x][pos].pre));
						v.details.push_back("second: " + block_text(cbls[y][pos].pre));
					}
					return v;
				}
			}
		}
	}
	return Verdict::pass();
}

Verdict check_product_derivatives(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::cables)
		throw PreconditionError("the expression carries no cables");
	for (const auto& [letter, cbls] : ce.cables) {
		const auto& locs = ce.alphabet->locations(letter);
		// group cables by their pre-block tuple
		std::vector<std::vector<const Cable*>> groups;
		for (const auto& c : cbls) {
			bool placed = false;
			for (auto& group : groups) {
				bool same = true;
				for (size_t pos = 0; pos < locs.size(); ++pos)
					same = same &&
					       block_equal((*group.front())[pos].pre, c[pos].pre);
				if (same) {
					group.push_back(&c);
					placed = true;
					break;
				}
			}
			if (!placed) groups.push_back({&c});
		}
		for (const auto& group : groups) {
			std::vector<std::vector<RxSet>> columns(locs.size());
			for (const Cable* c : group) {
				for (size_t pos = 0; pos < locs.size(); ++pos) {
					bool fresh = true;
					for (const auto& e : columns[pos])
						if (block_compare(e, (*c)[pos].effects) == 0) fresh = false;
					if (fresh) columns[pos].push_back((*c)[pos].effects);
				}
			}
			Cable probe = *group.front();
			Verdict out = Verdict::pass();
			std::function<bool(size_t)> walk = [&](size_t pos) -> bool {
				if (pos == locs.size()) {
					for (const Cable* c : group)
						if (cable_compare(*c, probe) == 0) return false;
					out = Verdict::fail("cables for " + letter +
					                    " miss a recombination of their ducts");
					for (size_t q = 0; q < locs.size(); ++q)
						out.details.push_back("wanted effects at part " +
						                      std::to_string(locs[q] + 1) + ": " +
						                      block_text(probe[q].effects));
					return true;
				}
				for (const auto& e : columns[pos]) {
					probe[pos].effects = e;
					if (walk(pos + 1)) return true;
				}
				return false;
			};
			if (walk(0)) return out;
		}
	}
	return Verdict::pass();
}

Verdict check_action_live(const ConnectedExpression& ce, size_t cap) {
	CeGraph g = ce_graph(ce, cap);
	std::vector<Word> words = ce_access_words(g);
	size_t n = g.tuples.size();
	std::vector<std::vector<int>> reverse(n);
	for (size_t id = 0; id < n; ++id)
		for (const auto& [letter, to] : g.steps[id])
			reverse[to].push_back(static_cast<int>(id));

	for (const auto& letter : ce.alphabet->letters) {
		std::vector<bool> can(n, false);
		std::deque<int> work;
		for (size_t id = 0; id < n; ++id) {
			bool fires = false;
			for (const auto& [l, to] : g.steps[id]) {
				(void)to;
				if (l == letter) fires = true;
			}
			if (fires) {
				can[id] = true;
				work.push_back(static_cast<int>(id));
			}
		}
		if (work.empty())
			return Verdict::fail("the letter " + letter + " can never fire");
		while (!work.empty()) {
			int cur = work.front();
			work.pop_front();
			for (int prev : reverse[cur])
				if (!can[prev]) {
					can[prev] = true;
					work.push_back(prev);
				}
		}
		for (size_t id = 0; id < n; ++id)
			if (!can[id])
				return Verdict::fail(
						"no " + letter + " step is reachable from the derivative tuple " +
						derivative_tuple_text(ce, g.tuples[id]),
						words[id]);
	}
	return Verdict::pass();
}

ConnectedExpression pairings_to_cables(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::pairings)
		throw PreconditionError("the expression carries no pairings");
	ConnectedExpression out = ce;
	out.annotation = Annotation::cables;
	out.pairings.clear();
	for (const auto& [letter, tuples] : ce.pairings) {
		std::vector<Cable> cbls;
		for (const auto& t : tuples) {
			std::vector<std::vector<CableDuct>> per_pos;
			for (const auto& block : t) {
				std::vector<CableDuct> ducts;
				for (const auto& e : derive(block, letter))
					ducts.push_back(CableDuct{block, RxSet{e}});
				per_pos.push_back(std::move(ducts));
			}
			Cable acc;
			std::function<void(size_t)> build = [&](size_t pos) {
				if (pos == per_pos.size()) {
					cbls.push_back(acc);
					return;
				}
				for (const auto& d : per_pos[pos]) {
					acc.push_back(d);
					build(pos + 1);
					acc.pop_back();
				}
			};
			build(0);
		}
		out.cables[letter] = std::move(cbls);
	}
	out.validate();
	return out;
}

ConnectedExpression cables_to_pairings(const ConnectedExpression& ce) {
	ce.validate();
	if (ce.annotation != Annotation::cables)
		throw PreconditionError("the expression carries no cables");
	ConnectedExpression out = ce;
	out.annotation = Annotation::pairings;
	out.cables.clear();
	for (const auto& [letter, cbls] : ce.cables) {
		std::vector<PairingTuple> tuples;
		for (const auto& c : cbls) {
			PairingTuple t;
			for (const auto& d : c) t.push_back(d.pre);
			bool fresh = true;
			for (const auto& existing : tuples) {
				bool same = true;
				for (size_t pos = 0; pos < t.size(); ++pos)
					same = same && block_equal(existing[pos], t[pos]);
				if (same) fresh = false;
			}
			if (fresh) tuples.push_back(std::move(t));
		}
		out.pairings[letter] = std::move(tuples);
	}
	out.validate();
	return out;
}

}  // namespace kfc
