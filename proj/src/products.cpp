#include "kleenefc/products.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace kfc {

bool SequentialComponent::has_state(const std::string& s) const {
	return std::find(states.begin(), states.end(), s) != states.end();
}

std::vector<LocalMove> SequentialComponent::moves_from(const std::string& s) const {
	std::vector<LocalMove> out;
	for (const auto& m : moves)
		if (m.from == s) out.push_back(m);
	std::sort(out.begin(), out.end());
	return out;
}

std::vector<LocalMove> SequentialComponent::moves_on(const std::string& letter) const {
	std::vector<LocalMove> out;
	for (const auto& m : moves)
		if (m.letter == letter) out.push_back(m);
	std::sort(out.begin(), out.end());
	return out;
}

std::set<std::string> SequentialComponent::labels_from(const std::string& s) const {
	std::set<std::string> out;
	for (const auto& m : moves)
		if (m.from == s) out.insert(m.letter);
	return out;
}

void ProductSystem::validate() const {
	if (!alphabet) throw ValidationError("product system has no alphabet");
	if (components.size() != alphabet->width())
		throw ValidationError("component count does not match the alphabet width");
	for (size_t i = 0; i < components.size(); ++i) {
		const auto& c = components[i];
		std::string tag = "component " + std::to_string(i + 1);
		if (c.states.empty()) throw ValidationError(tag + " has no states");
		std::set<std::string> seen;
		for (const auto& s : c.states) {
			if (s.empty()) throw ValidationError(tag + " has an empty state name");
			if (!seen.insert(s).second)
				throw ValidationError(tag + " repeats the state " + s);
		}
		if (c.initials.empty())
			throw ValidationError(tag + " has no initial state");
		for (const auto& s : c.initials)
			if (!seen.count(s))
				throw ValidationError(tag + " has an unknown initial state " + s);
		for (const auto& s : c.finals)
			if (!seen.count(s))
				throw ValidationError(tag + " has an unknown final state " + s);
		const auto& letters = alphabet->components[i];
		for (const auto& m : c.moves) {
			if (!seen.count(m.from) || !seen.count(m.to))
				throw ValidationError(tag + " has a move over unknown states " +
				                      m.from + " -" + m.letter + "-> " + m.to);
			if (!std::binary_search(letters.begin(), letters.end(), m.letter))
				throw ValidationError(tag + " has a move on a letter outside its "
				                      "location: " + m.letter);
		}
	}
	if (initials.empty())
		throw ValidationError("product system declares no initial tuple");
	for (const auto& t : initials) {
		if (t.size() != components.size())
			throw ValidationError("initial tuple has the wrong width");
		for (size_t i = 0; i < t.size(); ++i)
			if (!components[i].has_state(t[i]))
				throw ValidationError("initial tuple uses an unknown state " + t[i]);
	}
	for (size_t i = 0; i < components.size(); ++i) {
		std::set<std::string> from_tuples;
		for (const auto& t : initials) from_tuples.insert(t[i]);
		std::set<std::string> declared(components[i].initials.begin(),
		                               components[i].initials.end());
		if (from_tuples != declared)
			throw ValidationError(
					"component " + std::to_string(i + 1) +
					" initial states disagree with the initial tuples");
	}
	if (acceptance == Acceptance::product) {
		if (!finals.empty())
			throw ValidationError(
					"product acceptance must not carry explicit final tuples");
	} else {
		for (const auto& t : finals) {
			if (t.size() != components.size())
				throw ValidationError("final tuple has the wrong width");
			for (size_t i = 0; i < t.size(); ++i)
				if (!components[i].has_state(t[i]))
					throw ValidationError("final tuple uses an unknown state " + t[i]);
		}
	}
	if (matchings) {
		for (const auto& [letter, tuples] : *matchings) {
			if (!alphabet->has(letter) || !alphabet->is_global(letter))
				throw ValidationError("matching declared for a non-global letter: " +
				                      letter);
			const auto& locs = alphabet->locations(letter);
			for (const auto& t : tuples) {
				if (t.size() != locs.size())
					throw ValidationError("matching tuple for " + letter +
					                      " has the wrong width");
				for (size_t pos = 0; pos < locs.size(); ++pos)
					if (!components[locs[pos]].has_state(t[pos]))
						throw ValidationError("matching tuple for " + letter +
						                      " uses an unknown state " + t[pos]);
			}
		}
	}
	if (globals) {
		for (const auto& [letter, moves] : *globals) {
			if (!alphabet->has(letter) || !alphabet->is_global(letter))
				throw ValidationError("joint moves declared for a non-global letter: " +
				                      letter);
			const auto& locs = alphabet->locations(letter);
			for (const auto& g : moves) {
				if (g.size() != locs.size())
					throw ValidationError("joint move for " + letter +
					                      " has the wrong width");
				for (size_t pos = 0; pos < locs.size(); ++pos) {
					const auto& comp = components[locs[pos]];
					if (g[pos].letter != letter)
						throw ValidationError("joint move part carries the wrong letter");
					auto all = comp.moves_on(letter);
					if (std::find(all.begin(), all.end(), g[pos]) == all.end())
						throw ValidationError(
								"joint move for " + letter + " uses a move absent from "
								"component " + std::to_string(locs[pos] + 1) + ": " +
								g[pos].from + " -" + letter + "-> " + g[pos].to);
				}
			}
		}
	}
}

bool ProductSystem::accepting_tuple(const StateTuple& t) const {
	if (acceptance == Acceptance::product) {
		for (size_t i = 0; i < components.size(); ++i)
			if (!components[i].finals.count(t[i])) return false;
		return true;
	}
	return std::find(finals.begin(), finals.end(), t) != finals.end();
}

std::vector<GlobalMove> ProductSystem::joint_moves(const std::string& letter) const {
	if (!alphabet->is_global(letter))
		throw ValidationError("joint moves are only defined for global letters");
	if (globals) {
		auto it = globals->find(letter);
		if (it != globals->end()) return it->second;
		return {};
	}
	const auto& locs = alphabet->locations(letter);
	std::vector<std::vector<LocalMove>> per_pos;
	for (int i : locs) per_pos.push_back(components[i].moves_on(letter));
	std::vector<GlobalMove> out;
	GlobalMove acc;
	std::function<void(size_t)> build = [&](size_t pos) {
		if (pos == per_pos.size()) {
			out.push_back(acc);
			return;
		}
		for (const auto& m : per_pos[pos]) {
			acc.push_back(m);
			build(pos + 1);
			acc.pop_back();
		}
	};
	build(0);
	return out;
}

std::string tuple_name(const StateTuple& t) {
	std::string out = "(";
	for (size_t i = 0; i < t.size(); ++i) {
		if (i) out += ",";
		out += t[i];
	}
	out += ")";
	return out;
}

namespace {

struct TupleGraph {
	std::vector<StateTuple> tuples;
	std::map<StateTuple, int> index;
	std::vector<std::vector<std::pair<std::string, int>>> steps;
	std::vector<int> initial_ids;
};

TupleGraph tuple_graph(const ProductSystem& ps, size_t cap) {
	ps.validate();
	TupleGraph g;
	std::deque<int> work;
	auto intern = [&](const StateTuple& t) {
		auto it = g.index.find(t);
		if (it != g.index.end()) return it->second;
		if (g.tuples.size() >= cap)
			throw ExplorationLimit("run graph exceeded the state cap of " +
			                       std::to_string(cap));
		int id = static_cast<int>(g.tuples.size());
		g.tuples.push_back(t);
		g.steps.emplace_back();
		g.index.emplace(t, id);
		work.push_back(id);
		return id;
	};
	for (const auto& t : ps.initials) g.initial_ids.push_back(intern(t));
	while (!work.empty()) {
		int id = work.front();
		work.pop_front();
		StateTuple t = g.tuples[id];
		for (const auto& letter : ps.alphabet->letters) {
			const auto& locs = ps.alphabet->locations(letter);
			if (locs.size() == 1) {
				int i = locs[0];
				for (const auto& m : ps.components[i].moves_on(letter)) {
					if (m.from != t[i]) continue;
					StateTuple next = t;
					next[i] = m.to;
					int to = intern(next);  // may grow g.steps
					g.steps[id].emplace_back(letter, to);
				}
			} else {
				for (const auto& gm : ps.joint_moves(letter)) {
					bool ok = true;
					for (size_t pos = 0; pos < locs.size(); ++pos)
						if (gm[pos].from != t[locs[pos]]) ok = false;
					if (!ok) continue;
					StateTuple next = t;
					for (size_t pos = 0; pos < locs.size(); ++pos)
						next[locs[pos]] = gm[pos].to;
					int to = intern(next);  // may grow g.steps
					g.steps[id].emplace_back(letter, to);
				}
			}
		}
		std::sort(g.steps[id].begin(), g.steps[id].end());
		g.steps[id].erase(std::unique(g.steps[id].begin(), g.steps[id].end()),
		                  g.steps[id].end());
	}
	return g;
}

}  // namespace

FiniteAcceptor run_graph(const ProductSystem& ps, size_t cap) {
	TupleGraph g = tuple_graph(ps, cap);
	FiniteAcceptor out;
	out.alphabet = ps.alphabet;
	for (const auto& t : g.tuples)
		out.add_state(tuple_name(t), ps.accepting_tuple(t));
	for (size_t id = 0; id < g.tuples.size(); ++id)
		for (const auto& [letter, to] : g.steps[id])
			out.add_edge(static_cast<int>(id), letter, to);
	if (g.initial_ids.size() == 1) {
		out.initial = g.initial_ids[0];
	} else {
		bool acc = false;
		for (int id : g.initial_ids) acc = acc || out.accepting[id];
		int start = out.add_state("start", acc);
		for (int id : g.initial_ids)
			for (const auto& [letter, to] : g.steps[id])
				out.add_edge(start, letter, to);
		out.initial = start;
	}
	return out;
}

FiniteAcceptor component_acceptor(const ProductSystem& ps, int location,
                                  size_t cap) {
	ps.validate();
	if (location < 0 || static_cast<size_t>(location) >= ps.components.size())
		throw ValidationError("location out of range");
	const auto& c = ps.components[location];
	(void)cap;
	FiniteAcceptor out;
	out.alphabet = make_alphabet({ps.alphabet->components[location]});
	std::map<std::string, int> index;
	for (const auto& s : c.states)
		index.emplace(s, out.add_state(s, c.finals.count(s) != 0));
	for (const auto& m : c.moves)
		out.add_edge(index.at(m.from), m.letter, index.at(m.to));
	if (c.initials.size() == 1) {
		out.initial = index.at(c.initials[0]);
	} else {
		bool acc = false;
		for (const auto& s : c.initials) acc = acc || c.finals.count(s);
		int start = out.add_state("start", acc);
		for (const auto& s : c.initials)
			for (const auto& m : c.moves_from(s))
				out.add_edge(start, m.letter, index.at(m.to));
		out.initial = start;
	}
	return out;
}

Verdict check_matchings_wellformed(const ProductSystem& ps) {
	ps.validate();
	if (!ps.matchings)
		throw PreconditionError("the system has no matching annotation");
	for (const auto& letter : ps.alphabet->letters) {
		if (!ps.alphabet->is_global(letter)) continue;
		const auto& locs = ps.alphabet->locations(letter);
		std::vector<StateTuple> tuples;
		auto it = ps.matchings->find(letter);
		if (it != ps.matchings->end()) tuples = it->second;
		for (size_t pos = 0; pos < locs.size(); ++pos) {
			std::set<std::string> projected;
			std::set<std::string> repeated;
			for (const auto& t : tuples) {
				if (!projected.insert(t[pos]).second) repeated.insert(t[pos]);
			}
			std::set<std::string> enabled;
			for (const auto& m : ps.components[locs[pos]].moves_on(letter))
				enabled.insert(m.from);
			if (!repeated.empty())
				return Verdict::fail("matching for " + letter + " places the state " +
				                     *repeated.begin() + " of component " +
				                     std::to_string(locs[pos] + 1) +
				                     " in two tuples");
			if (projected != enabled) {
				Verdict v = Verdict::fail(
						"matching for " + letter + " does not project onto the " +
						letter + "-enabled states of component " +
						std::to_string(locs[pos] + 1));
				std::string got, want;
				for (const auto& s : projected) got += s + " ";
				for (const auto& s : enabled) want += s + " ";
				v.details.push_back("projected: " + got);
				v.details.push_back("enabled:   " + want);
				return v;
			}
		}
	}
	return Verdict::pass();
}

Verdict check_conflict_equivalent(const ProductSystem& ps) {
	ps.validate();
	if (!ps.matchings)
		throw PreconditionError("the system has no matching annotation");
	for (const auto& [letter, tuples] : *ps.matchings) {
		const auto& locs = ps.alphabet->locations(letter);
		for (const auto& t : tuples) {
			for (size_t p = 0; p < locs.size(); ++p) {
				for (size_t q = p + 1; q < locs.size(); ++q) {
					auto lp = ps.components[locs[p]].labels_from(t[p]);
					auto lq = ps.components[locs[q]].labels_from(t[q]);
					if (lp != lq) {
						Verdict v = Verdict::fail(
								"matched states " + t[p] + " and " + t[q] + " for " +
								letter + " offer different letter sets");
						std::string sp, sq;
						for (const auto& x : lp) sp += x + " ";
						for (const auto& x : lq) sq += x + " ";
						v.details.push_back(t[p] + " offers: " + sp);
						v.details.push_back(t[q] + " offers: " + sq);
						return v;
					}
				}
			}
		}
	}
	return Verdict::pass();
}

namespace {

// Shortest access words in a tuple graph, for witnesses.
std::vector<Word> access_words(const TupleGraph& g) {
	std::vector<Word> words(g.tuples.size());
	std::vector<bool> seen(g.tuples.size(), false);
	std::deque<int> work;
	for (int id : g.initial_ids) {
		if (!seen[id]) {
			seen[id] = true;
			work.push_back(id);
		}
	}
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

Verdict check_consistent_matchings(const ProductSystem& ps, size_t cap) {
	ps.validate();
	if (!ps.matchings)
		throw PreconditionError("the system has no matching annotation");
	TupleGraph g = tuple_graph(ps, cap);
	std::vector<Word> words = access_words(g);
	for (size_t id = 0; id < g.tuples.size(); ++id) {
		const StateTuple& t = g.tuples[id];
		for (const auto& letter : ps.alphabet->letters) {
			if (!ps.alphabet->is_global(letter)) continue;
			const auto& locs = ps.alphabet->locations(letter);
			bool every = true;
			for (int i : locs) {
				bool has = false;
				for (const auto& m : ps.components[i].moves_on(letter))
					if (m.from == t[i]) has = true;
				every = every && has;
			}
			if (!every) continue;
			StateTuple proj;
			for (int i : locs) proj.push_back(t[i]);
			std::vector<StateTuple> tuples;
			auto it = ps.matchings->find(letter);
			if (it != ps.matchings->end()) tuples = it->second;
			if (std::find(tuples.begin(), tuples.end(), proj) == tuples.end()) {
				Verdict v = Verdict::fail(
						"reachable tuple " + tuple_name(t) + " enables " + letter +
						" everywhere but its projection " + tuple_name(proj) +
						" is not matched",
						words[id]);
				return v;
			}
		}
	}
	return Verdict::pass();
}

namespace {

std::set<std::pair<int, std::string>> move_sources(
		const DistributedAlphabet& alphabet, const std::string& letter,
		const GlobalMove& g) {
	std::set<std::pair<int, std::string>> out;
	const auto& locs = alphabet.locations(letter);
	for (size_t pos = 0; pos < locs.size(); ++pos)
		out.emplace(locs[pos], g[pos].from);
	return out;
}

std::string global_move_text(const GlobalMove& g) {
	std::string out = "<";
	for (size_t i = 0; i < g.size(); ++i) {
		if (i) out += ", ";
		out += g[i].from + " -" + g[i].letter + "-> " + g[i].to;
	}
	out += ">";
	return out;
}

// Every letter's joint steps, local letters included as unary moves.
std::vector<std::pair<std::string, GlobalMove>> all_joint_moves(
		const ProductSystem& ps) {
	std::vector<std::pair<std::string, GlobalMove>> out;
	for (const auto& letter : ps.alphabet->letters) {
		if (ps.alphabet->is_local(letter)) {
			int i = ps.alphabet->locations(letter)[0];
			for (const auto& m : ps.components[i].moves_on(letter))
				out.emplace_back(letter, GlobalMove{m});
		} else {
			for (const auto& g : ps.joint_moves(letter)) out.emplace_back(letter, g);
		}
	}
	return out;
}

}  // namespace

Verdict check_same_source(const ProductSystem& ps) {
	ps.validate();
	auto moves = all_joint_moves(ps);
	for (size_t i = 0; i < moves.size(); ++i) {
		for (size_t j = i + 1; j < moves.size(); ++j) {
			auto si = move_sources(*ps.alphabet, moves[i].first, moves[i].second);
			auto sj = move_sources(*ps.alphabet, moves[j].first, moves[j].second);
			std::vector<std::pair<int, std::string>> meet;
			std::set_intersection(si.begin(), si.end(), sj.begin(), sj.end(),
			                      std::back_inserter(meet));
			if (!meet.empty() && si != sj) {
				Verdict v = Verdict::fail(
						"moves on " + moves[i].first + " and " + moves[j].first +
						" share a source state but not their whole source set");
				v.details.push_back(moves[i].first + ": " +
				                    global_move_text(moves[i].second));
				v.details.push_back(moves[j].first + ": " +
				                    global_move_text(moves[j].second));
				return v;
			}
		}
	}
	return Verdict::pass();
}

std::vector<Compartment> compartments(const ProductSystem& ps) {
	ps.validate();
	std::vector<Compartment> out;
	for (const auto& letter : ps.alphabet->letters) {
		if (!ps.alphabet->is_global(letter)) continue;
		std::map<std::set<std::pair<int, std::string>>, std::vector<GlobalMove>>
				groups;
		for (const auto& g : ps.joint_moves(letter))
			groups[move_sources(*ps.alphabet, letter, g)].push_back(g);
		for (auto& [sources, moves] : groups) {
			Compartment c;
			c.letter = letter;
			c.sources = sources;
			std::sort(moves.begin(), moves.end());
			c.moves = std::move(moves);
			out.push_back(std::move(c));
		}
	}
	return out;
}

Verdict check_product_moves(const ProductSystem& ps) {
	for (const auto& c : compartments(ps)) {
		if (c.moves.empty()) continue;
		size_t width = c.moves.front().size();
		std::vector<std::set<std::string>> columns(width);
		for (const auto& g : c.moves)
			for (size_t pos = 0; pos < width; ++pos) columns[pos].insert(g[pos].to);
		std::set<GlobalMove> declared(c.moves.begin(), c.moves.end());
		GlobalMove acc;
		Verdict out = Verdict::pass();
		std::function<bool(size_t)> walk = [&](size_t pos) -> bool {
			if (pos == width) {
				if (!declared.count(acc)) {
					out = Verdict::fail(
							"compartment for " + c.letter + " misses the recombination " +
							global_move_text(acc));
					for (const auto& g : c.moves)
						out.details.push_back("declared: " + global_move_text(g));
					return true;
				}
				return false;
			}
			for (const auto& to : columns[pos]) {
				acc.push_back(LocalMove{c.moves.front()[pos].from, c.letter, to});
				bool stop = walk(pos + 1);
				acc.pop_back();
				if (stop) return true;
			}
			return false;
		};
		if (walk(0)) return out;
	}
	return Verdict::pass();
}

Verdict check_ps_live(const ProductSystem& ps, size_t cap) {
	TupleGraph g = tuple_graph(ps, cap);
	std::vector<Word> words = access_words(g);
	size_t n = g.tuples.size();
	std::vector<std::vector<int>> reverse(n);
	for (size_t id = 0; id < n; ++id)
		for (const auto& [letter, to] : g.steps[id])
			reverse[to].push_back(static_cast<int>(id));

	for (const auto& [letter, gm] : all_joint_moves(ps)) {
		const auto& locs = ps.alphabet->locations(letter);
		std::vector<bool> can(n, false);
		std::deque<int> work;
		for (size_t id = 0; id < n; ++id) {
			bool enabled = true;
			for (size_t pos = 0; pos < locs.size(); ++pos)
				if (g.tuples[id][locs[pos]] != gm[pos].from) enabled = false;
			if (enabled) {
				can[id] = true;
				work.push_back(static_cast<int>(id));
			}
		}
		while (!work.empty()) {
			int cur = work.front();
			work.pop_front();
			for (int prev : reverse[cur])
				if (!can[prev]) {
					can[prev] = true;
					work.push_back(prev);
				}
		}
		for (size_t id = 0; id < n; ++id) {
			if (!can[id]) {
				return Verdict::fail("the joint move " + global_move_text(gm) +
				                     " on " + letter +
				                     " is unreachable from the reachable tuple " +
				                     tuple_name(g.tuples[id]),
				                     words[id]);
			}
		}
	}
	return Verdict::pass();
}

std::vector<ProductSystem> decompose_union(const ProductSystem& ps) {
	ps.validate();
	if (ps.acceptance != Acceptance::subset)
		throw PreconditionError("only subset acceptance can be decomposed");
	std::vector<ProductSystem> out;
	std::set<StateTuple> seen;
	for (const auto& f : ps.finals) {
		if (!seen.insert(f).second) continue;
		ProductSystem part = ps;
		part.acceptance = Acceptance::product;
		part.finals.clear();
		for (size_t i = 0; i < part.components.size(); ++i)
			part.components[i].finals = {f[i]};
		out.push_back(std::move(part));
	}
	return out;
}

namespace {

std::string tag(size_t j, const std::string& s) {
	return std::to_string(j) + ":" + s;
}

std::vector<StateTuple> accepted_tuples(const ProductSystem& ps,
                                        size_t cap = 10000) {
	if (ps.acceptance == Acceptance::subset) {
		std::vector<StateTuple> out = ps.finals;
		std::sort(out.begin(), out.end());
		out.erase(std::unique(out.begin(), out.end()), out.end());
		return out;
	}
	size_t total = 1;
	for (const auto& c : ps.components) {
		total *= std::max<size_t>(c.finals.size(), 0);
		if (total > cap)
			throw ExplorationLimit("final tuple enumeration exceeds the cap");
	}
	std::vector<StateTuple> out;
	StateTuple acc;
	std::function<void(size_t)> build = [&](size_t i) {
		if (i == ps.components.size()) {
			out.push_back(acc);
			return;
		}
		for (const auto& s : ps.components[i].finals) {
			acc.push_back(s);
			build(i + 1);
			acc.pop_back();
		}
	};
	build(0);
	return out;
}

}  // namespace

ProductSystem union_combine(const std::vector<ProductSystem>& parts) {
	if (parts.empty()) throw PreconditionError("nothing to combine");
	for (const auto& p : parts) p.validate();
	const DistributedAlphabet& alphabet = *parts.front().alphabet;
	for (const auto& p : parts)
		if (!(*p.alphabet == alphabet))
			throw PreconditionError("summands disagree on the alphabet");

	ProductSystem out;
	out.alphabet = parts.front().alphabet;
	out.acceptance = Acceptance::subset;
	out.components.resize(alphabet.width());

	bool all_matchings = true, all_globals = true;
	for (const auto& p : parts) {
		all_matchings = all_matchings && p.matchings.has_value();
		all_globals = all_globals && p.globals.has_value();
	}
	std::map<std::string, std::vector<StateTuple>> matchings;
	std::map<std::string, std::vector<GlobalMove>> globals;

	for (size_t j = 0; j < parts.size(); ++j) {
		const ProductSystem& p = parts[j];
		for (size_t i = 0; i < p.components.size(); ++i) {
			const auto& c = p.components[i];
			auto& oc = out.components[i];
			for (const auto& s : c.states) oc.states.push_back(tag(j, s));
			for (const auto& s : c.initials) oc.initials.push_back(tag(j, s));
			for (const auto& s : c.finals) oc.finals.insert(tag(j, s));
			for (const auto& m : c.moves)
				oc.moves.push_back({tag(j, m.from), m.letter, tag(j, m.to)});
		}
		for (const auto& t : p.initials) {
			StateTuple nt;
			for (const auto& s : t) nt.push_back(tag(j, s));
			out.initials.push_back(std::move(nt));
		}
		for (const auto& t : accepted_tuples(p)) {
			StateTuple nt;
			for (const auto& s : t) nt.push_back(tag(j, s));
			out.finals.push_back(std::move(nt));
		}
		if (all_matchings) {
			for (const auto& [letter, tuples] : *p.matchings)
				for (const auto& t : tuples) {
					StateTuple nt;
					for (const auto& s : t) nt.push_back(tag(j, s));
					matchings[letter].push_back(std::move(nt));
				}
		}
		if (all_globals) {
			for (const auto& [letter, moves] : *p.globals)
				for (const auto& g : moves) {
					GlobalMove ng;
					for (const auto& m : g)
						ng.push_back({tag(j, m.from), m.letter, tag(j, m.to)});
					globals[letter].push_back(std::move(ng));
				}
		}
	}
	if (all_matchings) out.matchings = std::move(matchings);
	if (all_globals) out.globals = std::move(globals);
	out.validate();
	return out;
}

ProductSystem matchings_from_globals(const ProductSystem& ps) {
	ps.validate();
	if (!ps.globals)
		throw PreconditionError("the system has no joint-move annotation");
	ProductSystem out = ps;
	std::map<std::string, std::vector<StateTuple>> matchings;
	for (const auto& [letter, moves] : *ps.globals) {
		std::set<StateTuple> tuples;
		for (const auto& g : moves) {
			StateTuple t;
			for (const auto& m : g) t.push_back(m.from);
			tuples.insert(std::move(t));
		}
		matchings[letter] = {tuples.begin(), tuples.end()};
	}
	out.matchings = std::move(matchings);
	out.globals.reset();
	out.validate();
	return out;
}

ProductSystem globals_from_matchings(const ProductSystem& ps) {
	ps.validate();
	if (!ps.matchings)
		throw PreconditionError("the system has no matching annotation");
	ProductSystem out = ps;
	std::map<std::string, std::vector<GlobalMove>> globals;
	for (const auto& [letter, tuples] : *ps.matchings) {
		const auto& locs = ps.alphabet->locations(letter);
		std::set<GlobalMove> moves;
		for (const auto& t : tuples) {
			std::vector<std::vector<LocalMove>> per_pos;
			for (size_t pos = 0; pos < locs.size(); ++pos) {
				std::vector<LocalMove> from_here;
				for (const auto& m : ps.components[locs[pos]].moves_on(letter))
					if (m.from == t[pos]) from_here.push_back(m);
				if (from_here.empty())
					throw ValidationError("matched state " + t[pos] +
					                      " has no move on " + letter);
				per_pos.push_back(std::move(from_here));
			}
			GlobalMove acc;
			std::function<void(size_t)> build = [&](size_t pos) {
				if (pos == per_pos.size()) {
					moves.insert(acc);
					return;
				}
				for (const auto& m : per_pos[pos]) {
					acc.push_back(m);
					build(pos + 1);
					acc.pop_back();
				}
			};
			build(0);
		}
		globals[letter] = {moves.begin(), moves.end()};
	}
	out.globals = std::move(globals);
	out.matchings.reset();
	out.validate();
	return out;
}

}  // namespace kfc
