#include "kleenefc/nets.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace kfc {

void LabelledNet::validate() const {
	if (!alphabet) throw ValidationError("net has no alphabet");
	if (places.empty()) throw ValidationError("net has no places");
	std::set<std::string> seen;
	for (const auto& p : places) {
		if (p.empty()) throw ValidationError("empty place name");
		if (!seen.insert(p).second)
			throw ValidationError("duplicate place name: " + p);
	}
	std::set<std::string> ids;
	for (const auto& t : transitions) {
		if (t.id.empty()) throw ValidationError("empty transition id");
		if (!ids.insert(t.id).second)
			throw ValidationError("duplicate transition id: " + t.id);
		if (seen.count(t.id))
			throw ValidationError("transition id collides with a place name: " + t.id);
		if (!alphabet->has(t.label))
			throw ValidationError("transition " + t.id +
			                      " has a label outside the alphabet: " + t.label);
		if (t.pre.empty() || t.post.empty())
			throw ValidationError("transition " + t.id +
			                      " must consume and produce at least one token");
		for (const auto& p : t.pre)
			if (!seen.count(p))
				throw ValidationError("transition " + t.id + " consumes from an unknown place: " + p);
		for (const auto& p : t.post)
			if (!seen.count(p))
				throw ValidationError("transition " + t.id + " produces onto an unknown place: " + p);
	}
}

bool LabelledNet::has_place(const std::string& p) const {
	return std::find(places.begin(), places.end(), p) != places.end();
}

const Transition& LabelledNet::transition(const std::string& id) const {
	for (const auto& t : transitions)
		if (t.id == id) return t;
	throw ValidationError("unknown transition id: " + id);
}

std::set<std::string> LabelledNet::pre_places(const std::string& place) const {
	std::set<std::string> out;
	for (const auto& t : transitions)
		if (t.post.count(place)) out.insert(t.id);
	return out;
}

std::set<std::string> LabelledNet::post_places(const std::string& place) const {
	std::set<std::string> out;
	for (const auto& t : transitions)
		if (t.pre.count(place)) out.insert(t.id);
	return out;
}

void NetSystem::validate() const {
	net.validate();
	for (const auto& p : initial)
		if (!net.has_place(p))
			throw ValidationError("initial marking uses an unknown place: " + p);
	if (initial.empty()) throw ValidationError("empty initial marking");
	for (const auto& m : finals)
		for (const auto& p : m)
			if (!net.has_place(p))
				throw ValidationError("final marking uses an unknown place: " + p);
}

bool enabled(const LabelledNet&, const Marking& m, const Transition& t) {
	for (const auto& p : t.pre)
		if (!m.count(p)) return false;
	return true;
}

Marking fire(const LabelledNet& net, const Marking& m, const Transition& t) {
	if (!enabled(net, m, t))
		throw NotEnabled("transition " + t.id + " is not enabled at " +
		                 marking_text(m));
	Marking out = m;
	for (const auto& p : t.pre) out.erase(p);
	for (const auto& p : t.post) {
		if (out.count(p))
			throw BoundViolation("firing " + t.id + " at " + marking_text(m) +
			                     " puts a second token on " + p);
		out.insert(p);
	}
	return out;
}

std::string marking_text(const Marking& m) {
	std::string out = "{";
	bool first = true;
	for (const auto& p : m) {
		if (!first) out += ",";
		out += p;
		first = false;
	}
	out += "}";
	return out;
}

ReachabilityGraph reachability_graph(const NetSystem& sys, size_t cap) {
	sys.validate();
	ReachabilityGraph g;
	std::deque<int> work;
	auto intern = [&](const Marking& m) {
		auto it = g.index.find(m);
		if (it != g.index.end()) return it->second;
		if (g.markings.size() >= cap)
			throw ExplorationLimit("reachability exceeded the state cap of " +
			                       std::to_string(cap));
		int id = static_cast<int>(g.markings.size());
		g.markings.push_back(m);
		g.steps.emplace_back();
		g.index.emplace(m, id);
		work.push_back(id);
		return id;
	};
	intern(sys.initial);
	while (!work.empty()) {
		int id = work.front();
		work.pop_front();
		Marking m = g.markings[id];
		for (size_t ti = 0; ti < sys.net.transitions.size(); ++ti) {
			const Transition& t = sys.net.transitions[ti];
			if (!enabled(sys.net, m, t)) continue;
			int to = intern(fire(sys.net, m, t));
			g.steps[id].emplace_back(static_cast<int>(ti), t.label, to);
		}
	}
	return g;
}

FiniteAcceptor net_acceptor(const NetSystem& sys, size_t cap) {
	ReachabilityGraph g = reachability_graph(sys, cap);
	std::set<Marking> final_set(sys.finals.begin(), sys.finals.end());
	FiniteAcceptor out;
	out.alphabet = sys.net.alphabet;
	for (const auto& m : g.markings)
		out.add_state(marking_text(m), final_set.count(m) != 0);
	out.initial = 0;
	for (size_t id = 0; id < g.markings.size(); ++id)
		for (const auto& [ti, letter, to] : g.steps[id]) {
			(void)ti;
			out.add_edge(static_cast<int>(id), letter, to);
		}
	return out;
}

std::set<std::string> cluster_of(const LabelledNet& net, const std::string& node) {
	std::map<std::string, const Transition*> by_id;
	for (const auto& t : net.transitions) by_id.emplace(t.id, &t);
	if (!net.has_place(node) && !by_id.count(node))
		throw ValidationError("unknown node: " + node);

	std::set<std::string> cluster{node};
	bool changed = true;
	while (changed) {
		changed = false;
		for (const auto& t : net.transitions) {
			bool in = cluster.count(t.id) != 0;
			bool touches = false;
			for (const auto& p : t.pre)
				if (cluster.count(p)) touches = true;
			if (touches && !in) {
				cluster.insert(t.id);
				changed = true;
				in = true;
			}
			if (in) {
				for (const auto& p : t.pre)
					if (cluster.insert(p).second) changed = true;
			}
		}
	}
	return cluster;
}

std::vector<std::set<std::string>> clusters(const LabelledNet& net) {
	std::vector<std::set<std::string>> out;
	std::set<std::string> covered;
	for (const auto& p : net.places) {
		if (covered.count(p)) continue;
		auto c = cluster_of(net, p);
		covered.insert(c.begin(), c.end());
		out.push_back(std::move(c));
	}
	for (const auto& t : net.transitions) {
		if (covered.count(t.id)) continue;
		auto c = cluster_of(net, t.id);
		covered.insert(c.begin(), c.end());
		out.push_back(std::move(c));
	}
	return out;
}

Verdict check_free_choice(const LabelledNet& net) {
	net.validate();
	for (size_t i = 0; i < net.places.size(); ++i) {
		for (size_t j = i + 1; j < net.places.size(); ++j) {
			auto a = net.post_places(net.places[i]);
			auto b = net.post_places(net.places[j]);
			std::vector<std::string> meet;
			std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
			                      std::back_inserter(meet));
			if (!meet.empty() && a != b) {
				Verdict v = Verdict::fail("places " + net.places[i] + " and " +
				                          net.places[j] +
				                          " share an output transition but feed "
				                          "different choice sets");
				std::string sa, sb;
				for (const auto& x : a) sa += x + " ";
				for (const auto& x : b) sb += x + " ";
				v.details.push_back(net.places[i] + " feeds: " + sa);
				v.details.push_back(net.places[j] + " feeds: " + sb);
				return v;
			}
		}
	}
	return Verdict::pass();
}

namespace {

// Transitions labelled by each location's letters.
std::vector<std::set<std::string>> location_transitions(const LabelledNet& net) {
	std::vector<std::set<std::string>> out(net.alphabet->width());
	for (const auto& t : net.transitions)
		for (int i : net.alphabet->locations(t.label)) out[i].insert(t.id);
	return out;
}

struct ComponentCheck {
	bool ok = false;
	std::string reason;
};

// A valid component for a location: place-closed, one-token sequential for
// exactly the location's transitions, connected, singly marked.
ComponentCheck component_valid(const NetSystem& sys,
                               const std::set<std::string>& places,
                               const std::set<std::string>& trans,
                               int location) {
	const LabelledNet& net = sys.net;
	std::string tag = "location " + std::to_string(location + 1);
	if (places.empty()) return {false, tag + ": empty place set"};
	for (const auto& p : places) {
		for (const auto& t : net.transitions) {
			bool adjacent = t.pre.count(p) || t.post.count(p);
			if (adjacent && !trans.count(t.id))
				return {false, tag + ": place " + p +
				               " touches a transition of another location (" +
				               t.id + ")"};
		}
	}
	for (const auto& id : trans) {
		const Transition& t = net.transition(id);
		size_t in = 0, out = 0;
		for (const auto& p : t.pre)
			if (places.count(p)) ++in;
		for (const auto& p : t.post)
			if (places.count(p)) ++out;
		if (in != 1 || out != 1)
			return {false, tag + ": transition " + id + " consumes " +
			               std::to_string(in) + " and produces " +
			               std::to_string(out) +
			               " tokens in the component (need exactly one each)"};
	}
	// connectedness of the undirected place/transition graph
	std::set<std::string> nodes = places;
	nodes.insert(trans.begin(), trans.end());
	std::deque<std::string> work{*places.begin()};
	std::set<std::string> seen{*places.begin()};
	while (!work.empty()) {
		std::string n = work.front();
		work.pop_front();
		for (const auto& id : trans) {
			const Transition& t = net.transition(id);
			bool touches = (n == id);
			if (places.count(n) && (t.pre.count(n) || t.post.count(n))) touches = true;
			if (!touches) continue;
			std::vector<std::string> next;
			if (n != id) next.push_back(id);
			if (n == id) {
				for (const auto& p : t.pre)
					if (places.count(p)) next.push_back(p);
				for (const auto& p : t.post)
					if (places.count(p)) next.push_back(p);
			}
			for (const auto& m : next)
				if (seen.insert(m).second) work.push_back(m);
		}
	}
	if (seen.size() != nodes.size())
		return {false, tag + ": component is not connected"};
	size_t marked = 0;
	for (const auto& p : places)
		if (sys.initial.count(p)) ++marked;
	if (marked != 1)
		return {false, tag + ": initial marking puts " + std::to_string(marked) +
		               " tokens on the component (need exactly one)"};
	return {true, ""};
}

}  // namespace

CoverResult find_place_cover(const NetSystem& sys) {
	sys.validate();
	const LabelledNet& net = sys.net;
	size_t width = net.alphabet->width();
	std::vector<std::set<std::string>> trans = location_transitions(net);

	CoverResult r;
	for (size_t i = 0; i < width; ++i) {
		if (trans[i].empty()) {
			r.reason = "location " + std::to_string(i + 1) +
			           " labels no transition, so no sequential component can "
			           "carry its token";
			return r;
		}
	}

	// a place can only belong to a location whose transitions cover all of
	// its surrounding transitions
	std::vector<std::set<std::string>> candidates(width);
	for (const auto& p : net.places) {
		std::set<std::string> around = net.pre_places(p);
		auto post = net.post_places(p);
		around.insert(post.begin(), post.end());
		for (size_t i = 0; i < width; ++i) {
			bool fits = true;
			for (const auto& id : around)
				if (!trans[i].count(id)) fits = false;
			if (fits && !around.empty()) candidates[i].insert(p);
		}
	}

	std::vector<std::set<std::string>> chosen(width);
	bool greedy_ok = true;
	std::string greedy_reason;
	for (size_t i = 0; i < width; ++i) {
		auto check = component_valid(sys, candidates[i], trans[i],
		                             static_cast<int>(i));
		if (!check.ok) {
			greedy_ok = false;
			greedy_reason = check.reason;
			break;
		}
		chosen[i] = candidates[i];
	}

	if (greedy_ok) {
		std::set<std::string> covered;
		for (const auto& s : chosen) covered.insert(s.begin(), s.end());
		if (covered.size() == net.places.size()) {
			r.ok = true;
			r.cover.components = chosen;
			return r;
		}
		greedy_reason = "candidate components do not cover every place";
	}

	// exhaustive fallback for small nets: enumerate valid subsets per
	// location, then search for a covering choice
	if (net.places.size() <= 20) {
		std::vector<std::vector<std::set<std::string>>> options(width);
		bool feasible = true;
		for (size_t i = 0; i < width && feasible; ++i) {
			std::vector<std::string> cand(candidates[i].begin(), candidates[i].end());
			if (cand.size() > 16) {
				feasible = false;
				break;
			}
			size_t total = size_t{1} << cand.size();
			for (size_t mask = 1; mask < total; ++mask) {
				std::set<std::string> subset;
				for (size_t b = 0; b < cand.size(); ++b)
					if (mask & (size_t{1} << b)) subset.insert(cand[b]);
				if (component_valid(sys, subset, trans[i], static_cast<int>(i)).ok)
					options[i].push_back(std::move(subset));
			}
			if (options[i].empty()) feasible = false;
		}
		if (feasible) {
			std::vector<size_t> pick(width, 0);
			std::function<bool(size_t)> search = [&](size_t i) -> bool {
				if (i == width) {
					std::set<std::string> covered;
					for (size_t j = 0; j < width; ++j) {
						const auto& s = options[j][pick[j]];
						covered.insert(s.begin(), s.end());
					}
					return covered.size() == net.places.size();
				}
				for (pick[i] = 0; pick[i] < options[i].size(); ++pick[i])
					if (search(i + 1)) return true;
				return false;
			};
			if (search(0)) {
				r.ok = true;
				r.cover.components.resize(width);
				for (size_t j = 0; j < width; ++j)
					r.cover.components[j] = options[j][pick[j]];
				return r;
			}
		}
	}

	r.reason = greedy_reason.empty()
	               ? "no covering family of sequential components exists"
	               : greedy_reason;
	return r;
}

std::vector<std::string> marking_tuple(const Marking& m, const PlaceCover& cover) {
	std::vector<std::string> tuple;
	for (size_t i = 0; i < cover.components.size(); ++i) {
		std::vector<std::string> hit;
		for (const auto& p : cover.components[i])
			if (m.count(p)) hit.push_back(p);
		if (hit.size() != 1)
			throw ValidationError("marking " + marking_text(m) + " puts " +
			                      std::to_string(hit.size()) +
			                      " tokens on component " + std::to_string(i + 1));
		tuple.push_back(hit[0]);
	}
	return tuple;
}

Marking tuple_marking(const std::vector<std::string>& tuple,
                      const PlaceCover& cover) {
	if (tuple.size() != cover.components.size())
		throw ValidationError("tuple width does not match the cover");
	Marking m;
	for (size_t i = 0; i < tuple.size(); ++i) {
		if (!cover.components[i].count(tuple[i]))
			throw ValidationError("place " + tuple[i] + " is not on component " +
			                      std::to_string(i + 1));
		m.insert(tuple[i]);
	}
	return m;
}

std::vector<ClusterChoice> cluster_post_analysis(const LabelledNet& net,
                                                 const PlaceCover& cover) {
	net.validate();
	std::vector<ClusterChoice> out;
	for (const auto& cluster : clusters(net)) {
		std::set<std::string> cluster_places;
		std::map<std::string, std::vector<std::string>> by_letter;
		for (const auto& node : cluster) {
			if (net.has_place(node)) cluster_places.insert(node);
		}
		for (const auto& t : net.transitions)
			if (cluster.count(t.id)) by_letter[t.label].push_back(t.id);
		for (auto& [letter, ids] : by_letter) {
			std::sort(ids.begin(), ids.end());
			ClusterChoice c;
			c.cluster_places = cluster_places;
			c.letter = letter;
			c.transition_ids = ids;
			const auto& locs = net.alphabet->locations(letter);
			for (const auto& id : ids) {
				const Transition& t = net.transition(id);
				std::vector<std::string> tuple;
				for (int i : locs) {
					std::vector<std::string> hit;
					for (const auto& p : t.post)
						if (cover.components[i].count(p)) hit.push_back(p);
					if (hit.size() != 1)
						throw ValidationError(
								"transition " + id + " does not produce exactly one token "
								"on component " + std::to_string(i + 1));
					tuple.push_back(hit[0]);
				}
				c.post.push_back(std::move(tuple));
			}
			std::sort(c.post.begin(), c.post.end());
			std::vector<std::set<std::string>> columns(locs.size());
			for (const auto& tuple : c.post)
				for (size_t j = 0; j < tuple.size(); ++j) columns[j].insert(tuple[j]);
			std::vector<std::string> acc;
			std::function<void(size_t)> build = [&](size_t j) {
				if (j == columns.size()) {
					c.recombined.push_back(acc);
					return;
				}
				for (const auto& p : columns[j]) {
					acc.push_back(p);
					build(j + 1);
					acc.pop_back();
				}
			};
			build(0);
			std::sort(c.recombined.begin(), c.recombined.end());
			out.push_back(std::move(c));
		}
	}
	std::sort(out.begin(), out.end(), [](const ClusterChoice& a,
	                                     const ClusterChoice& b) {
		if (a.cluster_places != b.cluster_places)
			return a.cluster_places < b.cluster_places;
		return a.letter < b.letter;
	});
	return out;
}

namespace {

std::string tuple_text(const std::vector<std::string>& t) {
	std::string out = "(";
	for (size_t i = 0; i < t.size(); ++i) {
		if (i) out += ",";
		out += t[i];
	}
	out += ")";
	return out;
}

}  // namespace

Verdict check_distributed_choice(const LabelledNet& net, const PlaceCover& cover) {
	for (const auto& c : cluster_post_analysis(net, cover)) {
		std::set<std::vector<std::string>> declared(c.post.begin(), c.post.end());
		for (const auto& tuple : c.recombined) {
			if (!declared.count(tuple)) {
				Verdict v = Verdict::fail(
						"cluster at " + marking_text(c.cluster_places) + " offers " +
						c.letter + " choices whose recombination " + tuple_text(tuple) +
						" is not an offered outcome");
				for (const auto& p : c.post)
					v.details.push_back("offered: " + tuple_text(p));
				return v;
			}
		}
	}
	return Verdict::pass();
}

Verdict check_finals_product(const NetSystem& sys, const PlaceCover& cover) {
	std::set<std::vector<std::string>> tuples;
	for (const auto& m : sys.finals) tuples.insert(marking_tuple(m, cover));
	if (tuples.empty()) return Verdict::pass();
	size_t width = cover.components.size();
	std::vector<std::set<std::string>> columns(width);
	for (const auto& t : tuples)
		for (size_t i = 0; i < width; ++i) columns[i].insert(t[i]);
	std::vector<std::string> acc;
	Verdict out = Verdict::pass();
	std::function<bool(size_t)> walk = [&](size_t i) -> bool {
		if (i == width) {
			if (!tuples.count(acc)) {
				out = Verdict::fail(
						"final markings are not a product: the recombination " +
						tuple_text(acc) + " is missing");
				return true;
			}
			return false;
		}
		for (const auto& p : columns[i]) {
			acc.push_back(p);
			bool stop = walk(i + 1);
			acc.pop_back();
			if (stop) return true;
		}
		return false;
	};
	walk(0);
	return out;
}

Verdict check_net_live(const NetSystem& sys, size_t cap) {
	ReachabilityGraph g = reachability_graph(sys, cap);
	size_t n = g.markings.size();
	std::vector<std::vector<int>> reverse(n);
	for (size_t id = 0; id < n; ++id)
		for (const auto& [ti, letter, to] : g.steps[id]) {
			(void)ti;
			(void)letter;
			reverse[to].push_back(static_cast<int>(id));
		}

	// shortest firing words, for witnesses
	std::vector<int> parent(n, -1), via(n, -1);
	std::deque<int> bfs{0};
	std::vector<bool> seen(n, false);
	seen[0] = true;
	while (!bfs.empty()) {
		int cur = bfs.front();
		bfs.pop_front();
		for (size_t e = 0; e < g.steps[cur].size(); ++e) {
			int to = std::get<2>(g.steps[cur][e]);
			if (!seen[to]) {
				seen[to] = true;
				parent[to] = cur;
				via[to] = static_cast<int>(e);
				bfs.push_back(to);
			}
		}
	}
	auto word_to = [&](int id) {
		Word w;
		for (int cur = id; parent[cur] >= 0; cur = parent[cur])
			w.push_back(std::get<1>(g.steps[parent[cur]][via[cur]]));
		std::reverse(w.begin(), w.end());
		return w;
	};

	for (size_t ti = 0; ti < sys.net.transitions.size(); ++ti) {
		const Transition& t = sys.net.transitions[ti];
		std::vector<bool> can(n, false);
		std::deque<int> work;
		for (size_t id = 0; id < n; ++id)
			if (enabled(sys.net, g.markings[id], t)) {
				can[id] = true;
				work.push_back(static_cast<int>(id));
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
				Verdict v = Verdict::fail(
						"transition " + t.id + " can never fire again from " +
						marking_text(g.markings[id]),
						word_to(static_cast<int>(id)));
				return v;
			}
		}
	}
	return Verdict::pass();
}

}  // namespace kfc
