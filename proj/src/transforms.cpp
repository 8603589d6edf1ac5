#include "kleenefc/transforms.hpp"
// Conversions between the three system kinds. Component languages are solved
// by state elimination; expressions turn into systems through derivative-set
// automata. Every conversion re-checks the language of its result against
// its input and reports the outcome instead of assuming the construction.

#include "kleenefc/json_io.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace kfc {

namespace {

std::string verdict_word(const Verdict& v) { return v.ok ? "pass" : "fail"; }

void verify_languages(ConversionReport& report, const FiniteAcceptor& input,
                      const FiniteAcceptor& output, size_t cap) {
	LanguageComparison cmp = acceptor_equal(input, output, cap);
	report.verified = cmp.equal;
	if (!cmp.equal && cmp.witness) {
		report.witness = cmp.witness;
		report.notes.push_back("languages differ at " + word_text(*cmp.witness) +
		                       (cmp.witness_in_first ? " (input only)"
		                                             : " (output only)"));
	}
}

std::string sum_digest(const SumExpression& e) {
	ExpressionInput in;
	in.alphabet = e.alphabet;
	in.sum = e;
	return digest_hex(expression_body_text(in) + expression_annotations_text(in));
}

std::string ce_digest(const ConnectedExpression& ce) {
	SumExpression e;
	e.alphabet = ce.alphabet;
	e.summands = {ce};
	return sum_digest(e);
}

// Whether the subset finals decompose as a product of per-location sets.
std::string ps_finals_product(const ProductSystem& ps) {
	if (ps.acceptance == Acceptance::product) return "pass";
	std::set<StateTuple> declared(ps.finals.begin(), ps.finals.end());
	size_t width = ps.alphabet->width();
	std::vector<std::set<std::string>> columns(width);
	for (const auto& t : declared)
		for (size_t i = 0; i < width; ++i) columns[i].insert(t[i]);
	size_t product = declared.empty() ? 0 : 1;
	for (const auto& col : columns) product *= col.size();
	return product == declared.size() ? "pass" : "fail";
}

std::set<StateTuple> reachable_tuples(const ProductSystem& ps, size_t cap) {
	std::map<std::string, std::vector<GlobalMove>> joint;
	for (const auto& letter : ps.alphabet->letters)
		if (ps.alphabet->is_global(letter))
			joint[letter] = ps.joint_moves(letter);
	std::set<StateTuple> seen(ps.initials.begin(), ps.initials.end());
	std::vector<StateTuple> queue(seen.begin(), seen.end());
	while (!queue.empty()) {
		StateTuple t = queue.back();
		queue.pop_back();
		for (const auto& letter : ps.alphabet->letters) {
			const auto& locs = ps.alphabet->locations(letter);
			if (locs.size() == 1) {
				int i = locs[0];
				for (const auto& m : ps.components[i].moves_from(t[i])) {
					if (m.letter != letter) continue;
					StateTuple u = t;
					u[i] = m.to;
					if (seen.insert(u).second) queue.push_back(u);
				}
			} else {
				for (const auto& g : joint[letter]) {
					bool fits = true;
					for (size_t pos = 0; pos < locs.size(); ++pos)
						fits = fits && g[pos].from == t[locs[pos]];
					if (!fits) continue;
					StateTuple u = t;
					for (size_t pos = 0; pos < locs.size(); ++pos)
						u[locs[pos]] = g[pos].to;
					if (seen.insert(u).second) queue.push_back(u);
				}
			}
		}
		if (seen.size() > cap)
			throw ExplorationLimit("tuple exploration exceeded the state cap");
	}
	return seen;
}

// Drops component states that never occur in a reachable tuple, along with
// the moves, joint moves and final tuples that mention them.
void prune_to_reachable(ProductSystem& ps, size_t cap) {
	std::set<StateTuple> keep = reachable_tuples(ps, cap);
	size_t width = ps.alphabet->width();
	std::vector<std::set<std::string>> kept(width);
	for (const auto& t : keep)
		for (size_t i = 0; i < width; ++i) kept[i].insert(t[i]);
	for (size_t i = 0; i < width; ++i) {
		SequentialComponent& c = ps.components[i];
		std::vector<std::string> states;
		for (const auto& s : c.states)
			if (kept[i].count(s)) states.push_back(s);
		c.states = states;
		std::set<std::string> finals;
		for (const auto& s : c.finals)
			if (kept[i].count(s)) finals.insert(s);
		c.finals = finals;
		std::vector<LocalMove> moves;
		for (const auto& m : c.moves)
			if (kept[i].count(m.from) && kept[i].count(m.to)) moves.push_back(m);
		c.moves = moves;
	}
	if (ps.globals) {
		for (auto& [letter, moves] : *ps.globals) {
			const auto& locs = ps.alphabet->locations(letter);
			std::vector<GlobalMove> still;
			for (const auto& g : moves) {
				bool alive = true;
				for (size_t pos = 0; pos < locs.size(); ++pos)
					alive = alive && kept[locs[pos]].count(g[pos].from) &&
					        kept[locs[pos]].count(g[pos].to);
				if (alive) still.push_back(g);
			}
			moves = still;
		}
	}
	std::vector<StateTuple> finals;
	for (const auto& t : ps.finals) {
		bool alive = true;
		for (size_t i = 0; i < width; ++i) alive = alive && kept[i].count(t[i]);
		if (alive) finals.push_back(t);
	}
	ps.finals = finals;
}

template <class F>
std::string summand_aggregate(const SumExpression& e, Annotation need, F&& f,
                              std::vector<std::string>& notes,
                              const char* what) {
	bool any = false;
	for (size_t j = 0; j < e.summands.size(); ++j) {
		const ConnectedExpression& ce = e.summands[j];
		if (ce.annotation != need) continue;
		any = true;
		Verdict v = f(ce);
		if (!v.ok) {
			notes.push_back("summand " + std::to_string(j + 1) + ", " + what +
			                ": " + v.reason);
			return "fail";
		}
	}
	return any ? "pass" : "n/a";
}

std::string all_action_live(const SumExpression& e, size_t cap,
                            std::vector<std::string>& notes) {
	for (size_t j = 0; j < e.summands.size(); ++j) {
		Verdict v = check_action_live(e.summands[j], cap);
		if (!v.ok) {
			notes.push_back("summand " + std::to_string(j + 1) +
			                ", action liveness: " + v.reason);
			return "fail";
		}
	}
	return e.summands.empty() ? "n/a" : "pass";
}

}  // namespace

std::string report_text(const ConversionReport& report) {
	std::ostringstream out;
	out << report.direction << "\n";
	out << "  input digest:       " << report.input_digest << "\n";
	out << "  language preserved: " << (report.verified ? "yes" : "NO") << "\n";
	if (report.witness)
		out << "  separating word:    " << word_text(*report.witness) << "\n";
	for (const auto& p : report.properties)
		out << "  " << p.name << ": " << p.source << " -> " << p.target << "\n";
	for (const auto& n : report.notes) out << "  note: " << n << "\n";
	return out.str();
}

Converted<ProductSystem> net_to_products(const NetSystem& sys, size_t cap) {
	sys.validate();
	ConversionReport report;
	report.direction = "net -> products";
	report.input_digest = digest_hex(net_to_text(sys));
	CoverResult cover = find_place_cover(sys);
	if (!cover.ok) throw PreconditionError(cover.reason);

	const DistributedAlphabet& alphabet = *sys.net.alphabet;
	size_t width = alphabet.width();
	ProductSystem ps;
	ps.alphabet = sys.net.alphabet;
	ps.components.resize(width);
	std::vector<std::set<LocalMove>> moves(width);
	std::map<std::string, std::vector<GlobalMove>> globals;
	bool has_global_letter = false;
	for (const auto& letter : alphabet.letters)
		has_global_letter = has_global_letter || alphabet.is_global(letter);

	for (size_t i = 0; i < width; ++i) {
		const std::set<std::string>& places = cover.cover.components[i];
		SequentialComponent& c = ps.components[i];
		c.states = {places.begin(), places.end()};
		for (const auto& p : places)
			if (sys.initial.count(p)) c.initials.push_back(p);
	}
	for (const auto& t : sys.net.transitions) {
		const auto& locs = alphabet.locations(t.label);
		GlobalMove g;
		for (int i : locs) {
			std::string from, to;
			for (const auto& p : t.pre)
				if (cover.cover.components[i].count(p)) from = p;
			for (const auto& p : t.post)
				if (cover.cover.components[i].count(p)) to = p;
			g.push_back({from, t.label, to});
		}
		for (size_t pos = 0; pos < locs.size(); ++pos)
			moves[locs[pos]].insert(g[pos]);
		if (locs.size() > 1) globals[t.label].push_back(g);
	}
	for (size_t i = 0; i < width; ++i)
		ps.components[i].moves = {moves[i].begin(), moves[i].end()};
	for (auto& [letter, list] : globals) {
		std::sort(list.begin(), list.end());
		list.erase(std::unique(list.begin(), list.end()), list.end());
	}
	if (has_global_letter) ps.globals = globals;

	ps.acceptance = Acceptance::subset;
	ps.initials = {marking_tuple(sys.initial, cover.cover)};
	std::set<StateTuple> finals;
	for (const auto& m : sys.finals)
		finals.insert(marking_tuple(m, cover.cover));
	ps.finals = {finals.begin(), finals.end()};
	for (const auto& t : ps.finals)
		for (size_t i = 0; i < width; ++i) ps.components[i].finals.insert(t[i]);
	ps.validate();

	report.properties.push_back(
			{"free choice -> same source", verdict_word(check_free_choice(sys.net)),
	     verdict_word(check_same_source(ps))});
	report.properties.push_back(
			{"distributed choice -> product moves",
	     verdict_word(check_distributed_choice(sys.net, cover.cover)),
	     verdict_word(check_product_moves(ps))});
	report.properties.push_back(
			{"finals form a product -> finals form a product",
	     verdict_word(check_finals_product(sys, cover.cover)),
	     ps_finals_product(ps)});
	report.properties.push_back({"live -> live",
	                             verdict_word(check_net_live(sys, cap)),
	                             verdict_word(check_ps_live(ps, cap))});

	verify_languages(report, net_acceptor(sys, cap), run_graph(ps, cap), cap);
	return {std::move(ps), std::move(report)};
}

Converted<NetSystem> products_to_net(const ProductSystem& ps, size_t cap) {
	ps.validate();
	ConversionReport report;
	report.direction = "products -> net";
	report.input_digest = digest_hex(ps_to_text(ps));
	if (ps.initials.size() != 1)
		throw PreconditionError("a net takes a single initial marking; a system "
		                        "with several initial tuples has none");

	const DistributedAlphabet& alphabet = *ps.alphabet;
	size_t width = alphabet.width();
	std::map<std::string, int> occurrences;
	for (const auto& c : ps.components)
		for (const auto& s : c.states) ++occurrences[s];
	auto place = [&](int i, const std::string& s) {
		return occurrences.at(s) > 1 ? s + "@" + std::to_string(i + 1) : s;
	};

	NetSystem sys;
	sys.net.alphabet = ps.alphabet;
	std::set<std::string> places;
	for (size_t i = 0; i < width; ++i)
		for (const auto& s : ps.components[i].states)
			places.insert(place((int)i, s));
	sys.net.places = {places.begin(), places.end()};

	int counter = 0;
	auto fresh_id = [&]() {
		std::string id;
		do {
			id = "t" + std::to_string(++counter);
		} while (places.count(id));
		return id;
	};
	for (const auto& letter : alphabet.letters) {
		const auto& locs = alphabet.locations(letter);
		if (locs.size() == 1) {
			int i = locs[0];
			std::vector<LocalMove> moves = ps.components[i].moves_on(letter);
			std::sort(moves.begin(), moves.end());
			moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
			for (const auto& m : moves) {
				Transition t;
				t.id = fresh_id();
				t.label = letter;
				t.pre = {place(i, m.from)};
				t.post = {place(i, m.to)};
				sys.net.transitions.push_back(std::move(t));
			}
		} else {
			std::vector<GlobalMove> joint = ps.joint_moves(letter);
			std::sort(joint.begin(), joint.end());
			joint.erase(std::unique(joint.begin(), joint.end()), joint.end());
			for (const auto& g : joint) {
				Transition t;
				t.id = fresh_id();
				t.label = letter;
				for (size_t pos = 0; pos < locs.size(); ++pos) {
					t.pre.insert(place(locs[pos], g[pos].from));
					t.post.insert(place(locs[pos], g[pos].to));
				}
				sys.net.transitions.push_back(std::move(t));
			}
		}
	}
	for (size_t i = 0; i < width; ++i)
		sys.initial.insert(place((int)i, ps.initials[0][i]));
	if (ps.acceptance == Acceptance::subset) {
		std::set<Marking> finals;
		for (const auto& t : ps.finals) {
			Marking m;
			for (size_t i = 0; i < width; ++i) m.insert(place((int)i, t[i]));
			finals.insert(m);
		}
		sys.finals = {finals.begin(), finals.end()};
	} else {
		size_t count = 1;
		for (const auto& c : ps.components) count *= c.finals.size();
		if (count > 10000)
			throw ExplorationLimit("too many final markings to enumerate");
		std::vector<Marking> acc{Marking{}};
		for (size_t i = 0; i < width; ++i) {
			std::vector<Marking> next;
			for (const auto& m : acc)
				for (const auto& f : ps.components[i].finals) {
					Marking grown = m;
					grown.insert(place((int)i, f));
					next.push_back(grown);
				}
			acc = next;
		}
		sys.finals = acc;
	}
	sys.validate();

	report.properties.push_back({"same source -> free choice",
	                             verdict_word(check_same_source(ps)),
	                             verdict_word(check_free_choice(sys.net))});
	CoverResult cover = find_place_cover(sys);
	report.properties.push_back(
			{"product moves -> distributed choice",
	     verdict_word(check_product_moves(ps)),
	     cover.ok ? verdict_word(check_distributed_choice(sys.net, cover.cover))
	              : "n/a"});
	report.properties.push_back(
			{"finals form a product -> finals form a product",
	     ps_finals_product(ps),
	     cover.ok ? verdict_word(check_finals_product(sys, cover.cover))
	              : "n/a"});
	report.properties.push_back({"live -> live",
	                             verdict_word(check_ps_live(ps, cap)),
	                             verdict_word(check_net_live(sys, cap))});
	if (!cover.ok)
		report.notes.push_back("no place cover found on the result: " +
		                       cover.reason);

	verify_languages(report, run_graph(ps, cap), net_acceptor(sys, cap), cap);
	return {std::move(sys), std::move(report)};
}

namespace {

// Component restricted to the moves actually used by the joint-move
// annotation, then to the locally reachable states.
SequentialComponent restricted_component(const ProductSystem& ps, int loc) {
	const SequentialComponent& c = ps.components[loc];
	std::vector<LocalMove> kept;
	for (const auto& m : c.moves) {
		if (ps.alphabet->is_local(m.letter) || !ps.globals) {
			kept.push_back(m);
			continue;
		}
		const auto& locs = ps.alphabet->locations(m.letter);
		size_t pos =
				std::find(locs.begin(), locs.end(), loc) - locs.begin();
		bool used = false;
		auto it = ps.globals->find(m.letter);
		if (it != ps.globals->end())
			for (const auto& g : it->second) used = used || g[pos] == m;
		if (used) kept.push_back(m);
	}
	std::set<std::string> seen(c.initials.begin(), c.initials.end());
	std::vector<std::string> queue(seen.begin(), seen.end());
	while (!queue.empty()) {
		std::string s = queue.back();
		queue.pop_back();
		for (const auto& m : kept)
			if (m.from == s && seen.insert(m.to).second) queue.push_back(m.to);
	}
	SequentialComponent out;
	out.states = {seen.begin(), seen.end()};
	out.initials = c.initials;
	for (const auto& s : c.finals)
		if (seen.count(s)) out.finals.insert(s);
	for (const auto& m : kept)
		if (seen.count(m.from)) out.moves.push_back(m);
	return out;
}

// Kleene's construction by state elimination, lowest-degree states first.
RxPtr component_regex(const SequentialComponent& c) {
	const int n = (int)c.states.size();
	std::map<std::string, int> index;
	for (int i = 0; i < n; ++i) index[c.states[i]] = i + 1;
	const int start = 0;
	const int end = n + 1;
	std::map<std::pair<int, int>, RxPtr> edge;
	auto add = [&](int x, int y, const RxPtr& r) {
		auto it = edge.find({x, y});
		if (it == edge.end())
			edge[{x, y}] = r;
		else
			it->second = rx_sum({it->second, r});
	};
	add(start, index.at(c.initials[0]), rx_one());
	for (const auto& f : c.finals) add(index.at(f), end, rx_one());
	for (const auto& m : c.moves)
		add(index.at(m.from), index.at(m.to), rx_letter(m.letter));

	std::set<int> alive;
	for (int i = 1; i <= n; ++i) alive.insert(i);
	while (!alive.empty()) {
		int best = -1;
		size_t best_degree = 0;
		for (int k : alive) {
			size_t degree = 0;
			for (const auto& [xy, r] : edge) {
				(void)r;
				if (xy.first == k && xy.second != k) ++degree;
				if (xy.second == k && xy.first != k) ++degree;
			}
			if (best < 0 || degree < best_degree ||
			    (degree == best_degree && c.states[k - 1] < c.states[best - 1])) {
				best = k;
				best_degree = degree;
			}
		}
		int k = best;
		alive.erase(k);
		RxPtr loop = rx_one();
		auto self = edge.find({k, k});
		if (self != edge.end()) loop = rx_star(self->second);
		std::vector<std::pair<int, RxPtr>> in;
		std::vector<std::pair<int, RxPtr>> out;
		for (const auto& [xy, r] : edge) {
			if (xy.second == k && xy.first != k) in.push_back({xy.first, r});
			if (xy.first == k && xy.second != k) out.push_back({xy.second, r});
		}
		for (auto it = edge.begin(); it != edge.end();) {
			if (it->first.first == k || it->first.second == k)
				it = edge.erase(it);
			else
				++it;
		}
		for (const auto& [x, rin] : in)
			for (const auto& [y, rout] : out)
				add(x, y, rx_cat(rin, rx_cat(loop, rout)));
	}
	auto it = edge.find({start, end});
	return it == edge.end() ? rx_zero() : it->second;
}

FiniteAcceptor automaton_from(const SequentialComponent& c, AlphabetPtr alph,
                              const std::string& from) {
	FiniteAcceptor a;
	a.alphabet = alph;
	std::map<std::string, int> index;
	for (const auto& s : c.states)
		index[s] = a.add_state(s, c.finals.count(s) > 0);
	for (const auto& m : c.moves)
		a.add_edge(index.at(m.from), m.letter, index.at(m.to));
	a.initial = index.at(from);
	return a;
}

struct LetterAlignment {
	bool ok = true;
	std::map<std::string, Block> source_block;
	std::map<std::pair<std::string, std::string>, RxSet> move_effects;
	std::vector<std::string> notes;
};

bool assign_blocks(const std::vector<std::vector<std::string>>& candidates,
                   size_t idx, std::vector<std::string>& pick,
                   std::set<std::string>& used) {
	if (idx == candidates.size()) return true;
	for (const auto& s : candidates[idx]) {
		if (used.count(s)) continue;
		used.insert(s);
		pick[idx] = s;
		if (assign_blocks(candidates, idx + 1, pick, used)) return true;
		used.erase(s);
	}
	return false;
}

// Matches the partition blocks of one letter in one component to the
// letter-enabled states by right-language equality, then distributes the
// block derivatives over the moves by right-language containment.
LetterAlignment align_letter(const SequentialComponent& comp, AlphabetPtr alph,
                             const RxPtr& part, const std::string& letter,
                             size_t cap) {
	LetterAlignment out;
	SitePartition partition = site_partition(part, letter);
	std::set<std::string> sources;
	for (const auto& m : comp.moves)
		if (m.letter == letter) sources.insert(m.from);
	if (partition.size() != sources.size()) {
		out.ok = false;
		out.notes.push_back("letter " + letter + ": " +
		                    std::to_string(partition.size()) + " blocks vs " +
		                    std::to_string(sources.size()) + " source states");
		return out;
	}
	if (partition.empty()) return out;

	std::map<std::string, FiniteAcceptor> rlang;
	auto from_state = [&](const std::string& s) -> const FiniteAcceptor& {
		auto it = rlang.find(s);
		if (it == rlang.end())
			it = rlang.emplace(s, automaton_from(comp, alph, s)).first;
		return it->second;
	};

	std::vector<std::vector<std::string>> candidates(partition.size());
	for (size_t b = 0; b < partition.size(); ++b) {
		std::vector<RxPtr> members(partition[b].begin(), partition[b].end());
		FiniteAcceptor block_acceptor =
				regex_to_acceptor(rx_sum(members), alph);
		for (const auto& s : sources)
			if (acceptor_equal(block_acceptor, from_state(s), cap).equal)
				candidates[b].push_back(s);
	}
	std::vector<std::string> pick(partition.size());
	std::set<std::string> used;
	if (!assign_blocks(candidates, 0, pick, used)) {
		out.ok = false;
		out.notes.push_back("letter " + letter +
		                    ": no state matches every partition block");
		return out;
	}

	for (size_t b = 0; b < partition.size(); ++b) {
		const std::string& s = pick[b];
		out.source_block[s] = partition[b];
		std::set<std::string> targets;
		for (const auto& m : comp.moves)
			if (m.letter == letter && m.from == s) targets.insert(m.to);
		RxSet pool = derive(partition[b], letter);
		for (const auto& d : pool) {
			FiniteAcceptor da = regex_to_acceptor(d, alph);
			std::vector<std::string> fits;
			for (const auto& q : targets)
				if (acceptor_subset(da, from_state(q), cap).equal)
					fits.push_back(q);
			if (fits.empty()) {
				out.notes.push_back("letter " + letter + ": derivative " +
				                    rx_text(d) +
				                    " lies in no successor language");
				continue;
			}
			std::string chosen;
			for (const auto& q : fits) {
				bool minimal = true;
				for (const auto& other : fits)
					if (other != q)
						minimal = minimal &&
						          acceptor_subset(from_state(q), from_state(other), cap)
						              .equal;
				if (minimal) {
					chosen = q;
					break;
				}
			}
			if (chosen.empty()) {
				chosen = fits.front();
				out.notes.push_back("letter " + letter + ": derivative " +
				                    rx_text(d) + " placed at " + chosen +
				                    " among incomparable successors");
			}
			out.move_effects[{s, chosen}].insert(d);
		}
	}
	return out;
}

std::string cable_key(const Cable& cable) {
	std::string key;
	for (const auto& duct : cable) {
		key += block_text(duct.pre) + "!";
		for (const auto& e : duct.effects) key += rx_text(e) + ",";
		key += ";";
	}
	return key;
}

}  // namespace

Converted<ConnectedExpression> products_to_connected(const ProductSystem& ps,
                                                     size_t cap) {
	ps.validate();
	ConversionReport report;
	report.direction = "products -> connected expression";
	report.input_digest = digest_hex(ps_to_text(ps));
	if (ps.acceptance != Acceptance::product)
		throw PreconditionError("only a product-acceptance system converts to "
		                        "a single connected expression");
	if (ps.initials.size() != 1)
		throw PreconditionError("a connected expression starts from a single "
		                        "initial tuple");

	ProductSystem base = ps;
	if (!base.globals && base.matchings) {
		base = globals_from_matchings(base);
		report.notes.push_back("joint moves derived from the matching annotation");
	}

	const DistributedAlphabet& alphabet = *ps.alphabet;
	size_t width = alphabet.width();
	std::vector<SequentialComponent> comps;
	std::vector<AlphabetPtr> alphs;
	ConnectedExpression ce;
	ce.alphabet = ps.alphabet;
	for (size_t i = 0; i < width; ++i) {
		comps.push_back(restricted_component(base, (int)i));
		alphs.push_back(make_alphabet({alphabet.components[i]}));
		ce.parts.push_back(component_regex(comps[i]));
	}

	bool has_global_letter = false;
	for (const auto& letter : alphabet.letters)
		has_global_letter = has_global_letter || alphabet.is_global(letter);
	bool want_cables = has_global_letter && base.globals.has_value();
	for (size_t i = 0; i < width; ++i)
		if (ce.parts[i]->kind == RxKind::zero && want_cables) {
			want_cables = false;
			report.notes.push_back("component " + std::to_string(i + 1) +
			                       " has the empty language; emitting a plain "
			                       "expression");
		}

	if (want_cables) {
		std::map<std::pair<size_t, std::string>, LetterAlignment> alignments;
		bool aligned = true;
		for (const auto& letter : alphabet.letters) {
			if (!alphabet.is_global(letter)) continue;
			for (int i : alphabet.locations(letter)) {
				LetterAlignment al =
						align_letter(comps[i], alphs[i], ce.parts[i], letter, cap);
				for (const auto& n : al.notes)
					report.notes.push_back("component " + std::to_string(i + 1) +
					                       ", " + n);
				aligned = aligned && al.ok;
				alignments[{(size_t)i, letter}] = std::move(al);
			}
		}
		if (!aligned) {
			report.notes.push_back(
					"block alignment failed; emitting a plain expression");
			want_cables = false;
		} else {
			for (const auto& [letter, moves] : *base.globals) {
				const auto& locs = alphabet.locations(letter);
				std::map<std::string, Cable> cables;
				for (const auto& g : moves) {
					Cable cable;
					bool good = true;
					for (size_t pos = 0; pos < locs.size() && good; ++pos) {
						const LetterAlignment& al =
								alignments.at({(size_t)locs[pos], letter});
						auto bit = al.source_block.find(g[pos].from);
						auto eit = al.move_effects.find({g[pos].from, g[pos].to});
						if (bit == al.source_block.end() ||
						    eit == al.move_effects.end() || eit->second.empty()) {
							good = false;
							break;
						}
						cable.push_back({bit->second, eit->second});
					}
					if (good) {
						cables[cable_key(cable)] = cable;
					} else {
						report.notes.push_back("a joint move on " + letter +
						                       " found no duct; the cable was "
						                       "dropped");
					}
				}
				for (auto& [key, cable] : cables) {
					(void)key;
					ce.cables[letter].push_back(std::move(cable));
				}
			}
			ce.annotation = Annotation::cables;
		}
	}
	if (!want_cables) {
		ce.annotation = Annotation::none;
		ce.cables.clear();
	}
	ce.validate();

	Verdict source_same = check_same_source(base);
	Verdict source_moves = check_product_moves(base);
	bool cables_on = ce.annotation == Annotation::cables;
	report.properties.push_back(
			{"same source -> equal source", verdict_word(source_same),
	     cables_on ? verdict_word(check_equal_source(ce)) : "n/a"});
	report.properties.push_back(
			{"product moves -> product derivatives", verdict_word(source_moves),
	     cables_on ? verdict_word(check_product_derivatives(ce)) : "n/a"});
	report.properties.push_back({"live -> action live",
	                             verdict_word(check_ps_live(base, cap)),
	                             verdict_word(check_action_live(ce, cap))});

	verify_languages(report, run_graph(ps, cap), ce_acceptor(ce, cap), cap);
	return {std::move(ce), std::move(report)};
}

namespace {

struct RxSetLess {
	bool operator()(const RxSet& a, const RxSet& b) const {
		auto i = a.begin();
		auto j = b.begin();
		for (; i != a.end() && j != b.end(); ++i, ++j) {
			int c = rx_compare(*i, *j);
			if (c != 0) return c < 0;
		}
		return a.size() < b.size();
	}
};

std::string derivative_set_name(const RxSet& x) {
	std::string out;
	for (const auto& d : x) {
		if (!out.empty()) out += " | ";
		out += rx_text(d);
	}
	return out;
}

RxSet intersect(const RxSet& a, const RxSet& b) {
	RxSet out;
	for (const auto& x : a)
		if (b.count(x)) out.insert(x);
	return out;
}

struct DerivativeComponent {
	std::vector<RxSet> states;  // discovery order, initial first
	std::map<RxSet, int, RxSetLess> index;
	std::set<std::tuple<int, std::string, int>> moves;
	// per letter and cable index: the (from, to) pairs induced by the duct
	std::map<std::string, std::vector<std::set<std::pair<int, int>>>> duct_moves;

	int intern(const RxSet& x) {
		auto it = index.find(x);
		if (it != index.end()) return it->second;
		int id = (int)states.size();
		index.emplace(x, id);
		states.push_back(x);
		return id;
	}
};

}  // namespace

Converted<ProductSystem> connected_to_products(const ConnectedExpression& ce,
                                               size_t cap) {
	ce.validate();
	ConversionReport report;
	report.direction = "connected expression -> products";
	report.input_digest = ce_digest(ce);

	const DistributedAlphabet& alphabet = *ce.alphabet;
	size_t width = alphabet.width();
	bool cable_mode = ce.annotation == Annotation::cables;

	std::vector<DerivativeComponent> builds(width);
	for (size_t i = 0; i < width; ++i) {
		DerivativeComponent& b = builds[i];
		if (cable_mode)
			for (const auto& [letter, cables] : ce.cables)
				b.duct_moves[letter].resize(cables.size());
		b.intern(RxSet{ce.parts[i]});
		for (size_t qi = 0; qi < b.states.size(); ++qi) {
			RxSet x = b.states[qi];
			for (const auto& letter : alphabet.components[i]) {
				if (!cable_mode || alphabet.is_local(letter)) {
					RxSet y = derive(x, letter);
					if (y.empty()) continue;
					b.moves.insert({(int)qi, letter, b.intern(y)});
					continue;
				}
				auto it = ce.cables.find(letter);
				if (it == ce.cables.end()) continue;
				const auto& locs = alphabet.locations(letter);
				size_t pos = std::find(locs.begin(), locs.end(), (int)i) -
				             locs.begin();
				for (size_t ci = 0; ci < it->second.size(); ++ci) {
					const CableDuct& duct = it->second[ci][pos];
					RxSet met = intersect(x, duct.pre);
					if (met.empty()) continue;
					RxSet y = intersect(derive(met, letter), duct.effects);
					if (y.empty()) continue;
					int t = b.intern(y);
					b.moves.insert({(int)qi, letter, t});
					b.duct_moves[letter][ci].insert({(int)qi, t});
				}
			}
			if (b.states.size() > cap)
				throw ExplorationLimit(
						"derivative-set construction exceeded the state cap");
		}
	}

	ProductSystem out;
	out.alphabet = ce.alphabet;
	out.acceptance = Acceptance::product;
	StateTuple initial;
	std::vector<std::vector<std::string>> names(width);
	for (size_t i = 0; i < width; ++i) {
		DerivativeComponent& b = builds[i];
		SequentialComponent c;
		for (const auto& x : b.states) {
			std::string name = derivative_set_name(x);
			names[i].push_back(name);
			c.states.push_back(name);
			bool final = false;
			for (const auto& d : x) final = final || nullable(d);
			if (final) c.finals.insert(name);
		}
		c.initials = {names[i][0]};
		initial.push_back(names[i][0]);
		for (const auto& [from, letter, to] : b.moves)
			c.moves.push_back({names[i][from], letter, names[i][to]});
		std::sort(c.moves.begin(), c.moves.end());
		out.components.push_back(std::move(c));
	}
	out.initials = {initial};

	bool has_global_letter = false;
	for (const auto& letter : alphabet.letters)
		has_global_letter = has_global_letter || alphabet.is_global(letter);
	if (cable_mode && has_global_letter) {
		std::map<std::string, std::vector<GlobalMove>> globals;
		for (const auto& [letter, cables] : ce.cables) {
			const auto& locs = alphabet.locations(letter);
			std::vector<GlobalMove> list;
			for (size_t ci = 0; ci < cables.size(); ++ci) {
				std::vector<GlobalMove> acc{GlobalMove{}};
				for (size_t pos = 0; pos < locs.size() && !acc.empty(); ++pos) {
					const auto& pairs =
							builds[locs[pos]].duct_moves.at(letter)[ci];
					std::vector<GlobalMove> next;
					for (const auto& g : acc)
						for (const auto& [from, to] : pairs) {
							GlobalMove grown = g;
							grown.push_back({names[locs[pos]][from], letter,
							                 names[locs[pos]][to]});
							next.push_back(grown);
						}
					acc = next;
				}
				for (auto& g : acc) list.push_back(std::move(g));
			}
			std::sort(list.begin(), list.end());
			list.erase(std::unique(list.begin(), list.end()), list.end());
			if (!list.empty()) globals[letter] = list;
		}
		out.globals = globals;
	}
	prune_to_reachable(out, cap);
	out.validate();

	bool cables_on = cable_mode;
	report.properties.push_back(
			{"equal source -> same source",
	     cables_on ? verdict_word(check_equal_source(ce)) : "n/a",
	     verdict_word(check_same_source(out))});
	report.properties.push_back(
			{"product derivatives -> product moves",
	     cables_on ? verdict_word(check_product_derivatives(ce)) : "n/a",
	     verdict_word(check_product_moves(out))});
	report.properties.push_back({"action live -> live",
	                             verdict_word(check_action_live(ce, cap)),
	                             verdict_word(check_ps_live(out, cap))});

	verify_languages(report, ce_acceptor(ce, cap), run_graph(out, cap), cap);
	return {std::move(out), std::move(report)};
}

Converted<SumExpression> products_to_sum(const ProductSystem& ps, size_t cap) {
	ps.validate();
	ConversionReport report;
	report.direction = "products -> expression sum";
	report.input_digest = digest_hex(ps_to_text(ps));

	SumExpression sum;
	sum.alphabet = ps.alphabet;
	std::vector<ProductSystem> parts;
	if (ps.acceptance == Acceptance::product)
		parts.push_back(ps);
	else
		parts = decompose_union(ps);
	if (parts.empty())
		throw PreconditionError("the system accepts nothing; there is no "
		                        "summand to build");
	for (size_t j = 0; j < parts.size(); ++j) {
		Converted<ConnectedExpression> c = products_to_connected(parts[j], cap);
		sum.summands.push_back(std::move(c.value));
		for (const auto& n : c.report.notes)
			report.notes.push_back("summand " + std::to_string(j + 1) + ": " + n);
	}
	sum.validate();

	report.properties.push_back(
			{"same source -> equal source", verdict_word(check_same_source(ps)),
	     summand_aggregate(sum, Annotation::cables, check_equal_source,
	                       report.notes, "equal source")});
	report.properties.push_back(
			{"product moves -> product derivatives",
	     verdict_word(check_product_moves(ps)),
	     summand_aggregate(sum, Annotation::cables, check_product_derivatives,
	                       report.notes, "product derivatives")});
	report.properties.push_back({"live -> action live",
	                             verdict_word(check_ps_live(ps, cap)),
	                             all_action_live(sum, cap, report.notes)});

	verify_languages(report, run_graph(ps, cap), sce_acceptor(sum, cap), cap);
	return {std::move(sum), std::move(report)};
}

namespace {

void ensure_globals(ProductSystem& ps) {
	if (ps.globals) return;
	std::map<std::string, std::vector<GlobalMove>> globals;
	for (const auto& letter : ps.alphabet->letters) {
		if (!ps.alphabet->is_global(letter)) continue;
		std::vector<GlobalMove> moves = ps.joint_moves(letter);
		if (!moves.empty()) globals[letter] = moves;
	}
	ps.globals = globals;
}

}  // namespace

Converted<ProductSystem> sum_to_products(const SumExpression& e, size_t cap) {
	e.validate();
	ConversionReport report;
	report.direction = "expression sum -> products";
	report.input_digest = sum_digest(e);
	if (e.summands.empty())
		throw PreconditionError("an empty sum converts to nothing");

	std::vector<ProductSystem> parts;
	for (size_t j = 0; j < e.summands.size(); ++j) {
		Converted<ProductSystem> c = connected_to_products(e.summands[j], cap);
		parts.push_back(std::move(c.value));
		for (const auto& n : c.report.notes)
			report.notes.push_back("summand " + std::to_string(j + 1) + ": " + n);
	}
	ProductSystem out;
	if (parts.size() == 1) {
		out = std::move(parts[0]);
	} else {
		bool any_globals = false;
		for (const auto& p : parts) any_globals = any_globals || p.globals;
		if (any_globals)
			for (auto& p : parts) ensure_globals(p);
		out = union_combine(parts);
	}
	out.validate();

	report.properties.push_back(
			{"equal source -> same source",
	     summand_aggregate(e, Annotation::cables, check_equal_source,
	                       report.notes, "equal source"),
	     verdict_word(check_same_source(out))});
	report.properties.push_back(
			{"product derivatives -> product moves",
	     summand_aggregate(e, Annotation::cables, check_product_derivatives,
	                       report.notes, "product derivatives"),
	     verdict_word(check_product_moves(out))});
	report.properties.push_back({"action live -> live",
	                             all_action_live(e, cap, report.notes),
	                             verdict_word(check_ps_live(out, cap))});

	verify_languages(report, sce_acceptor(e, cap), run_graph(out, cap), cap);
	return {std::move(out), std::move(report)};
}

Converted<SumExpression> products_to_sum_pairings(const ProductSystem& ps,
                                                  size_t cap) {
	ps.validate();
	ConversionReport report;
	report.direction = "products -> pairing expression sum";
	report.input_digest = digest_hex(ps_to_text(ps));

	ProductSystem based = ps;
	if (!based.matchings) {
		if (based.globals) {
			based = matchings_from_globals(based);
			report.notes.push_back("matching read off the joint-move sources");
		} else {
			std::map<std::string, std::vector<StateTuple>> synthesized;
			std::set<StateTuple> tuples = reachable_tuples(based, cap);
			for (const auto& letter : based.alphabet->letters) {
				if (!based.alphabet->is_global(letter)) continue;
				const auto& locs = based.alphabet->locations(letter);
				std::set<StateTuple> found;
				for (const auto& t : tuples) {
					StateTuple proj;
					bool all = true;
					for (int i : locs) {
						bool has = false;
						for (const auto& m : based.components[i].moves_from(t[i]))
							has = has || m.letter == letter;
						all = all && has;
						proj.push_back(t[i]);
					}
					if (all) found.insert(proj);
				}
				if (!found.empty())
					synthesized[letter] = {found.begin(), found.end()};
			}
			based.matchings = synthesized;
			report.notes.push_back(
					"matching synthesized from the reachable enabling tuples");
		}
	}

	Verdict source_wf = check_matchings_wellformed(based);
	Verdict source_ce = check_conflict_equivalent(based);
	Verdict source_cm = check_consistent_matchings(based, cap);

	ProductSystem expanded = globals_from_matchings(based);
	Converted<SumExpression> viacables = products_to_sum(expanded, cap);
	SumExpression sum = std::move(viacables.value);
	for (const auto& n : viacables.report.notes) report.notes.push_back(n);
	for (auto& ce : sum.summands) {
		if (ce.annotation == Annotation::cables)
			ce = cables_to_pairings(ce);
		else
			report.notes.push_back("a summand came out without cables and "
			                       "stays unannotated");
	}
	sum.validate();

	report.properties.push_back(
			{"matchings wellformed -> pairings wellformed",
	     verdict_word(source_wf),
	     summand_aggregate(sum, Annotation::pairings, check_pairings_wellformed,
	                       report.notes, "pairings wellformed")});
	report.properties.push_back(
			{"conflict equivalent -> equal choice", verdict_word(source_ce),
	     summand_aggregate(sum, Annotation::pairings, check_equal_choice,
	                       report.notes, "equal choice")});
	report.properties.push_back(
			{"consistent matchings -> consistent pairings",
	     verdict_word(source_cm),
	     summand_aggregate(
	         sum, Annotation::pairings,
	         [&](const ConnectedExpression& ce) {
		         return check_consistent_pairings(ce, cap);
	         },
	         report.notes, "consistent pairings")});
	report.properties.push_back({"live -> action live",
	                             verdict_word(check_ps_live(ps, cap)),
	                             all_action_live(sum, cap, report.notes)});

	verify_languages(report, run_graph(ps, cap), sce_acceptor(sum, cap), cap);
	return {std::move(sum), std::move(report)};
}

Converted<ProductSystem> sum_pairings_to_products(const SumExpression& e,
                                                  size_t cap) {
	e.validate();
	ConversionReport report;
	report.direction = "pairing expression sum -> products";
	report.input_digest = sum_digest(e);

	SumExpression cabled;
	cabled.alphabet = e.alphabet;
	for (const auto& ce : e.summands) {
		if (ce.annotation == Annotation::pairings)
			cabled.summands.push_back(pairings_to_cables(ce));
		else {
			cabled.summands.push_back(ce);
			report.notes.push_back(
					"a summand carries no pairings and converts as written");
		}
	}
	Converted<ProductSystem> converted = sum_to_products(cabled, cap);
	for (const auto& n : converted.report.notes) report.notes.push_back(n);
	ProductSystem out = std::move(converted.value);
	if (out.globals) {
		out = matchings_from_globals(out);
	} else {
		report.notes.push_back("the combined system carries no joint moves; "
		                       "no matching to read off");
	}
	out.validate();

	bool has_matchings = out.matchings.has_value();
	report.properties.push_back(
			{"pairings wellformed -> matchings wellformed",
	     summand_aggregate(e, Annotation::pairings, check_pairings_wellformed,
	                       report.notes, "pairings wellformed"),
	     has_matchings ? verdict_word(check_matchings_wellformed(out)) : "n/a"});
	report.properties.push_back(
			{"equal choice -> conflict equivalent",
	     summand_aggregate(e, Annotation::pairings, check_equal_choice,
	                       report.notes, "equal choice"),
	     has_matchings ? verdict_word(check_conflict_equivalent(out)) : "n/a"});
	report.properties.push_back(
			{"consistent pairings -> consistent matchings",
	     summand_aggregate(
	         e, Annotation::pairings,
	         [&](const ConnectedExpression& ce) {
		         return check_consistent_pairings(ce, cap);
	         },
	         report.notes, "consistent pairings"),
	     has_matchings ? verdict_word(check_consistent_matchings(out, cap))
	                   : "n/a"});
	report.properties.push_back({"action live -> live",
	                             all_action_live(e, cap, report.notes),
	                             verdict_word(check_ps_live(out, cap))});

	verify_languages(report, sce_acceptor(e, cap), run_graph(out, cap), cap);
	return {std::move(out), std::move(report)};
}

PipelineResult net_expression_pipeline(const NetSystem& sys, size_t cap) {
	PipelineResult out;
	FiniteAcceptor reference = net_acceptor(sys, cap);

	Converted<ProductSystem> s1 = net_to_products(sys, cap);
	out.products = std::move(s1.value);
	out.stages.push_back(std::move(s1.report));

	Converted<SumExpression> s2 = products_to_sum(out.products, cap);
	out.expression = std::move(s2.value);
	out.stages.push_back(std::move(s2.report));

	Converted<ProductSystem> s3 = sum_to_products(out.expression, cap);
	out.products_back = std::move(s3.value);
	out.stages.push_back(std::move(s3.report));

	bool ok = true;
	for (const auto& stage : out.stages) ok = ok && stage.verified;
	LanguageComparison loop =
			acceptor_equal(reference, run_graph(out.products_back, cap), cap);
	if (!loop.equal) {
		ok = false;
		if (loop.witness && !out.witness) out.witness = loop.witness;
		out.notes.push_back("the returning system differs from the net at " +
		                    word_text(*loop.witness));
	}

	if (out.products_back.initials.size() == 1) {
		Converted<NetSystem> s4 = products_to_net(out.products_back, cap);
		out.net_back = std::move(s4.value);
		ok = ok && s4.report.verified;
		out.stages.push_back(std::move(s4.report));
	} else {
		out.notes.push_back("the returning system keeps several initial "
		                    "tuples, so it stays a product system");
	}

	Verdict recombining = check_product_moves(out.products);
	if (recombining.ok) {
		Converted<SumExpression> p1 = products_to_sum_pairings(out.products, cap);
		ok = ok && p1.report.verified;
		out.stages.push_back(p1.report);
		Converted<ProductSystem> p2 = sum_pairings_to_products(p1.value, cap);
		ok = ok && p2.report.verified;
		out.stages.push_back(std::move(p2.report));
		LanguageComparison pairs =
				acceptor_equal(reference, run_graph(p2.value, cap), cap);
		if (!pairs.equal) {
			ok = false;
			if (pairs.witness && !out.witness) out.witness = pairs.witness;
			out.notes.push_back("the pairing route differs from the net at " +
			                    word_text(*pairs.witness));
		}
	} else {
		out.notes.push_back(
				"joint moves do not recombine; the pairing route was skipped");
	}

	for (const auto& stage : out.stages)
		if (!stage.verified && !out.witness && stage.witness)
			out.witness = stage.witness;
	out.verified = ok;
	return out;
}

}  // namespace kfc
