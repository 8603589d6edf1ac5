#include "kleenefc/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace kfc {

using nlohmann::json;

std::string read_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw Error("cannot read " + path);
	std::ostringstream out;
	out << in.rdbuf();
	return out.str();
}

void write_file(const std::string& path, const std::string& content) {
	std::ofstream out(path, std::ios::binary);
	if (!out) throw Error("cannot write " + path);
	out << content;
}

bool file_exists(const std::string& path) {
	std::ifstream in(path);
	return in.good();
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
	json j = json::parse(text, nullptr, false);
	if (j.is_discarded()) throw ParseError("malformed JSON in " + what);
	return j;
}

AlphabetPtr alphabet_from_json(const json& j) {
	if (!j.is_array() || j.empty())
		throw ParseError("an alphabet is a non-empty array of letter arrays");
	std::vector<std::vector<std::string>> comps;
	for (const auto& row : j) {
		if (!row.is_array())
			throw ParseError("an alphabet location must be an array of letters");
		std::vector<std::string> letters;
		for (const auto& a : row) {
			if (!a.is_string()) throw ParseError("letters must be strings");
			letters.push_back(a.get<std::string>());
		}
		comps.push_back(std::move(letters));
	}
	return make_alphabet(std::move(comps));
}

json alphabet_to_json(const DistributedAlphabet& alphabet) {
	json j = json::array();
	for (const auto& comp : alphabet.components) j.push_back(comp);
	return j;
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
	if (!j.is_array()) throw ParseError(what + " must be an array of strings");
	std::vector<std::string> out;
	for (const auto& x : j) {
		if (!x.is_string()) throw ParseError(what + " must contain only strings");
		out.push_back(x.get<std::string>());
	}
	return out;
}

}  // namespace

std::string alphabet_to_text(const DistributedAlphabet& alphabet) {
	return alphabet_to_json(alphabet).dump();
}

NetSystem net_from_text(const std::string& text) {
	json j = parse_json(text, "net description");
	if (!j.is_object() || !j.contains("alphabet") || !j.contains("places") ||
	    !j.contains("transitions") || !j.contains("initial"))
		throw ParseError("a net needs alphabet, places, transitions and initial");
	NetSystem sys;
	sys.net.alphabet = alphabet_from_json(j.at("alphabet"));
	sys.net.places = string_list(j.at("places"), "places");
	for (const auto& tj : j.at("transitions")) {
		if (!tj.is_object() || !tj.contains("id") || !tj.contains("label") ||
		    !tj.contains("pre") || !tj.contains("post"))
			throw ParseError("a transition needs id, label, pre and post");
		Transition t;
		t.id = tj.at("id").get<std::string>();
		t.label = tj.at("label").get<std::string>();
		auto pre = string_list(tj.at("pre"), "pre of " + t.id);
		auto post = string_list(tj.at("post"), "post of " + t.id);
		t.pre = {pre.begin(), pre.end()};
		t.post = {post.begin(), post.end()};
		sys.net.transitions.push_back(std::move(t));
	}
	auto initial = string_list(j.at("initial"), "initial marking");
	sys.initial = {initial.begin(), initial.end()};
	if (j.contains("finals")) {
		for (const auto& mj : j.at("finals")) {
			auto m = string_list(mj, "final marking");
			sys.finals.push_back(Marking{m.begin(), m.end()});
		}
	}
	sys.validate();
	return sys;
}

std::string net_to_text(const NetSystem& sys) {
	json j;
	j["alphabet"] = alphabet_to_json(*sys.net.alphabet);
	j["places"] = sys.net.places;
	json ts = json::array();
	for (const auto& t : sys.net.transitions) {
		json tj;
		tj["id"] = t.id;
		tj["label"] = t.label;
		tj["pre"] = std::vector<std::string>(t.pre.begin(), t.pre.end());
		tj["post"] = std::vector<std::string>(t.post.begin(), t.post.end());
		ts.push_back(std::move(tj));
	}
	j["transitions"] = std::move(ts);
	j["initial"] = std::vector<std::string>(sys.initial.begin(), sys.initial.end());
	json fs = json::array();
	for (const auto& m : sys.finals)
		fs.push_back(std::vector<std::string>(m.begin(), m.end()));
	j["finals"] = std::move(fs);
	return j.dump(2) + "\n";
}

ProductSystem ps_from_text(const std::string& text) {
	json j = parse_json(text, "product system description");
	if (!j.is_object() || !j.contains("alphabet") || !j.contains("components"))
		throw ParseError("a product system needs alphabet and components");
	ProductSystem ps;
	ps.alphabet = alphabet_from_json(j.at("alphabet"));
	for (const auto& cj : j.at("components")) {
		if (!cj.is_object() || !cj.contains("states") || !cj.contains("initial") ||
		    !cj.contains("moves"))
			throw ParseError("a component needs states, initial and moves");
		SequentialComponent c;
		c.states = string_list(cj.at("states"), "states");
		if (cj.at("initial").is_string())
			c.initials = {cj.at("initial").get<std::string>()};
		else
			c.initials = string_list(cj.at("initial"), "initial");
		if (cj.contains("finals")) {
			auto f = string_list(cj.at("finals"), "finals");
			c.finals = {f.begin(), f.end()};
		}
		for (const auto& mj : cj.at("moves")) {
			auto m = string_list(mj, "move");
			if (m.size() != 3)
				throw ParseError("a move is a [from, letter, to] triple");
			c.moves.push_back({m[0], m[1], m[2]});
		}
		ps.components.push_back(std::move(c));
	}
	std::string acceptance = j.value("acceptance", std::string("product"));
	if (acceptance == "product") {
		ps.acceptance = Acceptance::product;
	} else if (acceptance == "subset") {
		ps.acceptance = Acceptance::subset;
		if (j.contains("finals"))
			for (const auto& fj : j.at("finals"))
				ps.finals.push_back(string_list(fj, "final tuple"));
	} else {
		throw ParseError("acceptance must be \"product\" or \"subset\"");
	}
	if (j.contains("initials")) {
		for (const auto& tj : j.at("initials"))
			ps.initials.push_back(string_list(tj, "initial tuple"));
	} else {
		StateTuple t;
		for (const auto& c : ps.components) {
			if (c.initials.size() != 1)
				throw ParseError("components with several initial states need "
				                 "explicit initial tuples");
			t.push_back(c.initials[0]);
		}
		ps.initials.push_back(std::move(t));
	}
	if (j.contains("matchings")) {
		std::map<std::string, std::vector<StateTuple>> m;
		for (const auto& [letter, tuples] : j.at("matchings").items()) {
			for (const auto& tj : tuples)
				m[letter].push_back(string_list(tj, "matching tuple"));
		}
		ps.matchings = std::move(m);
	}
	if (j.contains("globals")) {
		std::map<std::string, std::vector<GlobalMove>> g;
		for (const auto& [letter, moves] : j.at("globals").items()) {
			for (const auto& gj : moves) {
				GlobalMove gm;
				for (const auto& mj : gj) {
					auto m = string_list(mj, "joint move part");
					if (m.size() != 3)
						throw ParseError("a joint move part is a [from, letter, to] "
						                 "triple");
					gm.push_back({m[0], m[1], m[2]});
				}
				g[letter].push_back(std::move(gm));
			}
		}
		ps.globals = std::move(g);
	}
	ps.validate();
	return ps;
}

std::string ps_to_text(const ProductSystem& ps) {
	json j;
	j["alphabet"] = alphabet_to_json(*ps.alphabet);
	json comps = json::array();
	for (const auto& c : ps.components) {
		json cj;
		cj["states"] = c.states;
		if (c.initials.size() == 1)
			cj["initial"] = c.initials[0];
		else
			cj["initial"] = c.initials;
		cj["finals"] = std::vector<std::string>(c.finals.begin(), c.finals.end());
		json moves = json::array();
		std::vector<LocalMove> sorted = c.moves;
		std::sort(sorted.begin(), sorted.end());
		for (const auto& m : sorted)
			moves.push_back(std::vector<std::string>{m.from, m.letter, m.to});
		cj["moves"] = std::move(moves);
		comps.push_back(std::move(cj));
	}
	j["components"] = std::move(comps);
	j["acceptance"] =
			ps.acceptance == Acceptance::product ? "product" : "subset";
	if (ps.acceptance == Acceptance::subset) {
		json fs = json::array();
		std::vector<StateTuple> sorted = ps.finals;
		std::sort(sorted.begin(), sorted.end());
		for (const auto& t : sorted) fs.push_back(t);
		j["finals"] = std::move(fs);
	}
	json is = json::array();
	for (const auto& t : ps.initials) is.push_back(t);
	j["initials"] = std::move(is);
	if (ps.matchings) {
		json mj;
		for (const auto& [letter, tuples] : *ps.matchings) {
			json rows = json::array();
			std::vector<StateTuple> sorted = tuples;
			std::sort(sorted.begin(), sorted.end());
			for (const auto& t : sorted) rows.push_back(t);
			mj[letter] = std::move(rows);
		}
		j["matchings"] = std::move(mj);
	}
	if (ps.globals) {
		json gj;
		for (const auto& [letter, moves] : *ps.globals) {
			json rows = json::array();
			std::vector<GlobalMove> sorted = moves;
			std::sort(sorted.begin(), sorted.end());
			for (const auto& g : sorted) {
				json row = json::array();
				for (const auto& m : g)
					row.push_back(std::vector<std::string>{m.from, m.letter, m.to});
				rows.push_back(std::move(row));
			}
			gj[letter] = std::move(rows);
		}
		j["globals"] = std::move(gj);
	}
	return j.dump(2) + "\n";
}

namespace {

// Splits "fsync(..) + fsync(..)" at parenthesis depth zero.
std::vector<std::string> split_top_level(const std::string& text, char sep) {
	std::vector<std::string> out;
	int depth = 0;
	std::string cur;
	for (char c : text) {
		if (c == '(') ++depth;
		if (c == ')') --depth;
		if (c == sep && depth == 0) {
			out.push_back(cur);
			cur.clear();
		} else {
			cur += c;
		}
	}
	out.push_back(cur);
	return out;
}

std::string trim(const std::string& s) {
	size_t b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos) return "";
	size_t e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

ConnectedExpression parse_fused(const std::string& chunk, AlphabetPtr alphabet) {
	std::string body = trim(chunk);
	if (body.rfind("fsync", 0) != 0)
		throw ParseError("expected fsync(...), got: " + body);
	body = trim(body.substr(5));
	if (body.empty() || body.front() != '(' || body.back() != ')')
		throw ParseError("fsync needs a parenthesized part list");
	body = body.substr(1, body.size() - 2);
	ConnectedExpression ce;
	for (const auto& part : split_top_level(body, ','))
		ce.parts.push_back(parse_regex(trim(part)));
	if (alphabet) {
		ce.alphabet = alphabet;
	} else {
		std::vector<std::vector<std::string>> comps;
		for (const auto& p : ce.parts) {
			auto occ = occurring_letters(p);
			comps.emplace_back(occ.begin(), occ.end());
		}
		ce.alphabet = make_alphabet(std::move(comps));
	}
	return ce;
}

Block find_block(const SitePartition& partition, const std::string& name,
                 const std::string& context) {
	RxPtr probe = parse_regex(name);
	for (const auto& block : partition)
		for (const auto& member : block)
			if (rx_equal(member, probe)) return block;
	std::string available;
	for (const auto& block : partition) available += " " + block_text(block);
	throw ParseError("no block of " + context + " contains " + name +
	                 "; available:" + available);
}

void apply_annotations(SumExpression& sum, const json& ann) {
	json summands;
	if (ann.is_object() && ann.contains("summands")) {
		summands = ann.at("summands");
	} else if (ann.is_object()) {
		summands = json::array({ann});
	} else {
		throw ParseError("annotations must be an object");
	}
	if (summands.size() != sum.summands.size())
		throw ParseError("annotation count does not match the summand count");
	for (size_t j = 0; j < sum.summands.size(); ++j) {
		ConnectedExpression& ce = sum.summands[j];
		const json& sj = summands.at(j);
		bool has_pairings = sj.contains("pairings") && !sj.at("pairings").empty();
		bool has_cables = sj.contains("cables") && !sj.at("cables").empty();
		if (has_pairings && has_cables)
			throw ParseError("a summand cannot carry both pairings and cables");
		if (has_pairings) {
			ce.annotation = Annotation::pairings;
			for (const auto& [letter, rows] : sj.at("pairings").items()) {
				const auto& locs = ce.alphabet->locations(letter);
				std::vector<SitePartition> parts_p;
				for (int i : locs)
					parts_p.push_back(site_partition(ce.parts[i], letter));
				for (const auto& row : rows) {
					auto names = string_list(row, "pairing tuple");
					if (names.size() != locs.size())
						throw ParseError("pairing tuple for " + letter +
						                 " has the wrong width");
					PairingTuple t;
					for (size_t pos = 0; pos < names.size(); ++pos)
						t.push_back(find_block(parts_p[pos], names[pos],
						                       "part " + std::to_string(locs[pos] + 1)));
					ce.pairings[letter].push_back(std::move(t));
				}
			}
		}
		if (has_cables) {
			ce.annotation = Annotation::cables;
			for (const auto& [letter, rows] : sj.at("cables").items()) {
				const auto& locs = ce.alphabet->locations(letter);
				std::vector<SitePartition> parts_p;
				for (int i : locs)
					parts_p.push_back(site_partition(ce.parts[i], letter));
				for (const auto& row : rows) {
					if (!row.is_array() || row.size() != locs.size())
						throw ParseError("a cable for " + letter + " needs one duct "
						                 "per location of the letter");
					Cable cable;
					for (size_t pos = 0; pos < row.size(); ++pos) {
						const json& dj = row.at(pos);
						if (!dj.is_array() || dj.size() != 2)
							throw ParseError("a duct is a [block, [effects]] pair");
						CableDuct duct;
						duct.pre = find_block(parts_p[pos],
						                      dj.at(0).get<std::string>(),
						                      "part " + std::to_string(locs[pos] + 1));
						for (const auto& name :
						     string_list(dj.at(1), "duct effects")) {
							RxPtr e = parse_regex(name);
							duct.effects.insert(e);
						}
						cable.push_back(std::move(duct));
					}
					ce.cables[letter].push_back(std::move(cable));
				}
			}
		}
		ce.validate();
	}
}

}  // namespace

ExpressionInput expression_from_text(const std::string& body,
                                     const std::string& annotations_json) {
	AlphabetPtr alphabet;
	std::string expr_text;
	std::istringstream lines(body);
	std::string line;
	while (std::getline(lines, line)) {
		std::string t = trim(line);
		if (t.empty()) continue;
		if (t.front() == '#') {
			const std::string key = "alphabet:";
			size_t at = t.find(key);
			if (at != std::string::npos)
				alphabet = alphabet_from_json(
						parse_json(trim(t.substr(at + key.size())), "alphabet directive"));
			continue;
		}
		if (!expr_text.empty()) expr_text += " ";
		expr_text += t;
	}
	if (expr_text.empty()) throw ParseError("the expression body is empty");

	json ann;
	if (!annotations_json.empty()) {
		ann = parse_json(annotations_json, "annotations");
		if (!alphabet && ann.is_object() && ann.contains("alphabet"))
			alphabet = alphabet_from_json(ann.at("alphabet"));
	}

	ExpressionInput out;
	if (expr_text.find("fsync") == std::string::npos) {
		RxPtr r = parse_regex(expr_text);
		if (!alphabet) {
			auto occ = occurring_letters(r);
			if (occ.empty()) occ.insert("a");
			alphabet = make_alphabet({{occ.begin(), occ.end()}});
		}
		out.alphabet = alphabet;
		out.plain = r;
		if (!annotations_json.empty() && ann.is_object() &&
		    (ann.contains("pairings") || ann.contains("cables") ||
		     ann.contains("summands")))
			throw ParseError("a bare regular expression takes no annotations");
		return out;
	}

	SumExpression sum;
	for (const auto& chunk : split_top_level(expr_text, '+')) {
		ConnectedExpression ce = parse_fused(chunk, alphabet);
		if (!alphabet) alphabet = ce.alphabet;
		if (!(*ce.alphabet == *alphabet))
			throw ParseError("summands disagree on the alphabet");
		sum.summands.push_back(std::move(ce));
	}
	sum.alphabet = alphabet;
	for (auto& ce : sum.summands) ce.alphabet = alphabet;
	if (!annotations_json.empty() &&
	    (ann.contains("summands") || ann.contains("pairings") ||
	     ann.contains("cables")))
		apply_annotations(sum, ann);
	sum.validate();
	out.alphabet = alphabet;
	out.sum = std::move(sum);
	return out;
}

std::string expression_body_text(const ExpressionInput& e) {
	std::string out = "# alphabet: " + alphabet_to_text(*e.alphabet) + "\n";
	if (e.plain) {
		out += rx_text(*e.plain) + "\n";
	} else if (e.sum) {
		out += sce_text(*e.sum) + "\n";
	}
	return out;
}

std::string expression_annotations_text(const ExpressionInput& e) {
	if (!e.sum) return "";
	bool any = false;
	for (const auto& ce : e.sum->summands)
		any = any || ce.annotation != Annotation::none;
	if (!any) return "";
	json j;
	j["alphabet"] = alphabet_to_json(*e.alphabet);
	json summands = json::array();
	for (const auto& ce : e.sum->summands) {
		json sj = json::object();
		if (ce.annotation == Annotation::pairings) {
			json pj;
			for (const auto& [letter, tuples] : ce.pairings) {
				json rows = json::array();
				for (const auto& t : tuples) {
					json row = json::array();
					for (const auto& block : t) row.push_back(rx_text(*block.begin()));
					rows.push_back(std::move(row));
				}
				pj[letter] = std::move(rows);
			}
			sj["pairings"] = std::move(pj);
		}
		if (ce.annotation == Annotation::cables) {
			json cj;
			for (const auto& [letter, cbls] : ce.cables) {
				json rows = json::array();
				for (const auto& c : cbls) {
					json row = json::array();
					for (const auto& duct : c) {
						json dj = json::array();
						dj.push_back(rx_text(*duct.pre.begin()));
						json effects = json::array();
						for (const auto& e2 : duct.effects) effects.push_back(rx_text(e2));
						dj.push_back(std::move(effects));
						row.push_back(std::move(dj));
					}
					rows.push_back(std::move(row));
				}
				cj[letter] = std::move(rows);
			}
			sj["cables"] = std::move(cj);
		}
		summands.push_back(std::move(sj));
	}
	j["summands"] = std::move(summands);
	return j.dump(2) + "\n";
}

FiniteAcceptor expression_acceptor(const ExpressionInput& e, size_t cap) {
	if (e.plain) return regex_to_acceptor(*e.plain, e.alphabet);
	if (e.sum) return sce_acceptor(*e.sum, cap);
	throw ValidationError("empty expression input");
}

InputKind sniff_kind(const std::string& path, const std::string& content) {
	auto ends_with = [&](const std::string& suffix) {
		return path.size() >= suffix.size() &&
		       path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
	};
	if (ends_with(".net.json")) return InputKind::net;
	if (ends_with(".ps.json")) return InputKind::product;
	if (ends_with(".json")) {
		json j = parse_json(content, path);
		if (j.is_object() && j.contains("places")) return InputKind::net;
		if (j.is_object() && j.contains("components")) return InputKind::product;
		throw ParseError("cannot tell what kind of system " + path + " holds");
	}
	return InputKind::expression;
}

NetSystem load_net(const std::string& path) {
	return net_from_text(read_file(path));
}

ProductSystem load_ps(const std::string& path) {
	return ps_from_text(read_file(path));
}

ExpressionInput load_expression(const std::string& path) {
	std::string body = read_file(path);
	std::string ann;
	std::string sidecar = path + ".ann.json";
	if (file_exists(sidecar)) ann = read_file(sidecar);
	return expression_from_text(body, ann);
}

}  // namespace kfc
