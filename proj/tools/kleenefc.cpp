// Command-line front end: structural checks, conversions, language queries
// and the full net-to-expression round trip, over net/product/expression
// files recognized by suffix or content.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kleenefc/json_io.hpp"
#include "kleenefc/transforms.hpp"

using namespace kfc;

namespace {

FiniteAcceptor load_acceptor(const std::string& path, size_t cap) {
	std::string content = read_file(path);
	switch (sniff_kind(path, content)) {
		case InputKind::net:
			return net_acceptor(net_from_text(content), cap);
		case InputKind::product:
			return run_graph(ps_from_text(content), cap);
		case InputKind::expression:
			return expression_acceptor(load_expression(path), cap);
	}
	throw Error("unreachable");
}

int finish_verdict(const Verdict& v) {
	std::cout << v.text() << "\n";
	return v.ok ? 0 : 1;
}

int check_net(const NetSystem& sys, const std::string& property, size_t cap) {
	if (property == "free-choice") return finish_verdict(check_free_choice(sys.net));
	if (property == "live") return finish_verdict(check_net_live(sys, cap));
	if (property == "s-cover") {
		CoverResult cover = find_place_cover(sys);
		if (!cover.ok) {
			std::cout << "fail: " << cover.reason << "\n";
			return 1;
		}
		std::cout << "pass\n";
		for (size_t i = 0; i < cover.cover.components.size(); ++i) {
			std::cout << "  component " << i + 1 << ":";
			for (const auto& p : cover.cover.components[i]) std::cout << " " << p;
			std::cout << "\n";
		}
		return 0;
	}
	if (property == "distributed-choice" || property == "finals-product") {
		CoverResult cover = find_place_cover(sys);
		if (!cover.ok) {
			std::cout << "fail: no place cover: " << cover.reason << "\n";
			return 1;
		}
		if (property == "distributed-choice")
			return finish_verdict(check_distributed_choice(sys.net, cover.cover));
		return finish_verdict(check_finals_product(sys, cover.cover));
	}
	throw PreconditionError("unknown net property: " + property);
}

int check_ps(const ProductSystem& ps, const std::string& property, size_t cap) {
	if (property == "matchings")
		return finish_verdict(check_matchings_wellformed(ps));
	if (property == "conflict-equivalent")
		return finish_verdict(check_conflict_equivalent(ps));
	if (property == "consistent-matchings")
		return finish_verdict(check_consistent_matchings(ps, cap));
	if (property == "same-source") return finish_verdict(check_same_source(ps));
	if (property == "product-moves")
		return finish_verdict(check_product_moves(ps));
	if (property == "live") return finish_verdict(check_ps_live(ps, cap));
	throw PreconditionError("unknown product-system property: " + property);
}

SumExpression as_sum(const ExpressionInput& input) {
	if (input.sum) return *input.sum;
	if (input.alphabet->width() != 1)
		throw PreconditionError("a bare regular expression only stands alone "
		                        "over a one-location alphabet");
	ConnectedExpression ce;
	ce.alphabet = input.alphabet;
	ce.parts = {*input.plain};
	SumExpression sum;
	sum.alphabet = input.alphabet;
	sum.summands = {ce};
	return sum;
}

int check_bifurcation(const ExpressionInput& input, size_t bound) {
	SumExpression sum = as_sum(input);
	bool all_ok = true;
	for (size_t j = 0; j < sum.summands.size(); ++j) {
		const ConnectedExpression& ce = sum.summands[j];
		for (const auto& letter : ce.alphabet->letters) {
			const auto& locs = ce.alphabet->locations(letter);
			for (int i : locs) {
				const RxPtr& part = ce.parts[i];
				size_t n = bound ? bound : default_check_bound(part);
				for (const auto& block : site_partition(part, letter)) {
					Verdict v = check_bifurcates(part, letter, block, n);
					std::cout << "summand " << j + 1 << ", part " << i + 1
					          << ", letter " << letter << ", block "
					          << block_text(block) << ": "
					          << (v.ok ? "bifurcates" : "fail: " + v.reason)
					          << "\n";
					all_ok = all_ok && v.ok;
				}
			}
		}
	}
	return all_ok ? 0 : 1;
}

int check_expression(const ExpressionInput& input, const std::string& property,
                     size_t bound, size_t cap) {
	if (property == "bifurcation") return check_bifurcation(input, bound);
	SumExpression sum = as_sum(input);
	for (size_t j = 0; j < sum.summands.size(); ++j) {
		const ConnectedExpression& ce = sum.summands[j];
		Verdict v;
		if (property == "equal-choice")
			v = check_equal_choice(ce);
		else if (property == "consistent-pairing")
			v = check_consistent_pairings(ce, cap);
		else if (property == "equal-source")
			v = check_equal_source(ce);
		else if (property == "product-derivatives")
			v = check_product_derivatives(ce);
		else if (property == "action-live")
			v = check_action_live(ce, cap);
		else
			throw PreconditionError("unknown expression property: " + property);
		if (!v.ok) {
			if (sum.summands.size() > 1)
				std::cout << "summand " << j + 1 << ": ";
			return finish_verdict(v);
		}
	}
	std::cout << "pass\n";
	return 0;
}

int run_check(const std::string& file, const std::string& property,
              size_t bound, size_t cap) {
	std::string content = read_file(file);
	switch (sniff_kind(file, content)) {
		case InputKind::net:
			return check_net(net_from_text(content), property, cap);
		case InputKind::product:
			return check_ps(ps_from_text(content), property, cap);
		case InputKind::expression:
			return check_expression(load_expression(file), property, bound, cap);
	}
	throw Error("unreachable");
}

int finish_report(const ConversionReport& report, bool force) {
	std::cerr << report_text(report);
	if (!report.verified && !force) {
		std::cerr << "refusing to write an unverified result (use --force)\n";
		return 2;
	}
	return 0;
}

void emit_text(const std::string& out_path, const std::string& text) {
	if (out_path.empty()) {
		std::cout << text;
	} else {
		write_file(out_path, text);
		std::cerr << "wrote " << out_path << "\n";
	}
}

int emit_ps(const ProductSystem& ps, const ConversionReport& report,
            const std::string& out_path, bool force) {
	int code = finish_report(report, force);
	if (code) return code;
	emit_text(out_path, ps_to_text(ps));
	return 0;
}

int emit_net(const NetSystem& sys, const ConversionReport& report,
             const std::string& out_path, bool force) {
	int code = finish_report(report, force);
	if (code) return code;
	emit_text(out_path, net_to_text(sys));
	return 0;
}

int emit_sum(const SumExpression& sum, const ConversionReport& report,
             const std::string& out_path, bool force) {
	int code = finish_report(report, force);
	if (code) return code;
	ExpressionInput input;
	input.alphabet = sum.alphabet;
	input.sum = sum;
	std::string body = expression_body_text(input);
	std::string ann = expression_annotations_text(input);
	if (out_path.empty()) {
		std::cout << body;
		if (!ann.empty()) std::cout << "--- annotations ---\n" << ann;
	} else {
		write_file(out_path, body);
		std::cerr << "wrote " << out_path << "\n";
		if (!ann.empty()) {
			write_file(out_path + ".ann.json", ann);
			std::cerr << "wrote " << out_path << ".ann.json\n";
		}
	}
	return 0;
}

ConversionReport annotation_report(const std::string& direction,
                                   const ProductSystem& before,
                                   const ProductSystem& after, size_t cap) {
	ConversionReport report;
	report.direction = direction;
	report.input_digest = digest_hex(ps_to_text(before));
	LanguageComparison cmp =
			acceptor_equal(run_graph(before, cap), run_graph(after, cap), cap);
	report.verified = cmp.equal;
	if (!cmp.equal && cmp.witness) {
		report.witness = cmp.witness;
		report.notes.push_back("languages differ at " + word_text(*cmp.witness));
	}
	return report;
}

int run_convert(const std::string& file, const std::string& direction,
                const std::string& out_path, bool force, size_t cap) {
	if (direction == "net-to-ps") {
		Converted<ProductSystem> c = net_to_products(load_net(file), cap);
		return emit_ps(c.value, c.report, out_path, force);
	}
	if (direction == "ps-to-net") {
		Converted<NetSystem> c = products_to_net(load_ps(file), cap);
		return emit_net(c.value, c.report, out_path, force);
	}
	if (direction == "ps-to-sce") {
		Converted<SumExpression> c = products_to_sum(load_ps(file), cap);
		return emit_sum(c.value, c.report, out_path, force);
	}
	if (direction == "ps-to-sce-pairings") {
		Converted<SumExpression> c = products_to_sum_pairings(load_ps(file), cap);
		return emit_sum(c.value, c.report, out_path, force);
	}
	if (direction == "sce-to-ps") {
		Converted<ProductSystem> c = sum_to_products(as_sum(load_expression(file)), cap);
		return emit_ps(c.value, c.report, out_path, force);
	}
	if (direction == "sce-pairings-to-ps") {
		Converted<ProductSystem> c =
				sum_pairings_to_products(as_sum(load_expression(file)), cap);
		return emit_ps(c.value, c.report, out_path, force);
	}
	if (direction == "globals-to-matchings" ||
	    direction == "matchings-to-globals") {
		ProductSystem ps = load_ps(file);
		ProductSystem out = direction == "globals-to-matchings"
		                        ? matchings_from_globals(ps)
		                        : globals_from_matchings(ps);
		ConversionReport report = annotation_report(
				direction == "globals-to-matchings" ? "joint moves -> matching"
		                                        : "matching -> joint moves",
				ps, out, cap);
		return emit_ps(out, report, out_path, force);
	}
	if (direction == "decompose") {
		ProductSystem ps = load_ps(file);
		std::vector<ProductSystem> parts = decompose_union(ps);
		for (size_t j = 0; j < parts.size(); ++j) {
			if (out_path.empty()) {
				std::cout << "--- part " << j + 1 << " ---\n"
				          << ps_to_text(parts[j]);
			} else {
				std::string path =
						out_path + "-" + std::to_string(j + 1) + ".ps.json";
				write_file(path, ps_to_text(parts[j]));
				std::cerr << "wrote " << path << "\n";
			}
		}
		return 0;
	}
	if (direction == "pairings-to-cables" || direction == "cables-to-pairings") {
		ExpressionInput input = load_expression(file);
		SumExpression sum = as_sum(input);
		SumExpression out;
		out.alphabet = sum.alphabet;
		for (const auto& ce : sum.summands)
			out.summands.push_back(direction == "pairings-to-cables"
			                           ? pairings_to_cables(ce)
			                           : cables_to_pairings(ce));
		ConversionReport report;
		report.direction = direction == "pairings-to-cables"
		                       ? "pairings -> cables"
		                       : "cables -> pairings";
		report.input_digest = digest_hex(read_file(file));
		LanguageComparison cmp = acceptor_equal(sce_acceptor(sum, cap),
		                                        sce_acceptor(out, cap), cap);
		report.verified = cmp.equal;
		if (!cmp.equal && cmp.witness) report.witness = cmp.witness;
		return emit_sum(out, report, out_path, force);
	}
	throw PreconditionError("unknown conversion direction: " + direction);
}

int run_pipeline(const std::string& file, const std::string& out_path,
                 size_t cap) {
	PipelineResult result = net_expression_pipeline(load_net(file), cap);
	for (const auto& stage : result.stages) std::cout << report_text(stage);
	for (const auto& n : result.notes) std::cout << "note: " << n << "\n";
	if (result.verified) {
		std::cout << "pipeline: every stage preserved the language\n";
	} else {
		std::cout << "pipeline: FAILED";
		if (result.witness) std::cout << " at " << word_text(*result.witness);
		std::cout << "\n";
	}
	if (!out_path.empty()) {
		ExpressionInput input;
		input.alphabet = result.expression.alphabet;
		input.sum = result.expression;
		write_file(out_path, expression_body_text(input));
		std::cerr << "wrote " << out_path << "\n";
		std::string ann = expression_annotations_text(input);
		if (!ann.empty()) {
			write_file(out_path + ".ann.json", ann);
			std::cerr << "wrote " << out_path << ".ann.json\n";
		}
	}
	return result.verified ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
	CLI::App app{"free-choice net, product system and expression toolkit"};
	app.require_subcommand(1);

	size_t cap = state_cap();
	app.add_option("--cap", cap, "state cap for explorations");

	std::string file;
	std::string second;
	std::string property;
	std::string direction;
	std::string out_path;
	size_t bound = 0;
	size_t length = 0;
	bool force = false;

	CLI::App* check = app.add_subcommand("check", "run a structural check");
	check->add_option("file", file, "net, product system or expression file")
			->required();
	check->add_option("property", property, "property name")->required();
	check->add_option("--bound", bound, "word-length bound for bounded checks");

	CLI::App* convert =
			app.add_subcommand("convert", "convert between the three forms");
	convert->add_option("file", file, "input file")->required();
	convert->add_option("direction", direction, "conversion direction")
			->required();
	convert->add_option("-o,--out", out_path, "output file");
	convert->add_flag("--force", force,
	                  "write the result even when verification failed");

	CLI::App* lang = app.add_subcommand("lang", "language queries");
	lang->require_subcommand(1);
	CLI::App* lang_enum =
			lang->add_subcommand("enum", "accepted words up to a length");
	lang_enum->add_option("file", file)->required();
	lang_enum->add_option("n", length)->required();
	CLI::App* lang_eq = lang->add_subcommand("eq", "exact language equality");
	lang_eq->add_option("first", file)->required();
	lang_eq->add_option("second", second)->required();
	CLI::App* lang_closure = lang->add_subcommand(
			"closure", "bounded recombination-closure check");
	lang_closure->add_option("file", file)->required();
	lang_closure->add_option("n", length)->required();

	CLI::App* pipeline = app.add_subcommand(
			"pipeline", "net -> products -> expressions and back, verified");
	pipeline->add_option("file", file, "net file")->required();
	pipeline->add_option("-o,--out", out_path, "write the expression here");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}

	try {
		if (check->parsed()) return run_check(file, property, bound, cap);
		if (convert->parsed())
			return run_convert(file, direction, out_path, force, cap);
		if (lang_enum->parsed()) {
			for (const auto& w :
			     acceptor_language_bounded(load_acceptor(file, cap), length, cap))
				std::cout << word_text(w) << "\n";
			return 0;
		}
		if (lang_eq->parsed()) {
			LanguageComparison cmp = acceptor_equal(load_acceptor(file, cap),
			                                        load_acceptor(second, cap), cap);
			if (cmp.equal) {
				std::cout << "equal\n";
				return 0;
			}
			std::cout << "different: " << word_text(*cmp.witness) << " only in "
			          << (cmp.witness_in_first ? file : second) << "\n";
			return 1;
		}
		if (lang_closure->parsed()) {
			ClosureCheck closure =
					direct_product_closure(load_acceptor(file, cap), length, cap);
			if (closure.closed) {
				std::cout << "closed for words up to length " << length << "\n";
				return 0;
			}
			std::cout << "not closed: " << word_text(*closure.counterexample)
			          << "\n";
			return 1;
		}
		if (pipeline->parsed()) return run_pipeline(file, out_path, cap);
	} catch (const CLI::Error& e) {
		std::cerr << e.what() << "\n";
		return 2;
	} catch (const Error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	}
	return 2;
}
