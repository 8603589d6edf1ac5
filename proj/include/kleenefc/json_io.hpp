#pragma once
// JSON and text serialization for alphabets, nets, product systems and
// expression files, plus file helpers and input-kind sniffing for the CLI.

#include "kleenefc/connected.hpp"
#include "kleenefc/nets.hpp"
#include "kleenefc/products.hpp"

namespace kfc {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

std::string alphabet_to_text(const DistributedAlphabet& alphabet);

NetSystem net_from_text(const std::string& json);
std::string net_to_text(const NetSystem& sys);

ProductSystem ps_from_text(const std::string& json);
std::string ps_to_text(const ProductSystem& ps);

// An expression file holds either a bare regular expression or a sum of
// fused expressions. The body may carry "# alphabet: [[...],...]" comment
// directives; pairings and cables live in a JSON annotation sidecar next to
// the body file ("<file>.ann.json"). Blocks are named by any member
// expression, effects by their derivative expressions.
struct ExpressionInput {
	AlphabetPtr alphabet;
	std::optional<RxPtr> plain;
	std::optional<SumExpression> sum;
};

ExpressionInput expression_from_text(const std::string& body,
                                     const std::string& annotations_json);
std::string expression_body_text(const ExpressionInput& e);
// Empty when the expression carries no annotations.
std::string expression_annotations_text(const ExpressionInput& e);

FiniteAcceptor expression_acceptor(const ExpressionInput& e,
                                   size_t cap = state_cap());

enum class InputKind { net, product, expression };
InputKind sniff_kind(const std::string& path, const std::string& content);

NetSystem load_net(const std::string& path);
ProductSystem load_ps(const std::string& path);
ExpressionInput load_expression(const std::string& path);

}  // namespace kfc
