#pragma once
// Language-preserving conversions between net systems, product systems and
// fused expressions. Every conversion returns its result together with a
// report that re-checks the language against the input and records how the
// structural properties carried over.

#include "kleenefc/connected.hpp"
#include "kleenefc/nets.hpp"
#include "kleenefc/products.hpp"

namespace kfc {

struct PropertyTransfer {
	std::string name;    // e.g. "free choice -> same source"
	std::string source;  // "pass", "fail" or "n/a"
	std::string target;
};

struct ConversionReport {
	std::string direction;
	std::string input_digest;
	std::vector<PropertyTransfer> properties;
	bool verified = false;
	std::optional<Word> witness;  // separating word when verification failed
	std::vector<std::string> notes;
};

template <class T>
struct Converted {
	T value;
	ConversionReport report;
};

std::string report_text(const ConversionReport& report);

// Net system with a place cover -> product system whose joint moves are read
// off the transitions; final markings become subset-acceptance tuples.
Converted<ProductSystem> net_to_products(const NetSystem& sys,
                                         size_t cap = state_cap());

// Product system with one initial tuple -> net system with one place per
// location-tagged state and one transition per joint move.
Converted<NetSystem> products_to_net(const ProductSystem& ps,
                                     size_t cap = state_cap());

// Product-acceptance system -> connected expression. Component languages are
// solved by state elimination, partition blocks are matched to the
// letter-enabled states by language, and the joint moves become cables.
Converted<ConnectedExpression> products_to_connected(const ProductSystem& ps,
                                                     size_t cap = state_cap());

// Connected expression -> product system whose per-location states are sets
// of derivatives; cables become global moves.
Converted<ProductSystem> connected_to_products(const ConnectedExpression& ce,
                                               size_t cap = state_cap());

// Subset-acceptance system -> sum of connected expressions, one summand per
// final tuple, each carrying cables.
Converted<SumExpression> products_to_sum(const ProductSystem& ps,
                                         size_t cap = state_cap());

// Sum of connected expressions -> one product system accepting the union.
Converted<ProductSystem> sum_to_products(const SumExpression& e,
                                         size_t cap = state_cap());

// Matching-annotated (or unannotated direct) system -> sum of
// pairing-annotated expressions.
Converted<SumExpression> products_to_sum_pairings(const ProductSystem& ps,
                                                  size_t cap = state_cap());

// Pairing-annotated sum -> matching-annotated product system.
Converted<ProductSystem> sum_pairings_to_products(const SumExpression& e,
                                                  size_t cap = state_cap());

struct PipelineResult {
	ProductSystem products;
	SumExpression expression;
	ProductSystem products_back;
	std::optional<NetSystem> net_back;
	std::vector<ConversionReport> stages;
	bool verified = false;
	std::optional<Word> witness;
	std::vector<std::string> notes;
};

// Net -> products -> expression sum -> products (-> net when a single
// initial tuple remains), checking every stage against the net language.
// Systems with recombining joint moves also run the pairing route.
PipelineResult net_expression_pipeline(const NetSystem& sys,
                                       size_t cap = state_cap());

}  // namespace kfc
