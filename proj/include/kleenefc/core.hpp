#pragma once
// Distributed alphabets, words, verdicts and the error types shared by the
// net, product-system and expression layers.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kfc {

// Letters are plain strings; a word is a sequence of letters.
using Word = std::vector<std::string>;
using WordSet = std::set<Word>;

struct Error : std::runtime_error {
	using std::runtime_error::runtime_error;
};
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct NotEnabled : Error { using Error::Error; };
struct BoundViolation : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct ExplorationLimit : Error { using Error::Error; };
struct VerificationError : Error { using Error::Error; };

// Shortlex: shorter first, then lexicographic.
bool shortlex_less(const Word& a, const Word& b);

// Renders a word; single-character letters are concatenated, anything longer
// is joined with dots. The empty word renders as "()".
std::string word_text(const Word& w);
Word word_from_text(const std::string& text);

struct Verdict {
	bool ok = true;
	std::string reason;
	std::optional<Word> witness;
	std::vector<std::string> details;

	explicit operator bool() const { return ok; }
	static Verdict pass() { return Verdict{}; }
	static Verdict fail(std::string why);
	static Verdict fail(std::string why, Word word);
	std::string text() const;
};

// A distributed alphabet: one letter set per location. A letter may belong
// to several locations; those letters are the synchronizing ("global") ones.
struct DistributedAlphabet {
	std::vector<std::vector<std::string>> components;  // per location, sorted
	std::vector<std::string> letters;                  // sorted union
	std::map<std::string, std::vector<int>> location_map;

	static DistributedAlphabet make(std::vector<std::vector<std::string>> comps);

	size_t width() const { return components.size(); }
	bool has(const std::string& letter) const;
	const std::vector<int>& locations(const std::string& letter) const;
	bool is_global(const std::string& letter) const;
	bool is_local(const std::string& letter) const;
	bool operator==(const DistributedAlphabet& other) const {
		return components == other.components;
	}
};
using AlphabetPtr = std::shared_ptr<const DistributedAlphabet>;

AlphabetPtr make_alphabet(std::vector<std::vector<std::string>> comps);

// Projection of a word onto one location's letters.
Word project(const Word& w, const DistributedAlphabet& alphabet, int location);

// State-count cap for explorations; reads KLEENEFC_MAX_STATES once,
// default one million.
size_t state_cap();

uint64_t fnv1a(const std::string& data);
std::string digest_hex(const std::string& data);

}  // namespace kfc
