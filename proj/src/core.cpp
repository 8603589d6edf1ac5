#include "kleenefc/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace kfc {

bool shortlex_less(const Word& a, const Word& b) {
	if (a.size() != b.size()) return a.size() < b.size();
	return a < b;
}

std::string word_text(const Word& w) {
	if (w.empty()) return "()";
	bool plain = true;
	for (const auto& x : w)
		if (x.size() != 1) plain = false;
	std::string out;
	for (size_t i = 0; i < w.size(); ++i) {
		if (!plain && i) out += '.';
		out += w[i];
	}
	return out;
}

Word word_from_text(const std::string& text) {
	Word w;
	if (text.empty() || text == "()") return w;
	if (text.find('.') != std::string::npos) {
		std::string cur;
		for (char c : text) {
			if (c == '.') {
				if (cur.empty()) throw ParseError("empty letter in word: " + text);
				w.push_back(cur);
				cur.clear();
			} else {
				cur += c;
			}
		}
		if (cur.empty()) throw ParseError("empty letter in word: " + text);
		w.push_back(cur);
		return w;
	}
	for (char c : text) w.push_back(std::string(1, c));
	return w;
}

Verdict Verdict::fail(std::string why) {
	Verdict v;
	v.ok = false;
	v.reason = std::move(why);
	return v;
}

Verdict Verdict::fail(std::string why, Word word) {
	Verdict v = fail(std::move(why));
	v.witness = std::move(word);
	return v;
}

std::string Verdict::text() const {
	if (ok) return "pass";
	std::string out = "fail: " + reason;
	if (witness) out += " [witness " + word_text(*witness) + "]";
	for (const auto& d : details) out += "\n  " + d;
	return out;
}

DistributedAlphabet DistributedAlphabet::make(
		std::vector<std::vector<std::string>> comps) {
	if (comps.empty())
		throw ValidationError("a distributed alphabet needs at least one location");
	DistributedAlphabet d;
	d.components = std::move(comps);
	for (size_t i = 0; i < d.components.size(); ++i) {
		auto& c = d.components[i];
		std::sort(c.begin(), c.end());
		c.erase(std::unique(c.begin(), c.end()), c.end());
		if (c.empty())
			throw ValidationError("location " + std::to_string(i + 1) +
			                      " has an empty letter set");
		for (const auto& a : c) {
			if (a.empty()) throw ValidationError("empty letter name");
			d.location_map[a].push_back(static_cast<int>(i));
		}
	}
	for (const auto& [a, locs] : d.location_map) d.letters.push_back(a);
	return d;
}

bool DistributedAlphabet::has(const std::string& letter) const {
	return location_map.count(letter) != 0;
}

const std::vector<int>& DistributedAlphabet::locations(
		const std::string& letter) const {
	auto it = location_map.find(letter);
	if (it == location_map.end())
		throw ValidationError("letter not in alphabet: " + letter);
	return it->second;
}

bool DistributedAlphabet::is_global(const std::string& letter) const {
	return locations(letter).size() > 1;
}

bool DistributedAlphabet::is_local(const std::string& letter) const {
	return locations(letter).size() == 1;
}

AlphabetPtr make_alphabet(std::vector<std::vector<std::string>> comps) {
	return std::make_shared<const DistributedAlphabet>(
			DistributedAlphabet::make(std::move(comps)));
}

Word project(const Word& w, const DistributedAlphabet& alphabet, int location) {
	if (location < 0 || static_cast<size_t>(location) >= alphabet.width())
		throw ValidationError("location out of range");
	Word out;
	for (const auto& a : w) {
		const auto& locs = alphabet.locations(a);
		if (std::find(locs.begin(), locs.end(), location) != locs.end())
			out.push_back(a);
	}
	return out;
}

size_t state_cap() {
	static const size_t cap = [] {
		const char* env = std::getenv("KLEENEFC_MAX_STATES");
		if (!env) return static_cast<size_t>(1000000);
		char* end = nullptr;
		unsigned long long v = std::strtoull(env, &end, 10);
		if (end == env || v == 0) return static_cast<size_t>(1000000);
		return static_cast<size_t>(v);
	}();
	return cap;
}

uint64_t fnv1a(const std::string& data) {
	uint64_t h = 14695981039346656037ull;
	for (unsigned char c : data) {
		h ^= c;
		h *= 1099511628211ull;
	}
	return h;
}

std::string digest_hex(const std::string& data) {
	std::ostringstream os;
	os << std::hex << fnv1a(data);
	return os.str();
}

}  // namespace kfc
