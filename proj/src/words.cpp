#include "dilab/words.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace dilab {

bool word_less(const NormalWord& a, const NormalWord& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  if (a.edeg() != b.edeg()) return a.edeg() < b.edeg();
  if (a.e != b.e) return a.e < b.e;
  return a.f < b.f;
}

std::size_t WordHash::operator()(const NormalWord& w) const {
  // FNV-1a over the index stream, with a separator between e and f parts.
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::size_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (int i : w.e) mix(static_cast<std::size_t>(i) + 1);
  mix(0);
  for (int j : w.f) mix(static_cast<std::size_t>(j) + 1);
  return h;
}

Pattern pattern_of(const NormalWord& w) {
  Pattern p;
  p.reserve(w.length());
  for (int i = 0; i < w.edeg(); ++i) p.push_back(true);
  for (int j = 0; j < w.fdeg(); ++j) p.push_back(false);
  return p;
}

Pattern pattern_of(const std::vector<Gen>& letters) {
  Pattern p;
  p.reserve(letters.size());
  for (const Gen& g : letters) p.push_back(g.is_e);
  return p;
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.') {
      if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

// Parses "e12" / "f3" with optional trailing '*' when allow_star is set.
StarLetter parse_token(const std::string& tok, int m, int n, bool allow_star) {
  std::string t = tok;
  bool star = false;
  if (!t.empty() && t.back() == '*') {
    star = true;
    t.pop_back();
  }
  if (star && !allow_star)
    throw std::invalid_argument("adjoint token not allowed here: " + tok);
  if (t.size() < 2 || (t[0] != 'e' && t[0] != 'f'))
    throw std::invalid_argument("bad generator token: " + tok);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i])))
      throw std::invalid_argument("bad generator token: " + tok);
  const bool is_e = t[0] == 'e';
  const int idx = std::stoi(t.substr(1));
  const int bound = is_e ? m : n;
  if (idx < 1 || idx > bound)
    throw std::out_of_range("generator index out of range: " + tok);
  return StarLetter{is_e, idx - 1, star};
}

}  // namespace

std::vector<Gen> parse_word(const std::string& text, int m, int n) {
  std::vector<Gen> out;
  for (const std::string& tok : tokenize(text)) {
    StarLetter l = parse_token(tok, m, n, false);
    out.push_back(Gen{l.is_e, l.index});
  }
  return out;
}

std::vector<StarLetter> parse_star_word(const std::string& text, int m, int n) {
  std::vector<StarLetter> out;
  for (const std::string& tok : tokenize(text)) out.push_back(parse_token(tok, m, n, true));
  return out;
}

std::string to_string(const Gen& g) {
  return (g.is_e ? "e" : "f") + std::to_string(g.index + 1);
}

std::string to_string(const std::vector<Gen>& letters) {
  std::string s;
  for (const Gen& g : letters) {
    if (!s.empty()) s += ' ';
    s += to_string(g);
  }
  return s;
}

std::string to_string(const NormalWord& w) { return to_string(letters_of(w)); }

std::string to_string(const std::vector<StarLetter>& letters) {
  std::string s;
  for (const StarLetter& l : letters) {
    if (!s.empty()) s += ' ';
    s += to_string(Gen{l.is_e, l.index});
    if (l.star) s += '*';
  }
  return s;
}

std::vector<Gen> letters_of(const NormalWord& w) {
  std::vector<Gen> out;
  out.reserve(w.length());
  for (int i : w.e) out.push_back(Gen{true, i});
  for (int j : w.f) out.push_back(Gen{false, j});
  return out;
}

}  // namespace dilab
