#include "whow/segment.hpp"

#include <cctype>
#include <set>
#include <string>

namespace whow {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// UTF-8 sequences we care about around boundaries.
bool at_seq(const std::string& s, size_t i, const char* seq) {
  return s.compare(i, 3, seq) == 0;
}
const char* kEllipsis = "\xE2\x80\xA6";
const char* kRightDq = "\xE2\x80\x9D";
const char* kRightSq = "\xE2\x80\x99";
const char* kLeftDq = "\xE2\x80\x9C";
const char* kLeftSq = "\xE2\x80\x98";

bool is_terminal_at(const std::string& s, size_t i, size_t* width) {
  char c = s[i];
  if (c == '.' || c == '?' || c == '!') {
    *width = 1;
    return true;
  }
  if (i + 3 <= s.size() && at_seq(s, i, kEllipsis)) {
    *width = 3;
    return true;
  }
  return false;
}

bool is_closer_at(const std::string& s, size_t i, size_t* width) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') {
    *width = 1;
    return true;
  }
  if (i + 3 <= s.size() && (at_seq(s, i, kRightDq) || at_seq(s, i, kRightSq))) {
    *width = 3;
    return true;
  }
  return false;
}

bool starts_sentence_at(const std::string& s, size_t i) {
  char c = s[i];
  if (std::isupper(static_cast<unsigned char>(c))) return true;
  if (std::isdigit(static_cast<unsigned char>(c))) return true;
  if (c == '"' || c == '\'' || c == '(' || c == '[') return true;
  if (i + 3 <= s.size() && (at_seq(s, i, kLeftDq) || at_seq(s, i, kLeftSq))) return true;
  return false;
}

// Token of letters and internal dots ending just before the '.' at `dot`.
std::string token_before_dot(const std::string& s, size_t dot) {
  size_t begin = dot;
  while (begin > 0) {
    char c = s[begin - 1];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '.')
      --begin;
    else
      break;
  }
  std::string tok = s.substr(begin, dot - begin);
  while (!tok.empty() && tok.front() == '.') tok.erase(tok.begin());
  return tok;
}

bool is_guarded_abbreviation(const std::string& tok) {
  if (tok.empty()) return false;
  // Single initial: "J."
  if (tok.size() == 1 && std::isalpha(static_cast<unsigned char>(tok[0]))) return true;
  // Dotted acronyms of single letters: "U.S", "U.S.A", "D.C".
  bool dotted = tok.find('.') != std::string::npos;
  if (dotted) {
    bool expect_letter = true;
    bool ok = true;
    for (char c : tok) {
      if (expect_letter) {
        if (!std::isalpha(static_cast<unsigned char>(c))) { ok = false; break; }
      } else if (c != '.') {
        ok = false;
        break;
      }
      expect_letter = !expect_letter;
    }
    if (ok) return true;
  }
  static const std::set<std::string> kGuard = {
      "Mr",  "Mrs",  "Ms",  "Dr",   "Prof", "Sen", "Rep",  "Gov", "Gen",
      "Col", "Sgt",  "Lt",  "Capt", "St",   "Jr",  "Sr",   "Mt",  "No",
      "Inc", "Ltd",  "Co",  "Corp", "Fig",  "Vol", "etc",  "vs",  "cf",
      "approx", "e.g", "i.e", "a.m", "p.m"};
  return kGuard.count(tok) > 0;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<Sentence> segment_text(const std::string& text) {
  std::vector<Sentence> out;
  auto emit = [&](const std::string& piece) {
    std::string t = trim(piece);
    if (t.empty()) return;
    Sentence s;
    s.index = static_cast<int>(out.size());
    s.text = std::move(t);
    out.push_back(std::move(s));
  };

  size_t start = 0;
  size_t i = 0;
  while (i < text.size()) {
    size_t width = 0;
    if (!is_terminal_at(text, i, &width)) {
      ++i;
      continue;
    }
    bool plain_period = text[i] == '.' && width == 1;
    size_t end = i + width;
    // Run of terminal punctuation ("?!", "...").
    bool multi_terminal = false;
    while (end < text.size() && is_terminal_at(text, end, &width)) {
      end += width;
      multi_terminal = true;
    }
    // Trailing closing quotes / brackets belong to the finished sentence.
    while (end < text.size() && is_closer_at(text, end, &width)) end += width;

    bool guarded = plain_period && !multi_terminal &&
                   is_guarded_abbreviation(token_before_dot(text, i));

    size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    bool had_space = next > end;
    bool boundary = !guarded &&
                    (next >= text.size() ||
                     (had_space && starts_sentence_at(text, next)));
    if (boundary) {
      emit(text.substr(start, end - start));
      start = next;
      i = next;
    } else {
      i = end;
    }
  }
  if (start < text.size()) emit(text.substr(start));
  return out;
}

}  // namespace whow
