#pragma once

#include <string>
#include <vector>

#include "whow/corpus.hpp"

namespace whow {

// Deterministic rule-based sentence splitter. Boundaries occur after
// sentence-final punctuation (. ? ! …) optionally followed by closing
// quotes/brackets, when the next non-space character starts a new sentence
// (capital letter, digit, or opening quote). An abbreviation guard list
// (Dr., Mr., U.S., e.g., single initials, ...) suppresses false boundaries.
// If no boundary is found the whole text is returned as one sentence.
// Character content is conserved: stripping whitespace from the joined
// output equals stripping whitespace from the input.
std::vector<Sentence> segment_text(const std::string& text);

}  // namespace whow
