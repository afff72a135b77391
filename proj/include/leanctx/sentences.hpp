#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace leanctx {

struct SegmenterOptions {
    // Abbreviations that suppress a sentence break at a following period.
    std::vector<std::string> abbreviations = {
        "Dr", "Mr", "Mrs", "Ms", "Prof", "Fig", "et al", "e.g", "i.e", "vs",
    };
};

// Splits text into sentences. A boundary is a '.', '!' or '?' followed by
// whitespace and then an uppercase letter or digit; a '.' directly after an
// abbreviation never ends a sentence. Sentences come back trimmed, so joining
// them with single spaces reconstructs the text modulo whitespace.
std::vector<std::string> segment_sentences(std::string_view text,
                                           const SegmenterOptions& options = {});

} // namespace leanctx
