#include <doctest.h>

#include "leanctx/sentences.hpp"

using leanctx::segment_sentences;

TEST_CASE("two plain sentences") {
    const auto got = segment_sentences("A cat sat. A dog ran.");
    REQUIRE(got.size() == 2);
    CHECK(got[0] == "A cat sat.");
    CHECK(got[1] == "A dog ran.");
}

TEST_CASE("abbreviations do not end sentences") {
    CHECK(segment_sentences("Dr. Smith went home.").size() == 1);
    CHECK(segment_sentences("Mr. Jones met Mrs. Lee.").size() == 1);
    CHECK(segment_sentences("See Fig. 4 for details.").size() == 1);
    CHECK(segment_sentences("Values rise, e.g. Tuesday was higher.").size() == 1);
}

TEST_CASE("empty and blank text give no sentences") {
    CHECK(segment_sentences("").empty());
    CHECK(segment_sentences("   \n\t ").empty());
}

TEST_CASE("text without terminators is one sentence") {
    const auto got = segment_sentences("  no terminator here  ");
    REQUIRE(got.size() == 1);
    CHECK(got[0] == "no terminator here");
}

TEST_CASE("boundary requires uppercase or digit after whitespace") {
    CHECK(segment_sentences("He ran. and fell over.").size() == 1);
    REQUIRE(segment_sentences("He ran. 4 dogs followed.").size() == 2);
}

TEST_CASE("mixed-terminator paragraph matches the hand-labeled reference") {
    const std::string text =
        "The survey opened in March. Participants arrived early! Did anyone "
        "complain? Not once. Dr. Alvarez led the briefing. The room held 40 "
        "seats. Was that enough? Barely! Staff added chairs by noon. Results "
        "came in fast. 90 percent finished on time. The rest needed help! Who "
        "helped them? Volunteers did. Prof. Singh reviewed the data. Errors "
        "were rare, e.g. two forms lacked dates. Auditors checked everything "
        "twice! Final tallies shipped Friday. Reports follow next week? Yes, "
        "they do.";
    const std::vector<std::string> expected = {
        "The survey opened in March.",
        "Participants arrived early!",
        "Did anyone complain?",
        "Not once.",
        "Dr. Alvarez led the briefing.",
        "The room held 40 seats.",
        "Was that enough?",
        "Barely!",
        "Staff added chairs by noon.",
        "Results came in fast.",
        "90 percent finished on time.",
        "The rest needed help!",
        "Who helped them?",
        "Volunteers did.",
        "Prof. Singh reviewed the data.",
        "Errors were rare, e.g. two forms lacked dates.",
        "Auditors checked everything twice!",
        "Final tallies shipped Friday.",
        "Reports follow next week?",
        "Yes, they do.",
    };
    const auto got = segment_sentences(text);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(got[i] == expected[i]);
    }
}

TEST_CASE("joining sentences reconstructs the text modulo whitespace") {
    const std::string text = "One thing.  Two things!\n\nThree things? Four.";
    const auto got = segment_sentences(text);
    std::string joined;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (i > 0) {
            joined += ' ';
        }
        joined += got[i];
    }
    CHECK(joined == "One thing. Two things! Three things? Four.");
}
