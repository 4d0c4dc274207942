#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tvdiar {

struct SpeechSegment {
    std::string id;
    double start = 0.0;
    double end = 0.0;
    std::string reference_speaker;  // empty when unknown
    std::string text;

    double duration() const { return end - start; }
    double midpoint() const { return 0.5 * (start + end); }
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& what, int line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// Parses SubRip text into speech segments. Cue ids become segment ids
// ("utt<index>" when the cue index is missing). A cue whose lines start with
// a dash is split into one segment per dash line, the cue time span divided
// proportionally to the character counts of the lines. Throws ParseError on
// malformed timestamps or cue structure.
std::vector<SpeechSegment> parse_subtitles(const std::string& srt_text);

// Validates ordering and positive durations; throws std::invalid_argument.
void validate_segments(const std::vector<SpeechSegment>& segments);

}  // namespace tvdiar
