#include "tvdiar/speech.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace tvdiar {

namespace {

std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    return s;
}

bool is_blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

bool is_integer(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

double parse_timestamp(const std::string& s, int line_no) {
    int h = 0, m = 0, sec = 0, ms = 0;
    char sep = 0;
    std::istringstream in(s);
    char c1 = 0, c2 = 0;
    if (!(in >> h >> c1 >> m >> c2 >> sec) || c1 != ':' || c2 != ':')
        throw ParseError("bad timestamp '" + s + "'", line_no);
    if (in >> sep) {
        if (sep != ',' && sep != '.') throw ParseError("bad timestamp '" + s + "'", line_no);
        std::string frac;
        in >> frac;
        if (!is_integer(frac) || frac.size() > 3)
            throw ParseError("bad timestamp '" + s + "'", line_no);
        ms = std::stoi(frac);
        for (std::size_t i = frac.size(); i < 3; ++i) ms *= 10;
    }
    if (m > 59 || sec > 59 || h < 0 || m < 0 || sec < 0)
        throw ParseError("bad timestamp '" + s + "'", line_no);
    return h * 3600.0 + m * 60.0 + sec + ms / 1000.0;
}

bool is_dash_line(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return i < s.size() && s[i] == '-';
}

}  // namespace

std::vector<SpeechSegment> parse_subtitles(const std::string& srt_text) {
    std::vector<std::string> lines;
    {
        std::istringstream in(srt_text);
        std::string line;
        while (std::getline(in, line)) lines.push_back(rstrip(line));
    }

    std::vector<SpeechSegment> out;
    std::size_t i = 0;
    int cue_count = 0;
    while (i < lines.size()) {
        if (is_blank(lines[i])) {
            ++i;
            continue;
        }
        std::string cue_id;
        if (is_integer(lines[i])) {
            cue_id = lines[i];
            ++i;
            if (i >= lines.size()) throw ParseError("cue without timing line", static_cast<int>(i));
        }
        const int ts_line = static_cast<int>(i) + 1;
        const std::string& timing = lines[i];
        const auto arrow = timing.find("-->");
        if (arrow == std::string::npos) throw ParseError("missing '-->' in cue timing", ts_line);
        double start = parse_timestamp(timing.substr(0, arrow), ts_line);
        const double end = parse_timestamp(timing.substr(arrow + 3), ts_line);
        if (end <= start) throw ParseError("cue ends before it starts", ts_line);
        ++i;

        std::vector<std::string> text;
        while (i < lines.size() && !is_blank(lines[i])) text.push_back(lines[i++]);
        if (text.empty()) throw ParseError("cue without text", ts_line);

        // overlapping cues are clipped to the previous segment's end
        if (!out.empty() && start < out.back().end) {
            std::fprintf(stderr, "warning: cue at line %d overlaps the previous one, clipping\n",
                         ts_line);
            start = out.back().end;
            if (start >= end) {
                std::fprintf(stderr, "warning: cue at line %d fully overlapped, dropped\n",
                             ts_line);
                continue;
            }
        }

        ++cue_count;
        if (cue_id.empty()) cue_id = "utt" + std::to_string(cue_count);

        // group lines into parts, one per leading dash
        std::vector<std::vector<std::string>> parts;
        for (const auto& ln : text) {
            if (is_dash_line(ln) || parts.empty()) parts.push_back({});
            parts.back().push_back(ln);
        }
        const bool split = parts.size() > 1 && is_dash_line(text.front());

        if (!split) {
            SpeechSegment seg;
            seg.id = cue_id;
            seg.start = start;
            seg.end = end;
            for (std::size_t k = 0; k < text.size(); ++k)
                seg.text += (k ? " " : "") + text[k];
            out.push_back(std::move(seg));
        } else {
            std::vector<std::size_t> chars(parts.size(), 0);
            std::size_t total = 0;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                for (const auto& ln : parts[p]) chars[p] += ln.size();
                total += chars[p];
            }
            double t = start;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                SpeechSegment seg;
                seg.id = cue_id + "." + std::to_string(p + 1);
                seg.start = t;
                seg.end = (p + 1 == parts.size())
                              ? end
                              : t + (end - start) * (static_cast<double>(chars[p]) / total);
                t = seg.end;
                for (std::size_t k = 0; k < parts[p].size(); ++k)
                    seg.text += (k ? " " : "") + parts[p][k];
                out.push_back(std::move(seg));
            }
        }
    }
    return out;
}

void validate_segments(const std::vector<SpeechSegment>& segments) {
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (segments[k].duration() <= 0.0)
            throw std::invalid_argument("segment '" + segments[k].id + "' has non-positive duration");
        if (k > 0 && segments[k].start < segments[k - 1].start)
            throw std::invalid_argument("segments not in ascending start order at '" +
                                        segments[k].id + "'");
    }
}

}  // namespace tvdiar
