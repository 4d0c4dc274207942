#pragma once

#include <string>
#include <unordered_map>

namespace tvdiar {

// speaker labels over a set of speech segments
struct Diarization {
    std::string system;  // which labeler produced it
    std::unordered_map<std::string, std::string> label_of;  // segment id -> label

    bool covers(const std::string& segment_id) const { return label_of.count(segment_id) > 0; }
};

}  // namespace tvdiar
