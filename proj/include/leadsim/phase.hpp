#pragma once

#include <stdexcept>

namespace leadsim {

/// Robot behavior phase. Milling runs before the fish is released; after
/// that the controller alternates between Approach and Lead.
enum class Phase { Milling, Approach, Lead };

inline char phase_char(Phase p) {
    switch (p) {
        case Phase::Milling: return 'M';
        case Phase::Approach: return 'A';
        case Phase::Lead: return 'L';
    }
    return '?';
}

inline Phase phase_from_char(char c) {
    switch (c) {
        case 'M': return Phase::Milling;
        case 'A': return Phase::Approach;
        case 'L': return Phase::Lead;
        default: throw std::invalid_argument(std::string("unknown phase code '") + c + "'");
    }
}

}  // namespace leadsim
