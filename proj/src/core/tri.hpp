#pragma once

#include <string>

#include "core/errors.hpp"

namespace dpi {

// Three-valued predicate state used by exception isolation. Star stands for
// "either value".
enum class Tri { F, T, Star };

inline Tri tri_of(bool b) { return b ? Tri::T : Tri::F; }

inline Tri join(Tri a, Tri b) { return a == b ? a : Tri::Star; }

// Star matches anything; T and F match only themselves.
inline bool wildcard_matches(Tri pattern, bool value) {
    return pattern == Tri::Star || pattern == tri_of(value);
}

inline std::string to_string(Tri t) {
    switch (t) {
        case Tri::F: return "F";
        case Tri::T: return "T";
        case Tri::Star: return "*";
    }
    throw InternalError("unhandled tri value");
}

inline Tri tri_from_string(const std::string& s) {
    if (s == "F") return Tri::F;
    if (s == "T") return Tri::T;
    if (s == "*") return Tri::Star;
    throw InputError("not a three-valued literal: " + s);
}

}  // namespace dpi
