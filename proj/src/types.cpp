#include "smilewing/types.hpp"

#include "smilewing/errors.hpp"

namespace smilewing {

std::string_view to_string(Side side) { return side == Side::right ? "right" : "left"; }

Side parse_side(std::string_view text) {
    if (text == "right") return Side::right;
    if (text == "left") return Side::left;
    throw ConfigError("unknown side '" + std::string(text) + "' (expected right|left)");
}

}  // namespace smilewing
