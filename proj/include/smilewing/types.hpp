#pragma once

#include <string>
#include <string_view>

namespace smilewing {

/// Which wing of the smile: right means log-strikes k -> +inf (calls),
/// left means log-strikes -k with k -> +inf (puts).
enum class Side { right, left };

enum class OptionType { call, put };

std::string_view to_string(Side side);
Side parse_side(std::string_view text);

}  // namespace smilewing
