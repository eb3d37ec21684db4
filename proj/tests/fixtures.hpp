#pragma once

#include <string>

namespace fixture {

// PHL, January 1960, TMAX. Constructed in the archive layout for offset
// checking; values are illustrative.
inline const std::string kPhlJanuaryTmax =
    "USW00013739" "1960" "01" "TMAX"
    "   39  0" "   56  0" "   28  0" "   -6  0" "  -33  0" "   11  0" "   50  0"
    "   83  0" "  117  0" "   61  0" "   22  0" "    0  0" "  -11  0" "   17  0"
    "   44  0" "   72  0" "  100  0" "  128  0" "   89 I0" "   33  0" "  -22  0"
    "  -50  0" "  -28  0" "    6  0" "   39  0" "   67  0" "   94  0" "-9999   "
    "  139T 0" "   78  0" "   44  0";

}  // namespace fixture
