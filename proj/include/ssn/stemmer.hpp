#pragma once

#include <string>
#include <string_view>

namespace ssn {

// Porter (1980) suffix stripper, matching the author's reference
// implementation rather than the paper text where the two differ:
// words of length <= 2 are returned unchanged, -bli maps to -ble
// (not -bl) in step 2, and -logi maps to -log.
// Input is expected to be lowercase a-z; anything else is returned as is.
std::string porter_stem(std::string_view word);

}  // namespace ssn
