#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kcq {

/// Library version followed by the versions of the numerical dependencies
/// it was built against, as (name, version) pairs.
std::vector<std::pair<std::string, std::string>> build_versions();

}  // namespace kcq
