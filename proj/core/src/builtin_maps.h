#pragma once

#include <string>
#include <vector>

namespace uavsim::detail {

struct BuiltinMap {
    std::string name;
    double cell_size_m;
    std::vector<std::string> rows;
};

const std::vector<BuiltinMap>& builtin_maps();

}  // namespace uavsim::detail
