#include "helpers.hpp"

#include <map>
#include <memory>

namespace testing {

const painv::SolvedPreset& solved(const std::string& name) {
  static std::map<std::string, std::unique_ptr<painv::SolvedPreset>> cache;
  auto& slot = cache[name];
  if (!slot) slot = std::make_unique<painv::SolvedPreset>(painv::solve_preset(painv::load_preset(name)));
  return *slot;
}

}  // namespace testing
