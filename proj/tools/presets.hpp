#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hawkes_ls/finance.hpp"
#include "hawkes_ls/model.hpp"

namespace hawkes_ls::cli {

/// Built-in model. `stated` lists the parameters fixed by the experiment being
/// reproduced; `artifact_choices` the ones this tool had to pick.
struct Preset {
  std::string name;
  std::string description;
  ModelSpec spec;
  std::size_t replications = 500;
  std::optional<PriceModelParams> price;
  std::vector<std::string> stated;
  std::vector<std::string> artifact_choices;
};

const std::vector<Preset>& presets();

/// Throws DomainError for unknown names.
const Preset& find_preset(const std::string& name);

}  // namespace hawkes_ls::cli
