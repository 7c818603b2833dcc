#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/heap.hpp"

namespace dpi {

// Registered reference models: "jdbc", "arraylist", "hashset".
// Throws InputError for unknown names.
std::unique_ptr<PackageModel> make_model(const std::string& name);

std::vector<std::string> model_names();

}  // namespace dpi
