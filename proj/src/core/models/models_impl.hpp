#pragma once

#include "core/models.hpp"

namespace dpi {

std::unique_ptr<PackageModel> make_jdbc_model();
std::unique_ptr<PackageModel> make_arraylist_model();
std::unique_ptr<PackageModel> make_hashset_model();

}  // namespace dpi
