#include "core/models/models_impl.hpp"

namespace dpi {

std::unique_ptr<PackageModel> make_model(const std::string& name) {
    if (name == "jdbc") return make_jdbc_model();
    if (name == "arraylist") return make_arraylist_model();
    if (name == "hashset") return make_hashset_model();
    throw InputError("unknown model '" + name + "'");
}

std::vector<std::string> model_names() { return {"jdbc", "arraylist", "hashset"}; }

}  // namespace dpi
