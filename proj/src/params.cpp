#include "dyndr/params.hpp"

namespace dyndr {

std::size_t ParamStore::add(std::string name, std::size_t rows, std::size_t cols) {
	tensors_.push_back({std::move(name), rows, cols, values_.size()});
	values_.resize(values_.size() + rows * cols, 0.0);
	return tensors_.size() - 1;
}

const ParamTensor *ParamStore::find(std::string_view name) const {
	for (const auto &t : tensors_) {
		if (t.name == name) {
			return &t;
		}
	}
	return nullptr;
}

} // namespace dyndr
