#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dyndr {

struct ParamTensor {
	std::string name;
	std::size_t rows = 0;
	std::size_t cols = 0;
	std::size_t offset = 0;

	std::size_t size() const { return rows * cols; }
	bool operator==(const ParamTensor &) const = default;
};

// Named row-major tensors packed into one flat vector, so the optimizer,
// gradient checks and serialization all work on a single buffer.
class ParamStore {
public:
	std::size_t add(std::string name, std::size_t rows, std::size_t cols);

	std::span<double> get(std::size_t id) { return {values_.data() + tensors_[id].offset, tensors_[id].size()}; }
	std::span<const double> get(std::size_t id) const {
		return {values_.data() + tensors_[id].offset, tensors_[id].size()};
	}
	// View of the same tensor inside a gradient buffer laid out like values().
	std::span<double> in(std::span<double> buffer, std::size_t id) const {
		return buffer.subspan(tensors_[id].offset, tensors_[id].size());
	}

	const ParamTensor &tensor(std::size_t id) const { return tensors_[id]; }
	const std::vector<ParamTensor> &tensors() const { return tensors_; }
	const ParamTensor *find(std::string_view name) const;

	std::vector<double> &values() { return values_; }
	const std::vector<double> &values() const { return values_; }
	std::size_t size() const { return values_.size(); }

	bool operator==(const ParamStore &) const = default;

private:
	std::vector<ParamTensor> tensors_;
	std::vector<double> values_;
};

} // namespace dyndr
