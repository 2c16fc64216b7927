#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace dyndr {

// Row-major dense matrix of doubles.
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	bool empty() const { return data_.empty(); }

	double &operator()(std::size_t r, std::size_t c) {
		assert(r < rows_ && c < cols_);
		return data_[r * cols_ + c];
	}
	double operator()(std::size_t r, std::size_t c) const {
		assert(r < rows_ && c < cols_);
		return data_[r * cols_ + c];
	}

	std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
	std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

	std::span<double> flat() { return data_; }
	std::span<const double> flat() const { return data_; }

	void append_row(std::span<const double> values) {
		assert(values.size() == cols_ || rows_ == 0);
		if (rows_ == 0) {
			cols_ = values.size();
		}
		data_.insert(data_.end(), values.begin(), values.end());
		++rows_;
	}

	bool operator==(const Matrix &) const = default;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

} // namespace dyndr
