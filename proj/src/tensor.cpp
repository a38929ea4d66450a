#include "koss/tensor.hpp"

#include <cmath>
#include <sstream>

namespace koss {

int64_t Tensor::checked_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t e : shape) {
    if (e < 0) throw std::invalid_argument("Tensor: negative extent");
    n *= e;
  }
  return n;
}

size_t Tensor::offset(std::initializer_list<int64_t> idx) const {
  if (idx.size() != shape_.size())
    throw std::invalid_argument("Tensor::at: rank mismatch");
  int64_t off = 0;
  size_t i = 0;
  for (int64_t v : idx) {
    if (v < 0 || v >= shape_[i]) throw std::out_of_range("Tensor::at: index out of range");
    off = off * shape_[i] + v;
    ++i;
  }
  return static_cast<size_t>(off);
}

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::require_finite(const std::string& what) const {
  for (size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i]))
      throw std::runtime_error(what + ": non-finite value at flat index " + std::to_string(i));
  }
}

std::string shape_to_string(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

}  // namespace koss
