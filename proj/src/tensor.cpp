#include "tnc/tensor.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tnc {

std::size_t element_count(std::span<const std::uint64_t> extents) {
    std::size_t n = 1;
    for (auto e : extents) {
        if (e == 0) throw std::invalid_argument("tensor extent must be >= 1");
        if (n > std::numeric_limits<std::size_t>::max() / e)
            throw std::length_error("tensor too large");
        n *= static_cast<std::size_t>(e);
    }
    return n;
}

DenseTensor DenseTensor::scalar(Scalar value) {
    DenseTensor t;
    t.data_[0] = value;
    return t;
}

DenseTensor::DenseTensor(std::vector<EdgeId> axes, std::vector<std::uint64_t> extents, std::vector<Scalar> data)
    : axes_(std::move(axes)), extents_(std::move(extents)), data_(std::move(data)) {
    if (axes_.size() != extents_.size())
        throw std::invalid_argument("tensor axes and extents differ in length");
    auto sorted = axes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("tensor axis labels must be distinct");
    if (data_.size() != element_count(extents_))
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                    " does not match shape (" + std::to_string(element_count(extents_)) + ")");
}

DenseTensor DenseTensor::zeros(std::vector<EdgeId> axes, std::vector<std::uint64_t> extents) {
    const auto n = element_count(extents);
    return DenseTensor(std::move(axes), std::move(extents), std::vector<Scalar>(n));
}

std::size_t DenseTensor::axis_position(EdgeId label) const noexcept {
    return static_cast<std::size_t>(std::find(axes_.begin(), axes_.end(), label) - axes_.begin());
}

Scalar DenseTensor::at(std::span<const std::uint64_t> index) const {
    if (index.size() != rank()) throw std::invalid_argument("index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < rank(); ++k) {
        if (index[k] >= extents_[k]) throw std::out_of_range("tensor index out of range");
        flat = flat * extents_[k] + index[k];
    }
    return data_[flat];
}

DenseTensor DenseTensor::permuted(std::span<const std::size_t> order) const {
    const std::size_t r = rank();
    if (order.size() != r) throw std::invalid_argument("permutation rank mismatch");
    std::vector<bool> seen(r, false);
    for (auto o : order) {
        if (o >= r || seen[o]) throw std::invalid_argument("not a permutation");
        seen[o] = true;
    }
    std::vector<EdgeId> axes(r);
    std::vector<std::uint64_t> ext(r);
    for (std::size_t k = 0; k < r; ++k) {
        axes[k] = axes_[order[k]];
        ext[k] = extents_[order[k]];
    }
    bool identity = true;
    for (std::size_t k = 0; k < r; ++k) identity = identity && order[k] == k;
    if (identity) return *this;

    // source strides, then walk the output in row-major order
    std::vector<std::size_t> src_stride(r, 1);
    for (std::size_t k = r; k-- > 1;) src_stride[k - 1] = src_stride[k] * extents_[k];
    std::vector<std::size_t> stride(r);
    for (std::size_t k = 0; k < r; ++k) stride[k] = src_stride[order[k]];

    std::vector<Scalar> out(data_.size());
    std::vector<std::uint64_t> idx(r, 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out[flat] = data_[src];
        for (std::size_t k = r; k-- > 0;) {
            if (++idx[k] < ext[k]) {
                src += stride[k];
                break;
            }
            src -= stride[k] * (ext[k] - 1);
            idx[k] = 0;
        }
    }
    return DenseTensor(std::move(axes), std::move(ext), std::move(out));
}

DenseTensor DenseTensor::canonical() const {
    std::vector<std::size_t> order(rank());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return axes_[a] < axes_[b]; });
    return permuted(order);
}

DenseTensor DenseTensor::sliced(EdgeId label, std::uint64_t index) const {
    const auto pos = axis_position(label);
    if (pos == rank()) throw std::invalid_argument("slice: tensor has no such axis");
    if (index >= extents_[pos]) throw std::out_of_range("slice index out of range");
    std::size_t outer = 1, inner = 1;
    for (std::size_t k = 0; k < pos; ++k) outer *= extents_[k];
    for (std::size_t k = pos + 1; k < rank(); ++k) inner *= extents_[k];
    const std::size_t ext = extents_[pos];
    std::vector<Scalar> out;
    out.reserve(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t base = (o * ext + index) * inner;
        out.insert(out.end(), data_.begin() + static_cast<std::ptrdiff_t>(base),
                   data_.begin() + static_cast<std::ptrdiff_t>(base + inner));
    }
    auto axes = axes_;
    auto extents = extents_;
    axes.erase(axes.begin() + static_cast<std::ptrdiff_t>(pos));
    extents.erase(extents.begin() + static_cast<std::ptrdiff_t>(pos));
    return DenseTensor(std::move(axes), std::move(extents), std::move(out));
}

}  // namespace tnc
