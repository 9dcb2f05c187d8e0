#ifndef TNC_TENSOR_HPP
#define TNC_TENSOR_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "tnc/ids.hpp"

namespace tnc {

using Scalar = std::complex<double>;

/// Dense complex tensor with labelled axes, stored row-major in axis order.
/// The (axes, extents) pair is the dope vector describing the layout.
class DenseTensor {
public:
    DenseTensor() : data_(1, Scalar{0.0, 0.0}) {}

    /// Rank-0 tensor holding one value.
    static DenseTensor scalar(Scalar value);

    /// Throws std::invalid_argument when labels repeat or the data length is
    /// not the product of the extents.
    DenseTensor(std::vector<EdgeId> axes, std::vector<std::uint64_t> extents, std::vector<Scalar> data);

    /// Zero-filled tensor of the given shape.
    static DenseTensor zeros(std::vector<EdgeId> axes, std::vector<std::uint64_t> extents);

    std::span<const EdgeId> axes() const noexcept { return axes_; }
    std::span<const std::uint64_t> extents() const noexcept { return extents_; }
    std::span<const Scalar> data() const noexcept { return data_; }
    std::span<Scalar> mutable_data() noexcept { return data_; }
    std::size_t rank() const noexcept { return axes_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    /// Position of an axis label, or rank() when absent.
    std::size_t axis_position(EdgeId label) const noexcept;
    bool has_axis(EdgeId label) const noexcept { return axis_position(label) != rank(); }

    Scalar at(std::span<const std::uint64_t> index) const;

    /// Copy with axes reordered; order[k] is the source position of output axis k.
    DenseTensor permuted(std::span<const std::size_t> order) const;

    /// Copy with axes sorted by ascending label.
    DenseTensor canonical() const;

    /// Sub-tensor with the given axis fixed to one index (axis removed).
    DenseTensor sliced(EdgeId label, std::uint64_t index) const;

private:
    std::vector<EdgeId> axes_;
    std::vector<std::uint64_t> extents_;
    std::vector<Scalar> data_;
};

/// Product of extents, checked against size_t overflow.
std::size_t element_count(std::span<const std::uint64_t> extents);

}  // namespace tnc

#endif
