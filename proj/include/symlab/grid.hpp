// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace symlab {

struct GridAxis {
  int cells = 4;
  double length = 2.0 * std::numbers::pi;
  bool periodic = true;
  /// Closed interval sampled at cell centres, with mirror (zero-flux) ends.
  bool cell_centered = false;

  /// A periodic or cell-centred axis has `cells` nodes; a closed interval has `cells + 1`.
  int nodes() const { return (periodic || cell_centered) ? cells : cells + 1; }
  double spacing() const { return length / cells; }
  double coordinate(int i) const { return cell_centered ? (i + 0.5) * spacing() : i * spacing(); }
};

/// Tensor-product grid with periodic and/or closed-interval axes.
///
/// Optionally the boundary of a group of closed axes is collapsed: all nodes whose
/// collapsed-axis indices lie on the boundary of that box and whose remaining indices agree
/// share one degree of freedom. This models a square whose boundary is identified to a point.
class UniformGrid {
 public:
  UniformGrid() = default;
  explicit UniformGrid(std::vector<GridAxis> axes, std::vector<std::size_t> collapsed_axes = {})
      : axes_(std::move(axes)), collapsed_(std::move(collapsed_axes)) {
    if (axes_.empty()) throw std::invalid_argument("UniformGrid: need at least one axis");
    for (const auto& a : axes_) {
      if (a.periodic && a.cell_centered) throw std::invalid_argument("UniformGrid: a periodic axis cannot be cell-centred");
      if (a.cells < 4) throw std::invalid_argument("UniformGrid: resolution must be >= 4 per axis");
      if (!(a.length > 0.0)) throw std::invalid_argument("UniformGrid: axis length must be positive");
    }
    for (auto c : collapsed_) {
      if (c >= axes_.size() || axes_[c].periodic || axes_[c].cell_centered)
        throw std::invalid_argument("UniformGrid: only closed axes can be collapsed");
    }
    strides_.resize(axes_.size());
    std::size_t s = 1;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      strides_[i] = s;
      s *= static_cast<std::size_t>(axes_[i].nodes());
    }
    node_count_ = s;
    build_dofs();
  }

  /// Periodic cube [0,2π)^dim with n cells per axis.
  static UniformGrid torus(std::size_t dim, int n) {
    return UniformGrid(std::vector<GridAxis>(dim, GridAxis{n, 2.0 * std::numbers::pi, true}));
  }

  std::size_t dim() const { return axes_.size(); }
  const std::vector<GridAxis>& axes() const { return axes_; }
  const GridAxis& axis(std::size_t i) const { return axes_.at(i); }
  std::size_t node_count() const { return node_count_; }
  std::size_t dof_count() const { return dof_count_; }
  std::size_t dof(std::size_t node) const { return dof_of_node_[node]; }
  bool all_periodic() const {
    for (const auto& a : axes_)
      if (!a.periodic) return false;
    return true;
  }

  std::vector<int> multi_index(std::size_t node) const {
    std::vector<int> idx(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      idx[i] = static_cast<int>(node % static_cast<std::size_t>(axes_[i].nodes()));
      node /= static_cast<std::size_t>(axes_[i].nodes());
    }
    return idx;
  }

  std::size_t node_index(const std::vector<int>& idx) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) n += strides_[i] * static_cast<std::size_t>(idx[i]);
    return n;
  }

  /// Neighbour along `axis` by `step` = ±1; returns false past the end of a closed axis.
  /// Past the end of a cell-centred axis the node is its own mirror image.
  bool neighbour(std::size_t node, std::size_t axis, int step, std::size_t& out) const {
    const auto& a = axes_[axis];
    const int n = a.nodes();
    const int i = static_cast<int>((node / strides_[axis]) % static_cast<std::size_t>(n));
    int j = i + step;
    if (a.periodic) {
      j = (j % n + n) % n;
    } else if (a.cell_centered && (j < 0 || j >= n)) {
      out = node;
      return true;
    } else if (j < 0 || j >= n) {
      return false;
    }
    out = node + strides_[axis] * static_cast<std::size_t>(j) - strides_[axis] * static_cast<std::size_t>(i);
    return true;
  }

  std::vector<double> coordinates(std::size_t node) const {
    const auto idx = multi_index(node);
    std::vector<double> x(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) x[i] = axes_[i].coordinate(idx[i]);
    return x;
  }

  /// Quadrature weight of a node: h per periodic axis, trapezoid weights on closed axes.
  double node_weight(std::size_t node) const {
    const auto idx = multi_index(node);
    double w = 1.0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      const auto& a = axes_[i];
      double wi = a.spacing();
      if (!a.periodic && !a.cell_centered && (idx[i] == 0 || idx[i] == a.cells)) wi *= 0.5;
      w *= wi;
    }
    return w;
  }

  double cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes_) v *= a.spacing();
    return v;
  }

  std::string describe() const {
    std::string s;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(axes_[i].cells);
    }
    return s;
  }

 private:
  void build_dofs() {
    dof_of_node_.assign(node_count_, 0);
    if (collapsed_.empty()) {
      for (std::size_t n = 0; n < node_count_; ++n) dof_of_node_[n] = n;
      dof_count_ = node_count_;
      return;
    }
    // Boundary nodes of the collapsed box are keyed by their remaining indices.
    std::vector<bool> is_collapsed(axes_.size(), false);
    for (auto c : collapsed_) is_collapsed[c] = true;
    std::vector<std::size_t> boundary_key_dof;
    std::vector<bool> key_seen;
    std::size_t key_space = 1;
    for (std::size_t i = 0; i < axes_.size(); ++i)
      if (!is_collapsed[i]) key_space *= static_cast<std::size_t>(axes_[i].nodes());
    boundary_key_dof.assign(key_space, 0);
    key_seen.assign(key_space, false);
    std::size_t next = 0;
    for (std::size_t n = 0; n < node_count_; ++n) {
      const auto idx = multi_index(n);
      bool on_boundary = false;
      std::size_t key = 0, stride = 1;
      for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (is_collapsed[i]) {
          if (idx[i] == 0 || idx[i] == axes_[i].cells) on_boundary = true;
        } else {
          key += stride * static_cast<std::size_t>(idx[i]);
          stride *= static_cast<std::size_t>(axes_[i].nodes());
        }
      }
      if (!on_boundary) {
        dof_of_node_[n] = next++;
      } else {
        if (!key_seen[key]) {
          key_seen[key] = true;
          boundary_key_dof[key] = next++;
        }
        dof_of_node_[n] = boundary_key_dof[key];
      }
    }
    dof_count_ = next;
  }

  std::vector<GridAxis> axes_;
  std::vector<std::size_t> collapsed_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
  std::vector<std::size_t> dof_of_node_;
  std::size_t dof_count_ = 0;
};

}  // namespace symlab
