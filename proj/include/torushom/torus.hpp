#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace torushom {

using Vertex = std::uint32_t;

/// Edge uv with u in the even class and v in the odd class.
struct Edge {
  Vertex u;
  Vertex v;
  auto operator<=>(const Edge&) const = default;
};

/// The even discrete torus Z_m^d. Vertices are mixed-radix indices with
/// coordinate 1 most significant, so coordinate d varies fastest.
class TorusGraph {
 public:
  /// Throws Error(Config) for odd m, m < 2, d < 1 or more than 2^30 vertices.
  TorusGraph(int m, int d);

  /// Parses "m=<m>,d=<d>".
  static TorusGraph parse(std::string_view descriptor);

  int side() const { return m_; }
  int dim() const { return d_; }
  std::size_t num_vertices() const { return n_; }
  /// 2d for m >= 4, d for m = 2.
  int degree() const { return degree_; }
  std::size_t num_edges() const { return n_ * static_cast<std::size_t>(degree_) / 2; }

  /// Coordinate-major, minus step before plus step; m = 2 yields one neighbor per axis.
  std::span<const Vertex> neighbors(Vertex x) const {
    return {neighbor_table_.data() + static_cast<std::size_t>(x) * degree_, static_cast<std::size_t>(degree_)};
  }
  /// Bounds-checked neighbors; throws Error(OutOfRange).
  std::span<const Vertex> neighbors_checked(Vertex x) const;

  Vertex encode(std::span<const int> coords) const;
  std::vector<int> decode(Vertex x) const;
  /// Coordinate along axis in [0, d) (axis 0 is coordinate 1).
  int coordinate(Vertex x, int axis) const { return static_cast<int>((x / stride_[axis]) % m_); }
  /// x + delta * e_axis (mod m).
  Vertex step(Vertex x, int axis, int delta) const;
  Vertex antipode(Vertex x) const;
  /// Shift by +1 along the first axis; exchanges the even and odd classes.
  Vertex parity_swap(Vertex x) const { return step(x, 0, 1); }

  bool is_even(Vertex x) const { return parity_[x] == 0; }
  bool adjacent(Vertex x, Vertex y) const;
  int distance(Vertex x, Vertex y) const;

  /// All edges, oriented even -> odd, sorted.
  std::vector<Edge> edges() const;

  std::string descriptor() const;
  std::string format_vertex(Vertex x) const;
  /// Parses "x1,x2,...,xd".
  Vertex parse_vertex(std::string_view text) const;

 private:
  int m_;
  int d_;
  std::size_t n_;
  int degree_;
  std::vector<std::size_t> stride_;
  std::vector<Vertex> neighbor_table_;
  std::vector<std::uint8_t> parity_;
};

struct SideSets {
  std::vector<Vertex> even;
  std::vector<Vertex> odd;
};

SideSets side_sets(const TorusGraph& t);

/// C(v) = (v + i e_d)_{i < m} for a base v with x_d = 0 in the even class.
struct Column {
  Vertex base;
  std::vector<Vertex> members;
};

std::vector<Column> columns(const TorusGraph& t);

struct ColumnSideSets {
  /// M_u = N_u minus the two column neighbors of u, one entry per column member.
  std::vector<std::vector<Vertex>> per_member;
  /// M_C(v), sorted, deduplicated.
  std::vector<Vertex> united;
};

ColumnSideSets column_side_sets(const TorusGraph& t, const Column& c);

/// True iff M_C(v) induces 2d-2 disjoint m-cycles (m >= 4) or d-1 disjoint edges (m = 2).
bool column_side_structure_holds(const TorusGraph& t, const Column& c);

/// Edges with exactly one endpoint in x_set.
std::size_t edge_boundary(const TorusGraph& t, std::span<const Vertex> x_set);

struct ComponentInfo {
  std::size_t largest = 0;
  std::size_t count = 0;
  std::vector<std::uint32_t> component_of;
};

/// Connected components of (V, E minus deleted).
ComponentInfo giant_component_after_deletion(const TorusGraph& t, std::span<const Edge> deleted);

}  // namespace torushom
