#include "torushom/torus.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "torushom/errors.hpp"

namespace torushom {

TorusGraph::TorusGraph(int m, int d) : m_(m), d_(d) {
  if (m < 2 || m % 2 != 0) throw Error(ErrorCode::Config, "torus side m must be even and >= 2, got " + std::to_string(m));
  if (d < 1) throw Error(ErrorCode::Config, "torus dimension d must be >= 1, got " + std::to_string(d));
  n_ = 1;
  for (int i = 0; i < d; ++i) {
    n_ *= static_cast<std::size_t>(m);
    if (n_ > (std::size_t{1} << 30)) throw Error(ErrorCode::Config, "torus " + descriptor() + " is too large");
  }
  degree_ = m == 2 ? d : 2 * d;

  stride_.assign(static_cast<std::size_t>(d), 1);
  for (int axis = d - 2; axis >= 0; --axis) stride_[axis] = stride_[axis + 1] * static_cast<std::size_t>(m);

  parity_.resize(n_);
  neighbor_table_.resize(n_ * static_cast<std::size_t>(degree_));
  for (std::size_t x = 0; x < n_; ++x) {
    int sum = 0;
    for (int axis = 0; axis < d; ++axis) sum += coordinate(Vertex(x), axis);
    parity_[x] = static_cast<std::uint8_t>(sum % 2);
    std::size_t slot = x * static_cast<std::size_t>(degree_);
    for (int axis = 0; axis < d; ++axis) {
      if (m == 2) {
        neighbor_table_[slot++] = step(Vertex(x), axis, 1);
      } else {
        neighbor_table_[slot++] = step(Vertex(x), axis, -1);
        neighbor_table_[slot++] = step(Vertex(x), axis, 1);
      }
    }
  }
}

TorusGraph TorusGraph::parse(std::string_view descriptor) {
  int m = -1, d = -1;
  std::size_t start = 0;
  while (start < descriptor.size()) {
    std::size_t comma = descriptor.find(',', start);
    if (comma == std::string_view::npos) comma = descriptor.size();
    std::string_view item = descriptor.substr(start, comma - start);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::Config, "bad torus descriptor '" + std::string(descriptor) + "'");
    std::string key(item.substr(0, eq));
    int value = 0;
    try {
      value = std::stoi(std::string(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, "bad torus descriptor '" + std::string(descriptor) + "'");
    }
    if (key == "m") m = value;
    else if (key == "d") d = value;
    else throw Error(ErrorCode::Config, "unknown torus key '" + key + "'");
    start = comma + 1;
  }
  if (m < 0 || d < 0) throw Error(ErrorCode::Config, "torus descriptor needs m and d: '" + std::string(descriptor) + "'");
  return TorusGraph(m, d);
}

std::span<const Vertex> TorusGraph::neighbors_checked(Vertex x) const {
  if (x >= n_) throw Error(ErrorCode::OutOfRange, "vertex " + std::to_string(x) + " outside " + descriptor());
  return neighbors(x);
}

Vertex TorusGraph::encode(std::span<const int> coords) const {
  if (coords.size() != static_cast<std::size_t>(d_))
    throw Error(ErrorCode::OutOfRange, "expected " + std::to_string(d_) + " coordinates");
  std::size_t x = 0;
  for (int c : coords) {
    if (c < 0 || c >= m_) throw Error(ErrorCode::OutOfRange, "coordinate " + std::to_string(c) + " outside 0.." + std::to_string(m_ - 1));
    x = x * static_cast<std::size_t>(m_) + static_cast<std::size_t>(c);
  }
  return Vertex(x);
}

std::vector<int> TorusGraph::decode(Vertex x) const {
  if (x >= n_) throw Error(ErrorCode::OutOfRange, "vertex " + std::to_string(x) + " outside " + descriptor());
  std::vector<int> out(static_cast<std::size_t>(d_));
  for (int axis = 0; axis < d_; ++axis) out[axis] = coordinate(x, axis);
  return out;
}

Vertex TorusGraph::step(Vertex x, int axis, int delta) const {
  const int c = coordinate(x, axis);
  const int shifted = ((c + delta) % m_ + m_) % m_;
  return Vertex(x + (static_cast<long long>(shifted) - c) * static_cast<long long>(stride_[axis]));
}

Vertex TorusGraph::antipode(Vertex x) const {
  Vertex y = x;
  for (int axis = 0; axis < d_; ++axis) y = step(y, axis, m_ / 2);
  return y;
}

bool TorusGraph::adjacent(Vertex x, Vertex y) const {
  for (Vertex z : neighbors(x))
    if (z == y) return true;
  return false;
}

int TorusGraph::distance(Vertex x, Vertex y) const {
  int total = 0;
  for (int axis = 0; axis < d_; ++axis) {
    const int diff = std::abs(coordinate(x, axis) - coordinate(y, axis));
    total += std::min(diff, m_ - diff);
  }
  return total;
}

std::vector<Edge> TorusGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t x = 0; x < n_; ++x) {
    if (!is_even(Vertex(x))) continue;
    for (Vertex y : neighbors(Vertex(x))) out.push_back({Vertex(x), y});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string TorusGraph::descriptor() const { return "m=" + std::to_string(m_) + ",d=" + std::to_string(d_); }

std::string TorusGraph::format_vertex(Vertex x) const {
  std::string out;
  for (int axis = 0; axis < d_; ++axis) {
    if (axis) out += ",";
    out += std::to_string(coordinate(x, axis));
  }
  return out;
}

Vertex TorusGraph::parse_vertex(std::string_view text) const {
  std::vector<int> coords;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    try {
      coords.push_back(std::stoi(std::string(text.substr(start, comma - start))));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, "bad vertex literal '" + std::string(text) + "'");
    }
    start = comma + 1;
  }
  return encode(coords);
}

SideSets side_sets(const TorusGraph& t) {
  SideSets out;
  for (std::size_t x = 0; x < t.num_vertices(); ++x) (t.is_even(Vertex(x)) ? out.even : out.odd).push_back(Vertex(x));
  return out;
}

std::vector<Column> columns(const TorusGraph& t) {
  std::vector<Column> out;
  const int last = t.dim() - 1;
  for (std::size_t x = 0; x < t.num_vertices(); ++x) {
    const Vertex v(x);
    if (t.coordinate(v, last) != 0 || !t.is_even(v)) continue;
    Column c{v, {}};
    for (int i = 0; i < t.side(); ++i) c.members.push_back(t.step(v, last, i));
    out.push_back(std::move(c));
  }
  return out;
}

ColumnSideSets column_side_sets(const TorusGraph& t, const Column& c) {
  ColumnSideSets out;
  const int last = t.dim() - 1;
  for (Vertex u : c.members) {
    const Vertex up = t.step(u, last, 1);
    const Vertex down = t.step(u, last, -1);
    std::vector<Vertex> mu;
    for (Vertex y : t.neighbors(u))
      if (y != up && y != down) mu.push_back(y);
    out.united.insert(out.united.end(), mu.begin(), mu.end());
    out.per_member.push_back(std::move(mu));
  }
  std::sort(out.united.begin(), out.united.end());
  out.united.erase(std::unique(out.united.begin(), out.united.end()), out.united.end());
  return out;
}

bool column_side_structure_holds(const TorusGraph& t, const Column& c) {
  const auto sides = column_side_sets(t, c);
  const auto& verts = sides.united;
  auto inside = [&](Vertex y) { return std::binary_search(verts.begin(), verts.end(), y); };

  const int expected_components = t.side() == 2 ? t.dim() - 1 : 2 * t.dim() - 2;
  const std::size_t component_size = static_cast<std::size_t>(t.side());
  const std::size_t expected_degree = t.side() == 2 ? 1 : 2;
  if (verts.size() != static_cast<std::size_t>(expected_components) * component_size) return false;

  for (Vertex y : verts) {
    std::size_t deg = 0;
    for (Vertex z : t.neighbors(y)) deg += inside(z);
    if (deg != expected_degree) return false;
  }
  // Every vertex has the right degree; components of that size are then cycles (or edges).
  std::vector<bool> seen(verts.size(), false);
  int components = 0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (seen[i]) continue;
    ++components;
    std::size_t size = 0;
    std::vector<Vertex> stack{verts[i]};
    seen[i] = true;
    while (!stack.empty()) {
      Vertex y = stack.back();
      stack.pop_back();
      ++size;
      for (Vertex z : t.neighbors(y)) {
        if (!inside(z)) continue;
        auto idx = static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), z) - verts.begin());
        if (!seen[idx]) {
          seen[idx] = true;
          stack.push_back(z);
        }
      }
    }
    if (size != component_size) return false;
  }
  return components == expected_components;
}

std::size_t edge_boundary(const TorusGraph& t, std::span<const Vertex> x_set) {
  std::vector<bool> member(t.num_vertices(), false);
  for (Vertex x : x_set) {
    if (x >= t.num_vertices()) throw Error(ErrorCode::OutOfRange, "vertex outside torus");
    member[x] = true;
  }
  std::size_t count = 0;
  for (std::size_t x = 0; x < t.num_vertices(); ++x) {
    if (!member[x]) continue;
    for (Vertex y : t.neighbors(Vertex(x))) count += !member[y];
  }
  return count;
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ComponentInfo giant_component_after_deletion(const TorusGraph& t, std::span<const Edge> deleted) {
  auto key = [](Vertex a, Vertex b) { return (std::uint64_t(std::min(a, b)) << 32) | std::max(a, b); };
  std::unordered_set<std::uint64_t> removed;
  for (const auto& e : deleted) {
    if (!t.adjacent(e.u, e.v)) throw Error(ErrorCode::OutOfRange, "deleted pair is not a torus edge");
    removed.insert(key(e.u, e.v));
  }
  DisjointSets sets(t.num_vertices());
  for (std::size_t x = 0; x < t.num_vertices(); ++x)
    for (Vertex y : t.neighbors(Vertex(x)))
      if (!removed.count(key(Vertex(x), y))) sets.unite(Vertex(x), y);

  ComponentInfo info;
  info.component_of.resize(t.num_vertices());
  std::vector<std::uint32_t> label(t.num_vertices(), UINT32_MAX);
  std::vector<std::size_t> sizes;
  for (std::size_t x = 0; x < t.num_vertices(); ++x) {
    const auto root = sets.find(Vertex(x));
    if (label[root] == UINT32_MAX) {
      label[root] = static_cast<std::uint32_t>(sizes.size());
      sizes.push_back(0);
    }
    info.component_of[x] = label[root];
    ++sizes[label[root]];
  }
  info.count = sizes.size();
  info.largest = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  return info;
}

}  // namespace torushom
