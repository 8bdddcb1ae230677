#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chainbk {

using FirmIndex = std::size_t;

/// One endpoint of an adjacency list entry: the other firm and the edge
/// strength k_ij.
struct Link {
  FirmIndex firm = 0;
  double k = 0.0;
};

/// Directed supplier -> customer edge (direction of physical distribution).
struct Edge {
  FirmIndex supplier = 0;
  FirmIndex customer = 0;
  double k = 0.0;
};

/// Directed transaction graph. Edges point from supplier to customer; money
/// flows the other way. Firm indices are dense and assigned in insertion
/// order, edges keep insertion order as well so every traversal is
/// deterministic.
class TransactionNetwork {
 public:
  TransactionNetwork() = default;
  explicit TransactionNetwork(std::vector<std::string> firm_ids);

  FirmIndex add_firm(std::string id);

  /// Throws std::invalid_argument on self-loops, duplicate ordered pairs or
  /// out-of-range indices.
  void add_edge(FirmIndex supplier, FirmIndex customer, double k);
  void add_edge(std::string_view supplier, std::string_view customer, double k);

  /// Changes k on an existing edge (edge index into edges()).
  void set_strength(std::size_t edge_index, double k);

  std::size_t firm_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::string& id(FirmIndex i) const { return ids_.at(i); }
  const std::vector<std::string>& firm_ids() const noexcept { return ids_; }
  std::optional<FirmIndex> find(std::string_view id) const;
  /// Like find() but throws std::out_of_range naming the missing id.
  FirmIndex index_of(std::string_view id) const;

  /// Firms that firm i sells to.
  std::span<const Link> customers(FirmIndex i) const { return customers_.at(i); }
  /// Firms that sell to firm i; these are the ones exposed when i fails.
  std::span<const Link> suppliers(FirmIndex i) const { return suppliers_.at(i); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> ids_;
  std::unordered_map<std::string, FirmIndex, StringHash, std::equal_to<>> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Link>> customers_;
  std::vector<std::vector<Link>> suppliers_;
  std::set<std::pair<FirmIndex, FirmIndex>> pairs_;
};

}  // namespace chainbk
