#include "chainbk/network.hpp"

#include <stdexcept>

namespace chainbk {

TransactionNetwork::TransactionNetwork(std::vector<std::string> firm_ids) {
  for (auto& id : firm_ids) add_firm(std::move(id));
}

FirmIndex TransactionNetwork::add_firm(std::string id) {
  if (id.empty()) throw std::invalid_argument("firm id must not be empty");
  if (index_.contains(id)) throw std::invalid_argument("duplicate firm id '" + id + "'");
  const FirmIndex idx = ids_.size();
  index_.emplace(id, idx);
  ids_.push_back(std::move(id));
  customers_.emplace_back();
  suppliers_.emplace_back();
  return idx;
}

void TransactionNetwork::add_edge(FirmIndex supplier, FirmIndex customer, double k) {
  if (supplier >= ids_.size() || customer >= ids_.size())
    throw std::invalid_argument("edge endpoint out of range");
  if (supplier == customer)
    throw std::invalid_argument("self-loop on firm '" + ids_[supplier] + "'");
  if (!pairs_.emplace(supplier, customer).second)
    throw std::invalid_argument("duplicate edge " + ids_[supplier] + " -> " + ids_[customer]);
  edges_.push_back({supplier, customer, k});
  customers_[supplier].push_back({customer, k});
  suppliers_[customer].push_back({supplier, k});
}

void TransactionNetwork::add_edge(std::string_view supplier, std::string_view customer,
                                  double k) {
  add_edge(index_of(supplier), index_of(customer), k);
}

void TransactionNetwork::set_strength(std::size_t edge_index, double k) {
  auto& e = edges_.at(edge_index);
  e.k = k;
  for (auto& l : customers_[e.supplier])
    if (l.firm == e.customer) l.k = k;
  for (auto& l : suppliers_[e.customer])
    if (l.firm == e.supplier) l.k = k;
}

std::optional<FirmIndex> TransactionNetwork::find(std::string_view id) const {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  return std::nullopt;
}

FirmIndex TransactionNetwork::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw std::out_of_range("unknown firm id '" + std::string(id) + "'");
}

}  // namespace chainbk
