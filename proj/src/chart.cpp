#include "densalg/chart.hpp"

#include <map>
#include <mutex>
#include <set>

namespace densalg {

namespace {
std::mutex g_registry_mutex;
std::map<std::string, ChartPtr>& registry() {
  static std::map<std::string, ChartPtr> r;
  return r;
}
}  // namespace

ChartPtr Chart::make(const std::vector<std::pair<std::string, Parity>>& coords) {
  std::string sig;
  std::set<std::string> seen;
  for (const auto& [name, p] : coords) {
    if (name.empty())
      throw Error(Error::Code::bad_argument, "empty coordinate name");
    if (!seen.insert(name).second)
      throw Error(Error::Code::bad_argument, "duplicate coordinate name: " + name);
    sig += name;
    sig += (p == Parity::odd ? "~" : ";");
  }

  {
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    auto it = registry().find(sig);
    if (it != registry().end()) return it->second;
  }

  auto chart = std::shared_ptr<Chart>(new Chart());
  chart->signature_ = sig;
  for (const auto& [name, p] : coords) {
    chart->names_.push_back(name);
    chart->parities_.push_back(p);
    if (p == Parity::even) {
      chart->even_index_.push_back(static_cast<int>(chart->even_coords_.size()));
      chart->odd_index_.push_back(-1);
      chart->even_coords_.push_back(static_cast<int>(chart->names_.size()) - 1);
      chart->even_names_.push_back(name);
    } else {
      chart->even_index_.push_back(-1);
      chart->odd_index_.push_back(static_cast<int>(chart->odd_coords_.size()));
      chart->odd_coords_.push_back(static_cast<int>(chart->names_.size()) - 1);
    }
  }
  if (chart->n_odd() > 16)
    throw Error(Error::Code::bad_argument, "odd dimension exceeds the supported cap of 16");

  std::lock_guard<std::mutex> lock(g_registry_mutex);
  auto [it, inserted] = registry().emplace(sig, chart);
  return it->second;
}

int Chart::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace densalg
