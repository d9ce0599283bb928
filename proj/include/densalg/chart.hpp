#pragma once

#include "densalg/rational.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace densalg {

enum class Parity : uint8_t { even = 0, odd = 1 };

inline Parity parity_add(Parity a, Parity b) {
  return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}
inline int parity_bit(Parity p) { return static_cast<int>(p); }
inline const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

/// Ordered list of named coordinates with parities. The declaration order is
/// fixed and used for all normal forms and sign computations. Charts are
/// interned so value-equal charts share one instance.
class Chart {
 public:
  static ChartPtr make(const std::vector<std::pair<std::string, Parity>>& coords);

  int size() const { return static_cast<int>(names_.size()); }
  int n_even() const { return static_cast<int>(even_coords_.size()); }
  int n_odd() const { return static_cast<int>(odd_coords_.size()); }

  const std::string& name(int coord) const { return names_[static_cast<size_t>(coord)]; }
  Parity parity(int coord) const { return parities_[static_cast<size_t>(coord)]; }

  /// -1 if not found
  int index_of(const std::string& name) const;

  /// even-variable index of an even coordinate (for polynomial storage)
  int even_var(int coord) const { return even_index_[static_cast<size_t>(coord)]; }
  /// odd bit position of an odd coordinate (for Grassmann masks)
  int odd_bit(int coord) const { return odd_index_[static_cast<size_t>(coord)]; }

  int even_coord(int var) const { return even_coords_[static_cast<size_t>(var)]; }
  int odd_coord(int bit) const { return odd_coords_[static_cast<size_t>(bit)]; }

  const std::vector<std::string>& even_names() const { return even_names_; }
  const std::string& signature() const { return signature_; }

 private:
  Chart() = default;
  std::vector<std::string> names_;
  std::vector<Parity> parities_;
  std::vector<int> even_index_, odd_index_;
  std::vector<int> even_coords_, odd_coords_;
  std::vector<std::string> even_names_;
  std::string signature_;
};

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a != b)
    throw Error(Error::Code::chart_mismatch, "values live on different charts");
}

}  // namespace densalg
