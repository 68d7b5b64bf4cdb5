#include "flocksel/csv.hpp"

#include <charconv>
#include <ostream>

#include "flocksel/errors.hpp"

namespace flocksel {

std::string format_real(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_snapshot_csv(std::ostream& out, const Ensemble& e,
                        const std::vector<std::size_t>& ids) {
  if (e.dim() != 2) throw ContractError("snapshots are written for dim = 2");
  out << "id,x1,x2,v1,v2\n";
  for (std::size_t id : ids) {
    const auto x = e.x(id);
    const auto v = e.v(id);
    out << id << ',' << format_real(x[0]) << ',' << format_real(x[1]) << ','
        << format_real(v[0]) << ',' << format_real(v[1]) << '\n';
  }
}

}  // namespace flocksel
