#ifndef FLOCKSEL_CSV_HPP
#define FLOCKSEL_CSV_HPP

#include <iosfwd>
#include <string>

#include "flocksel/ensemble.hpp"

namespace flocksel {

/// Shortest decimal form that reads back to the same double.
std::string format_real(double value);

/// Snapshot rows `id,x1,x2,v1,v2` (2-d ensembles).
void write_snapshot_csv(std::ostream& out, const Ensemble& e,
                        const std::vector<std::size_t>& ids);

}  // namespace flocksel

#endif  // FLOCKSEL_CSV_HPP
