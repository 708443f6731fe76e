#ifndef THINHOM_IO_HPP
#define THINHOM_IO_HPP

#include "thinhom/assembly.hpp"

#include <iosfwd>
#include <string>

namespace thinhom {

/// Nodal field as "index,x1,x2,value" rows under a header row.
void write_field_csv(std::ostream& os, const Mesh& mesh, const Field& u, const std::string& value_name = "value");
/// Values of a field written by write_field_csv, in index order.
Field read_field_csv(std::istream& is);

} // namespace thinhom

#endif // THINHOM_IO_HPP
