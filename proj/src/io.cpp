#include "thinhom/io.hpp"

#include "thinhom/errors.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace thinhom {

void write_field_csv(std::ostream& os, const Mesh& mesh, const Field& u, const std::string& value_name) {
  if (u.size() != mesh.num_nodes()) throw Error("field size does not match the mesh");
  std::ostringstream buf;
  buf << std::setprecision(17) << "index,x1,x2," << value_name << "\n";
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    buf << i << "," << mesh.node(i).x() << "," << mesh.node(i).y() << "," << u[i] << "\n";
  }
  os << buf.str();
}

Field read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index,x1,x2,", 0) != 0) throw IoError("field csv: unexpected header");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long idx = 0;
    double x1 = 0.0;
    double x2 = 0.0;
    double v = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> idx >> c1 >> x1 >> c2 >> x2 >> c3 >> v) || c1 != ',' || c2 != ',' || c3 != ',' ||
        idx != long(values.size())) {
      throw IoError("field csv: bad row '" + line + "'");
    }
    values.push_back(v);
  }
  return Eigen::Map<Field>(values.data(), Eigen::Index(values.size()));
}

} // namespace thinhom
