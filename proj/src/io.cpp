#include "wegner/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wegner {

namespace {

using nlohmann::json;

std::vector<std::vector<double>> read_grid(const json& j, const char* key, int n) {
  if (!j.at(key).is_array()) throw flow_error(std::string(key) + " must be an array of rows");
  const auto& rows = j.at(key);
  if (static_cast<int>(rows.size()) != n)
    throw flow_error(std::string(key) + " must have n rows");
  std::vector<std::vector<double>> grid(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
      throw flow_error(std::string(key) + " rows must each hold n numbers");
    for (int k = 0; k < n; ++k) {
      if (!rows[i][k].is_number())
        throw flow_error(std::string(key) + " holds a non-numeric entry");
      grid[i][k] = rows[i][k].get<double>();
    }
  }
  return grid;
}

}  // namespace

hermitian_matrix parse_matrix_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw flow_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw flow_error("matrix file must be a JSON object");
  if (!j.contains("n")) throw flow_error("missing field n");
  if (!j.at("n").is_number_integer()) throw flow_error("field n must be an integer");
  const int n = j.at("n").get<int>();
  if (n < 1 || n > 64) throw dimension_unsupported("n must lie in [1, 64]");
  if (!j.contains("entries_re")) throw flow_error("missing field entries_re");
  const auto re = read_grid(j, "entries_re", n);
  complex_matrix m(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = complexd(re[i][k], 0.0);
  if (j.contains("entries_im")) {
    const auto im = read_grid(j, "entries_im", n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m(i, k) += complexd(0.0, im[i][k]);
  }
  return hermitian_matrix::validate(m);
}

hermitian_matrix load_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw flow_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_json(buf.str());
}

std::string matrix_to_json(const hermitian_matrix& h) {
  const int n = h.size();
  json re = json::array(), im = json::array();
  bool any_im = false;
  for (int i = 0; i < n; ++i) {
    json row_re = json::array(), row_im = json::array();
    for (int k = 0; k < n; ++k) {
      row_re.push_back(h.at(i, k).real());
      row_im.push_back(h.at(i, k).imag());
      if (h.at(i, k).imag() != 0.0) any_im = true;
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  json j;
  j["n"] = n;
  j["entries_re"] = std::move(re);
  if (any_im) j["entries_im"] = std::move(im);
  return j.dump(2) + "\n";
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, int n, const std::vector<trajectory_row>& rows) {
  bool any_phases = false;
  for (const auto& r : rows) any_phases = any_phases || r.phases.has_value();
  out << "s";
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out << ",H" << (i + 1) << (j + 1) << "_re,H" << (i + 1) << (j + 1) << "_im";
    }
  }
  if (any_phases) out << ",phi_b,phi_c,phi_g";
  out << "\n";
  for (const auto& r : rows) {
    out << format_g17(r.s);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        out << "," << format_g17(r.h.at(i, j).real()) << "," << format_g17(r.h.at(i, j).imag());
      }
    }
    if (any_phases) {
      const phase_triple p = r.phases.value_or(phase_triple{});
      out << "," << format_g17(p.phi_b) << "," << format_g17(p.phi_c) << ","
          << format_g17(p.phi_g);
    }
    out << "\n";
  }
}

}  // namespace wegner
