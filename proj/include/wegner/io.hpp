#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wegner/closed3.hpp"
#include "wegner/matrix.hpp"

namespace wegner {

// Matrix file format: {"n": int, "entries_re": [[...]], "entries_im": [[...]]}
// with entries_im optional (real symmetric input).  Validation errors carry
// the offending field in the message.
hermitian_matrix load_matrix_json(const std::string& path);
hermitian_matrix parse_matrix_json(const std::string& text);
std::string matrix_to_json(const hermitian_matrix& h);

// Shortest-roundtrip decimal formatting (17 significant digits).
std::string format_g17(double v);

struct trajectory_row {
  double s = 0.0;
  hermitian_matrix h;
  std::optional<phase_triple> phases;
};

// CSV with header  s,H11_re,H11_im,H12_re,...  over the upper triangle in
// row-major order, one row per flow time, LF line endings.  When any row
// carries phases, columns phi_b,phi_c,phi_g are appended (3x3 only).
void write_trajectory_csv(std::ostream& out, int n, const std::vector<trajectory_row>& rows);

}  // namespace wegner
