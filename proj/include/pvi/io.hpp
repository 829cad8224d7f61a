#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "pvi/bsvi.hpp"
#include "pvi/fk_solver.hpp"
#include "pvi/oracles.hpp"
#include "pvi/reflected_sde.hpp"

namespace pvi {

// %.17g; round-trips, and -0 prints as 0.
std::string format_double(double v);

// RFC 4180: CRLF record separators, fields quoted when they hold a comma,
// quote, CR or LF.
std::string csv_field(std::string_view s);

// Columns t, x1..xd, u, std_error, boundary_flag in time-major node order.
std::string grid_csv(const SolutionGrid& sol);
// Same columns for the finite-difference oracle (std_error 0, flag at the ends).
std::string grid_csv(const FdGrid& fd);
// Columns path, k, t, x1..xd, A in path-major order.
std::string paths_csv(const PathBundle& paths);
// Columns path, k, Y, Z1..Zd, U, V; Z is empty at the terminal step.
std::string solution_csv(const BackwardSolution& sol);

void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

// Two-space indented dump with a trailing newline; non-finite numbers become null.
std::string json_text(const nlohmann::ordered_json& j);

}  // namespace pvi
