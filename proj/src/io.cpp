#include "pvi/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

constexpr const char* kEol = "\r\n";

std::string to_hex(const unsigned char* p, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(2 * n);
  for (unsigned i = 0; i < n; ++i) {
    s += digits[p[i] >> 4];
    s += digits[p[i] & 0xF];
  }
  return s;
}

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::string grid_csv(const SolutionGrid& sol) {
  const int d = sol.points.empty() ? 1 : static_cast<int>(sol.points.front().size());
  std::string out = "t";
  for (int c = 1; c <= d; ++c) out += ",x" + std::to_string(c);
  out += ",u,std_error,boundary_flag";
  out += kEol;
  for (std::size_t ti = 0; ti < sol.times.size(); ++ti) {
    for (std::size_t pj = 0; pj < sol.points.size(); ++pj) {
      out += format_double(sol.times[ti]);
      for (int c = 0; c < d; ++c) out += ',' + format_double(sol.points[pj][c]);
      out += ',' + format_double(sol.value(ti, pj));
      out += ',' + format_double(sol.std_error(ti, pj));
      out += sol.boundary[pj] ? ",1" : ",0";
      out += kEol;
    }
  }
  return out;
}

std::string grid_csv(const FdGrid& fd) {
  std::string out = "t,x1,u,std_error,boundary_flag";
  out += kEol;
  const std::size_t nx = fd.x.size();
  for (std::size_t m = 0; m < fd.t.size(); ++m) {
    for (std::size_t j = 0; j < nx; ++j) {
      out += format_double(fd.t[m]) + ',' + format_double(fd.x[j]) + ',' + format_double(fd.at(m, j)) + ",0";
      out += (j == 0 || j + 1 == nx) ? ",1" : ",0";
      out += kEol;
    }
  }
  return out;
}

std::string paths_csv(const PathBundle& paths) {
  std::string out = "path,k,t";
  for (int c = 1; c <= paths.dim; ++c) out += ",x" + std::to_string(c);
  out += ",A";
  out += kEol;
  for (int i = 0; i < paths.n_paths; ++i) {
    for (int k = 0; k <= paths.grid.n_steps; ++k) {
      out += std::to_string(i) + ',' + std::to_string(k) + ',' + format_double(paths.grid.t(k));
      const Point x = paths.X(k, i);
      for (int c = 0; c < paths.dim; ++c) out += ',' + format_double(x[c]);
      out += ',' + format_double(paths.A(k, i));
      out += kEol;
    }
  }
  return out;
}

std::string solution_csv(const BackwardSolution& sol) {
  std::string out = "path,k,Y";
  for (int c = 1; c <= sol.dim; ++c) out += ",Z" + std::to_string(c);
  out += ",U,V";
  out += kEol;
  const int n = sol.grid.n_steps;
  for (int i = 0; i < sol.n_paths; ++i) {
    for (int k = 0; k <= n; ++k) {
      out += std::to_string(i) + ',' + std::to_string(k) + ',' + format_double(sol.y(k, i));
      for (int c = 0; c < sol.dim; ++c) out += k < n ? ',' + format_double(sol.z(k, i, c)) : std::string(",");
      out += ',' + format_double(sol.u(k, i)) + ',' + format_double(sol.v(k, i));
      out += kEol;
    }
  }
  return out;
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw ConfigError("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw Error("sha256 failed");
  return to_hex(md, len);
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string json_text(const nlohmann::ordered_json& j) {
  return j.dump(2) + "\n";
}

}  // namespace pvi
