#include "pff/io.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <iostream>
#include <sstream>

#include "pff/errors.hpp"

namespace pff {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

template <class T>
void require_rows(const std::vector<T>& rows, const char* what) {
  if (rows.empty()) throw ConfigError(std::string("no ") + what + " records to write");
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, const char* header,
                                                std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError(path.string() + ": unexpected CSV header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != columns) throw IoError(path.string() + ": wrong column count in '" + line + "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) throw IoError("malformed number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty()) throw IoError("malformed integer '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

void write_step_csv(const std::vector<StepRecord>& records, const std::filesystem::path& path) {
  require_rows(records, "step");
  auto out = open_for_write(path);
  out << kStepCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.step << ',' << num(r.applied_displacement) << ',' << num(r.reaction_force) << ',' << num(r.max_alpha)
        << ',' << r.staggered_iters << ',' << r.newton_u_total << ',' << r.newton_alpha_total << ','
        << (r.converged ? 1 : 0) << ',' << r.failure_cause << "\n";
  }
  finish(out, path);
}

void write_path_csv(const StaggeredPath& records, const std::filesystem::path& path) {
  require_rows(records, "staggered path");
  auto out = open_for_write(path);
  out << kPathCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.cum_newton_u << ',' << r.cum_newton_alpha << ',' << num(r.res_u_norm) << ','
        << num(r.dalpha_norm) << ',' << num(r.energy) << ',' << num(r.denergy) << "\n";
  }
  finish(out, path);
}

void write_profile_csv(const std::vector<ProfileRow>& rows, const std::filesystem::path& path) {
  require_rows(rows, "profile");
  auto out = open_for_write(path);
  out << kProfileCsvHeader << "\n";
  for (const auto& r : rows) {
    out << num(r.lambda) << ',' << num(r.energy) << ',' << num(r.slope) << ',' << num(r.res_norm) << "\n";
  }
  finish(out, path);
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path) {
  require_rows(rows, "comparison");
  auto out = open_for_write(path);
  out << kComparisonCsvHeader << "\n";
  for (const auto& r : rows) {
    out << to_string(r.variant) << ',' << (r.converged ? 1 : 0) << ',' << r.newton_u_total << ','
        << r.newton_alpha_total << ',' << r.staggered_iters << ',' << num(r.residual_evals_per_iter) << ','
        << num(r.energy_evals_per_iter) << ',' << r.failure_cause << "\n";
  }
  finish(out, path);
}

std::vector<StepRecord> read_step_csv(const std::filesystem::path& path) {
  std::vector<StepRecord> out;
  for (const auto& f : read_rows(path, kStepCsvHeader, 9)) {
    StepRecord r;
    r.step = to_int(f[0]);
    r.applied_displacement = to_double(f[1]);
    r.reaction_force = to_double(f[2]);
    r.max_alpha = to_double(f[3]);
    r.staggered_iters = to_int(f[4]);
    r.newton_u_total = to_int(f[5]);
    r.newton_alpha_total = to_int(f[6]);
    r.converged = to_int(f[7]) != 0;
    r.failure_cause = f[8];
    out.push_back(std::move(r));
  }
  return out;
}

StaggeredPath read_path_csv(const std::filesystem::path& path) {
  StaggeredPath out;
  for (const auto& f : read_rows(path, kPathCsvHeader, 7)) {
    StaggeredIterate r;
    r.iteration = to_int(f[0]);
    r.cum_newton_u = to_int(f[1]);
    r.cum_newton_alpha = to_int(f[2]);
    r.res_u_norm = to_double(f[3]);
    r.dalpha_norm = to_double(f[4]);
    r.energy = to_double(f[5]);
    r.denergy = to_double(f[6]);
    out.push_back(r);
  }
  return out;
}

std::vector<ProfileRow> read_profile_csv(const std::filesystem::path& path) {
  std::vector<ProfileRow> out;
  for (const auto& f : read_rows(path, kProfileCsvHeader, 4)) {
    out.push_back({to_double(f[0]), to_double(f[1]), to_double(f[2]), to_double(f[3]), {}});
  }
  return out;
}

std::vector<ComparisonRow> read_comparison_csv(const std::filesystem::path& path) {
  std::vector<ComparisonRow> out;
  for (const auto& f : read_rows(path, kComparisonCsvHeader, 8)) {
    ComparisonRow r;
    r.variant = parse_line_search(f[0]);
    r.converged = to_int(f[1]) != 0;
    r.newton_u_total = to_int(f[2]);
    r.newton_alpha_total = to_int(f[3]);
    r.staggered_iters = to_int(f[4]);
    r.residual_evals_per_iter = to_double(f[5]);
    r.energy_evals_per_iter = to_double(f[6]);
    r.failure_cause = f[7];
    out.push_back(std::move(r));
  }
  return out;
}

void write_vtk(const Mesh& mesh, const State& state, const std::filesystem::path& path) {
  const int n = mesh.num_nodes();
  if (state.u.size() != 2 * n || state.alpha.size() != n) throw ConfigError("state vector lengths do not match the mesh");
  auto out = open_for_write(path);
  const int ne = mesh.num_elements();
  out << "# vtk DataFile Version 3.0\n";
  out << "phase-field fracture state\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& p : mesh.nodes) out << num(p[0]) << ' ' << num(p[1]) << " 0\n";
  out << "CELLS " << ne << ' ' << 5 * ne << "\n";
  for (const auto& q : mesh.quads) out << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << "\n";
  out << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) out << "9\n";
  out << "POINT_DATA " << n << "\n";
  out << "VECTORS displacement double\n";
  for (int i = 0; i < n; ++i) out << num(state.u[2 * i]) << ' ' << num(state.u[2 * i + 1]) << " 0\n";
  out << "SCALARS alpha double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (int i = 0; i < n; ++i) out << num(state.alpha[i]) << "\n";
  finish(out, path);
}

namespace {

constexpr char kMagic[8] = {'P', 'F', 'F', 'C', 'K', 'P', 'T', '1'};

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  const std::uint64_t n = static_cast<std::uint64_t>(v.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

Eigen::VectorXd read_vector(std::ifstream& in, const std::filesystem::path& path) {
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n > (1ull << 32)) throw CheckpointError("malformed checkpoint " + path.string());
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw CheckpointError("truncated checkpoint " + path.string());
  return v;
}

}  // namespace

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&c.config_hash), sizeof c.config_hash);
  const std::int32_t step = c.step;
  out.write(reinterpret_cast<const char*>(&step), sizeof step);
  write_vector(out, c.state.u);
  write_vector(out, c.state.alpha);
  write_vector(out, c.state.alpha_prev);
  finish(out, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint " + path.string() + " is missing");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw CheckpointError("checkpoint " + path.string() + " has a bad header");
  }
  Checkpoint c;
  std::int32_t step = 0;
  in.read(reinterpret_cast<char*>(&c.config_hash), sizeof c.config_hash);
  in.read(reinterpret_cast<char*>(&step), sizeof step);
  if (!in) throw CheckpointError("truncated checkpoint " + path.string());
  c.step = step;
  c.state.u = read_vector(in, path);
  c.state.alpha = read_vector(in, path);
  c.state.alpha_prev = read_vector(in, path);
  return c;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

RunLog::RunLog(const std::filesystem::path& path, bool verbose) : out_(open_for_write(path)), verbose_(verbose) {}

void RunLog::line(const std::string& text) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  localtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%d %H:%M:%S", &tm);
  if (out_.is_open()) out_ << stamp << ' ' << text << std::endl;
  if (verbose_) std::cerr << text << std::endl;
}

}  // namespace pff
