#include "rssm/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "rssm/errors.hpp"

namespace rssm {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'S', 'M', 'B', 'I', 'N', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_i64(std::ostream& os, std::int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::int64_t read_i64(std::istream& is) {
  std::int64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_matrix(std::ostream& os, const Matrix& M) {
  write_i64(os, M.rows());
  write_i64(os, M.cols());
  os.write(reinterpret_cast<const char*>(M.data()),
           static_cast<std::streamsize>(sizeof(double) * M.size()));
}

Matrix read_matrix(std::istream& is) {
  const auto rows = read_i64(is);
  const auto cols = read_i64(is);
  if (rows < 1 || cols < 1 || rows > (1 << 24) || cols > (1 << 24))
    throw IoError("instance file: corrupt matrix header");
  Matrix M(rows, cols);
  is.read(reinterpret_cast<char*>(M.data()),
          static_cast<std::streamsize>(sizeof(double) * M.size()));
  if (!is) throw IoError("instance file: truncated matrix payload");
  return M;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open for reading: " + path);
  return is;
}

void check_magic_and_kind(std::istream& is, InstanceKind expected,
                          const std::string& path) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not an instance file: " + path);
  const auto kind = static_cast<InstanceKind>(read_u32(is));
  if (kind != expected)
    throw IoError("instance kind mismatch in " + path);
}

}  // namespace

void emit_csv(const RunTrace& trace, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fputs("iter,flops,seconds,f,err,proxy,step\n", f);
  for (const auto& r : trace.records)
    std::fprintf(f, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                 r.flops, r.seconds, r.f, r.err, r.proxy, r.step);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

RunTrace parse_csv(const std::string& path) {
  auto is = open_in(path, std::ios::in);
  std::string line;
  if (!std::getline(is, line) || line != "iter,flops,seconds,f,err,proxy,step")
    throw IoError("unexpected CSV header in " + path);
  RunTrace trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
    }
    if (fields.size() != 7)
      throw IoError("malformed CSV row in " + path + ": " + line);
    // strtod handles nan/inf, which stream extraction does not.
    auto to_double = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str()) throw IoError("malformed CSV field: " + s);
      return v;
    };
    TraceRecord r;
    r.iter = std::strtol(fields[0].c_str(), nullptr, 10);
    r.flops = to_double(fields[1]);
    r.seconds = to_double(fields[2]);
    r.f = to_double(fields[3]);
    r.err = to_double(fields[4]);
    r.proxy = to_double(fields[5]);
    r.step = to_double(fields[6]);
    trace.records.push_back(r);
  }
  return trace;
}

void save_rsr(const RsrInstance& inst, const std::string& path) {
  auto os = open_out(path, std::ios::binary);
  os.write(kMagic, 8);
  write_u32(os, static_cast<std::uint32_t>(InstanceKind::Rsr));
  write_i64(os, inst.n);
  write_i64(os, inst.d);
  write_i64(os, inst.m1);
  write_i64(os, inst.m2);
  write_matrix(os, inst.data);
  write_matrix(os, inst.basis);
  if (!os) throw IoError("write failed: " + path);
}

RsrInstance load_rsr(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  check_magic_and_kind(is, InstanceKind::Rsr, path);
  RsrInstance inst;
  inst.n = static_cast<int>(read_i64(is));
  inst.d = static_cast<int>(read_i64(is));
  inst.m1 = static_cast<int>(read_i64(is));
  inst.m2 = static_cast<int>(read_i64(is));
  inst.data = read_matrix(is);
  inst.basis = read_matrix(is);
  if (inst.data.rows() != inst.n || inst.data.cols() != inst.m() ||
      inst.basis.rows() != inst.n || inst.basis.cols() != inst.d)
    throw IoError("instance file: inconsistent dims in " + path);
  return inst;
}

void save_odl(const OdlInstance& inst, const std::string& path) {
  auto os = open_out(path, std::ios::binary);
  os.write(kMagic, 8);
  write_u32(os, static_cast<std::uint32_t>(InstanceKind::Odl));
  write_i64(os, inst.n);
  write_i64(os, inst.m);
  write_f64(os, inst.theta);
  write_matrix(os, inst.data);
  write_matrix(os, inst.dictionary);
  if (!os) throw IoError("write failed: " + path);
}

OdlInstance load_odl(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  check_magic_and_kind(is, InstanceKind::Odl, path);
  OdlInstance inst;
  inst.n = static_cast<int>(read_i64(is));
  inst.m = static_cast<int>(read_i64(is));
  inst.theta = read_f64(is);
  inst.data = read_matrix(is);
  inst.dictionary = read_matrix(is);
  if (inst.data.rows() != inst.n || inst.data.cols() != inst.m ||
      inst.dictionary.rows() != inst.n || inst.dictionary.cols() != inst.n)
    throw IoError("instance file: inconsistent dims in " + path);
  return inst;
}

InstanceKind peek_instance_kind(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not an instance file: " + path);
  return static_cast<InstanceKind>(read_u32(is));
}

}  // namespace rssm
