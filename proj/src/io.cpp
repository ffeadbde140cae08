#include "fplap/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fplap/errors.hpp"
#include "fplap/version.hpp"

namespace fplap {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[k] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string Provenance::header_line() const {
  std::ostringstream os;
  os << "# fplap v" << kVersion << " config=" << config_hash << " seed=" << seed;
  return os.str();
}

void write_field(const DiscreteField& u, const std::string& path,
                 const std::string& note, const Provenance* prov) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.precision(17);
  if (prov) out << prov->header_line() << "\n";
  out << "# fplap field v" << kVersion << "\n";
  if (!note.empty()) out << "# " << note << "\n";
  out << u.size() << "\n";
  for (double x : u.v) out << x << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<double> read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open field file");
  std::string line;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<double> values;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    if (!have_n) {
      if (fields >> n) have_n = true;
      continue;
    }
    double x;
    while (fields >> x) values.push_back(x);
  }
  if (!have_n || values.size() != n)
    throw ParseError(path + ": expected " + std::to_string(n) +
                     " field values, got " + std::to_string(values.size()));
  return values;
}

void write_trace_csv(const std::vector<TracePoint>& trace,
                     const std::string& path, const Provenance& prov) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.precision(17);
  out << prov.header_line() << "\n";
  out << "iter,psi,residual,step\n";
  for (const auto& t : trace)
    out << t.iter << "," << t.psi << "," << t.residual << "," << t.step << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_study_csv(const StudyTable& table, const std::string& path,
                     const Provenance& prov) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.precision(17);
  out << prov.header_line() << "\n";
  out << "resolution,n,psi,residual,w_norm,status,wall_seconds\n";
  for (const auto& r : table.rows)
    out << r.resolution << "," << r.n << "," << r.psi << "," << r.residual
        << "," << r.w_norm << "," << r.status << "," << r.seconds << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw std::runtime_error(path + ": cannot create directory: " + ec.message());
}

}
