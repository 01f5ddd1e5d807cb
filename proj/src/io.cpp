#include "ratlab/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ratlab/context.hpp"

namespace ratlab {

std::string fmtReal(const Real& x, int digits) { return x.str(digits); }

std::string csvLine(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ",";
    out += cells[i];
  }
  out += "\n";
  return out;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hashHex(uint64_t h) {
  static const char* d = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = d[h & 0xf];
    h >>= 4;
  }
  return out;
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorClass::Io, "cannot open for writing: " + path);
  f << content;
}

std::string readFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorClass::Io, "cannot open for reading: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool fileExists(const std::string& path) { return std::filesystem::exists(path); }

void ensureDir(const std::string& path) { std::filesystem::create_directories(path); }

}  // namespace ratlab
