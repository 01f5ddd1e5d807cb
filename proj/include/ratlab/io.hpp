#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ratlab/real.hpp"

namespace ratlab {

inline constexpr const char* kVersion = "0.1.0";

// Fixed-width scientific formatting; deterministic across runs.
std::string fmtReal(const Real& x, int digits = 20);

std::string csvLine(const std::vector<std::string>& cells);

uint64_t fnv1a64(const std::string& s);
std::string hashHex(uint64_t h);

void writeFile(const std::string& path, const std::string& content);
std::string readFile(const std::string& path);
bool fileExists(const std::string& path);
void ensureDir(const std::string& path);

}  // namespace ratlab
