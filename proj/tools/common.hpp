#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rxfeed/rxfeed.h"

namespace tool {

struct CString {
  char* p = nullptr;
  ~CString() { rxf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

class Failure : public std::runtime_error {
 public:
  Failure(rxf_status status, const std::string& what) : std::runtime_error(what), status(status) {}
  rxf_status status;
};

inline void check(rxf_status st, const char* what) {
  if (st != RXF_OK) {
    throw Failure(st, std::string(what) + ": " + rxf_status_name(st) + ": " + rxf_last_error());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fputc('\n', stdout);
    return;
  }
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace tool
