#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef GTRX_FIXTURE_DIR
#error "GTRX_FIXTURE_DIR must be defined"
#endif

namespace fixtures {

inline std::string path(const std::string& relative) { return std::string(GTRX_FIXTURE_DIR) + "/" + relative; }

inline std::string read(const std::string& relative) {
    std::ifstream in(path(relative), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + relative);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace fixtures
