// Shared file helpers for the io modules. Writes go through a temporary
// file and a rename so readers never observe a half-written file.

#ifndef SMARTPAM_SRC_FILE_UTIL_HPP
#define SMARTPAM_SRC_FILE_UTIL_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "smartpam/error.hpp"

namespace smartpam::detail {

inline void write_file_atomically(const std::string& path, const char* data,
                                  std::size_t size) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out.write(data, static_cast<std::streamsize>(size));
        if (!out) throw Error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw Error("cannot rename " + tmp + " to " + path);
    }
}

inline void write_file_atomically(const std::string& path, const std::string& bytes) {
    write_file_atomically(path, bytes.data(), bytes.size());
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace smartpam::detail

#endif
