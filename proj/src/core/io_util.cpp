#include "io_util.hpp"

#include <cstdio>
#include <fstream>

#include "error.hpp"

namespace markcorr {

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) fail(ErrorCode::io, "cannot open " + tmp + " for writing");
        file << content;
        if (!file) fail(ErrorCode::io, "write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        fail(ErrorCode::io, "cannot move " + tmp + " to " + path);
    }
}

} // namespace markcorr
