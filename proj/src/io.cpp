#include "ceh/io.hpp"

#include <fstream>

#include "ceh/errors.hpp"

namespace ceh {

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("IoError: cannot write '" + tmp.string() + "'");
        out << text;
        if (!out) throw IoError("IoError: short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("IoError: cannot rename '" + tmp.string() + "': " + ec.message());
}

}  // namespace ceh
