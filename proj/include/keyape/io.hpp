#ifndef KEYAPE_IO_HPP
#define KEYAPE_IO_HPP

#include <string>
#include <vector>

namespace keyape {

// Throws Error(kIo) when the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);
std::string read_file(const std::string& path);

// Writes to "<path>.tmp" and renames over `path`, so readers never observe a
// partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace keyape

#endif  // KEYAPE_IO_HPP
