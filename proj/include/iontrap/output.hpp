#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace iontrap {

// 17 significant digits, enough to round-trip any double
std::string format_double(double v);

std::string sha256_hex(const void* data, size_t size);
std::string sha256_file(const std::filesystem::path& path);

// CSV with LF line endings; floating-point fields via format_double
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
};

// Collects every file a run writes; manifest.txt lists "sha256  relpath"
// sorted by path.
class OutputManifest {
public:
    explicit OutputManifest(std::filesystem::path dir);
    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path record(const std::string& relpath);  // registers, returns full path
    std::string render() const;                                // manifest body
    std::filesystem::path write() const;                       // writes manifest.txt

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

}  // namespace iontrap
