#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

namespace ssmic::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Collects what one command run read, wrote and decided, and emits the
/// run manifest. Every data output goes through write_output so that its
/// checksum is recorded; "-" means standard output.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    nlohmann::json& parameters() { return parameters_; }
    void record_input(const std::filesystem::path& path);
    void write_output(const std::string& path, const std::string& content);

    /// Destination: `explicit_path` if given, else "<first file output>.manifest.json",
    /// else standard error.
    void emit(const std::string& explicit_path) const;

private:
    std::string command_;
    nlohmann::json parameters_ = nlohmann::json::object();
    nlohmann::json inputs_ = nlohmann::json::array();
    nlohmann::json outputs_ = nlohmann::json::array();
    std::string first_file_output_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace ssmic::cli
