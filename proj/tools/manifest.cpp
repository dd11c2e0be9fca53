#include "manifest.hpp"

#include "ssmic/error.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace ssmic::cli {

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < length; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream bytes;
    bytes << in.rdbuf();
    return sha256_hex(bytes.str());
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::record_input(const std::filesystem::path& path) {
    inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void RunManifest::write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content << std::flush;
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot write '" + path + "'");
        out << content;
        if (!out) throw InputError("failed writing '" + path + "'");
        if (first_file_output_.empty()) first_file_output_ = path;
    }
    outputs_.push_back({{"path", path}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
}

void RunManifest::emit(const std::string& explicit_path) const {
    nlohmann::json doc;
    doc["tool"] = "ssmic";
    doc["version"] = "0.1.0";
    doc["command"] = command_;
    doc["parameters"] = parameters_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const std::string text = doc.dump(2) + "\n";

    std::string target = explicit_path;
    if (target.empty() && !first_file_output_.empty()) target = first_file_output_ + ".manifest.json";
    if (target.empty()) {
        std::cerr << text;
        return;
    }
    std::ofstream out(target);
    if (!out) throw InputError("cannot write manifest '" + target + "'");
    out << text;
}

}  // namespace ssmic::cli
