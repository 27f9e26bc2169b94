#include "trapflow/io.hpp"

#include "trapflow/errors.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <memory>

namespace trapflow {

namespace fs = std::filesystem;

std::string snapshot_csv(const Grid1D& grid, const Eigen::VectorXd& u) {
    std::string out = "x,u\n";
    char buf[96];
    for (int j = 0; j < grid.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17e,%.17e\n", grid.center(j), u[j]);
        out += buf;
    }
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

nlohmann::json Manifest::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : files) j.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    return {{"files", j}};
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

}  // namespace

Manifest write_outputs(const fs::path& dir, const RunArtifacts& run, bool force) {
    std::error_code ec;
    if (fs::exists(dir, ec) && !fs::is_empty(dir, ec) && !force)
        throw ConfigError("output directory '" + dir.string() + "' is not empty (use --force to overwrite)");
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

    std::map<std::string, std::string> files = run.extra;
    nlohmann::json summary = run.summary;
    summary["tool_version"] = TRAPFLOW_VERSION;
    nlohmann::json index = nlohmann::json::array();
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
        files[name] = snapshot_csv(run.grid, run.snapshots[k].u);
        index.push_back({{"file", name}, {"time", run.snapshots[k].time}});
    }
    summary["snapshots"] = index;
    files["summary.json"] = summary.dump(2) + "\n";

    Manifest manifest;
    for (const auto& [name, content] : files)
        manifest.files.push_back({name, sha256_hex(content), content.size()});
    // The manifest goes first so an interrupted run is detectable.
    write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    for (const auto& [name, content] : files) write_file(dir / name, content);
    return manifest;
}

}  // namespace trapflow
