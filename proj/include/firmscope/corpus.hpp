#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "firmscope/detail/sha256.hpp"
#include "firmscope/fsutil.hpp"
#include "firmscope/workspace.hpp"

namespace firmscope::corpus {

namespace fs = std::filesystem;

struct SelectionVerdict {
    bool is_linux_like = false;
    bool has_web_server_binary = false;
    bool has_web_config = false;
    bool has_web_content = false;
    bool selected = false;
};

struct FirmwareImage {
    std::string id;  // 64 lowercase hex chars
    std::string source_path;
    std::optional<std::string> vendor;
    std::string ingested_at;  // ISO-8601 UTC
    SelectionVerdict selection;
};

inline const std::vector<std::string>& linux_markers() {
    static const std::vector<std::string> v = {"bin/sh", "bin/busybox", "sbin/init", "init",
                                               "linuxrc"};
    return v;
}

inline const std::vector<std::string>& web_server_basenames() {
    static const std::vector<std::string> v = {"httpd",     "boa",  "lighttpd", "thttpd",
                                               "minihttpd", "mini_httpd", "webs", "goahead"};
    return v;
}

inline const std::vector<std::string>& web_config_basenames() {
    static const std::vector<std::string> v = {"boa.conf", "lighttpd.conf", "thttpd.conf",
                                               "httpd.conf", "mini_httpd.conf"};
    return v;
}

inline const std::vector<std::string>& web_content_extensions() {
    static const std::vector<std::string> v = {"html", "shtml", "htm", "php",
                                               "asp",  "cgi",   "pl",  "js"};
    return v;
}

inline SelectionVerdict classify_selection(const fs::path& tree_path) {
    SelectionVerdict v;
    for (auto& e : fsutil::walk(tree_path)) {
        if (e.type == fsutil::NodeType::Dir) continue;
        for (auto& m : linux_markers()) {
            if (e.rel_path == m || detail::ends_with(e.rel_path, "/" + m)) {
                v.is_linux_like = true;
                break;
            }
        }
        std::string base = fsutil::basename_of(e.rel_path);
        for (auto& n : web_server_basenames())
            if (base == n) v.has_web_server_binary = true;
        for (auto& n : web_config_basenames())
            if (base == n) v.has_web_config = true;
        std::string ext = fsutil::extension_lower(e.rel_path);
        for (auto& x : web_content_extensions())
            if (ext == x) v.has_web_content = true;
    }
    v.selected = v.is_linux_like &&
                 (v.has_web_server_binary || v.has_web_config || v.has_web_content);
    return v;
}

// Content identity of a tree: SHA-256 over a sorted, NUL-delimited stream of
// (relative path, mode class, content hash) triples. Symlinks hash their
// target string and are never followed; unreadable files contribute a fixed
// sentinel so permission-broken corpora still get stable ids.
inline std::string canonical_tree_id(const fs::path& tree_path) {
    static const std::string kUnreadableSentinel(64, '0');
    detail::Sha256 h;
    for (auto& e : fsutil::walk(tree_path)) {
        char mode_class;
        std::string content_hash;
        switch (e.type) {
            case fsutil::NodeType::Dir:
                mode_class = 'd';
                content_hash = detail::sha256_hex("");
                break;
            case fsutil::NodeType::Symlink: {
                mode_class = 'l';
                std::error_code ec;
                auto tgt = fs::read_symlink(tree_path / e.rel_path, ec);
                content_hash = ec ? kUnreadableSentinel : detail::sha256_hex(tgt.string());
                break;
            }
            case fsutil::NodeType::File: {
                mode_class = e.executable ? 'x' : 'f';
                std::ifstream in(tree_path / e.rel_path, std::ios::binary);
                if (!in) {
                    content_hash = kUnreadableSentinel;
                } else {
                    detail::Sha256 fh;
                    char buf[65536];
                    while (in) {
                        in.read(buf, sizeof(buf));
                        fh.update(buf, static_cast<std::size_t>(in.gcount()));
                    }
                    content_hash = fh.hexdigest();
                }
                break;
            }
            default:
                mode_class = 'o';
                content_hash = kUnreadableSentinel;
        }
        h.update(e.rel_path);
        h.update("\0", 1);
        h.update(&mode_class, 1);
        h.update("\0", 1);
        h.update(content_hash);
        h.update("\0", 1);
    }
    return h.hexdigest();
}

inline std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void to_json(nlohmann::json& j, const SelectionVerdict& v) {
    j = {{"is_linux_like", v.is_linux_like},
         {"has_web_server_binary", v.has_web_server_binary},
         {"has_web_config", v.has_web_config},
         {"has_web_content", v.has_web_content},
         {"selected", v.selected}};
}

inline void from_json(const nlohmann::json& j, SelectionVerdict& v) {
    v.is_linux_like = j.at("is_linux_like").get<bool>();
    v.has_web_server_binary = j.at("has_web_server_binary").get<bool>();
    v.has_web_config = j.at("has_web_config").get<bool>();
    v.has_web_content = j.at("has_web_content").get<bool>();
    v.selected = j.at("selected").get<bool>();
}

inline void to_json(nlohmann::json& j, const FirmwareImage& f) {
    j = {{"id", f.id},
         {"source_path", f.source_path},
         {"ingested_at", f.ingested_at},
         {"selection", f.selection}};
    if (f.vendor) j["vendor"] = *f.vendor;
}

inline void from_json(const nlohmann::json& j, FirmwareImage& f) {
    f.id = j.at("id").get<std::string>();
    f.source_path = j.at("source_path").get<std::string>();
    f.ingested_at = j.at("ingested_at").get<std::string>();
    f.selection = j.at("selection").get<SelectionVerdict>();
    if (j.contains("vendor")) f.vendor = j["vendor"].get<std::string>();
}

// Ingests an unpacked tree: computes the canonical id, copies the tree into
// the workspace and writes the manifest. Re-ingesting an identical tree is a
// no-op returning the existing entry.
inline FirmwareImage ingest(Workspace& ws, const fs::path& tree_path,
                            std::optional<std::string> vendor = std::nullopt) {
    std::error_code ec;
    if (!fs::is_directory(tree_path, ec))
        throw std::runtime_error("unreadable tree path: " + tree_path.string());

    FirmwareImage img;
    img.id = canonical_tree_id(tree_path);
    img.source_path = fs::absolute(tree_path).string();
    img.vendor = std::move(vendor);

    DirLock lock(ws.dir(img.id));
    if (fs::exists(ws.manifest_path(img.id))) {
        FirmwareImage existing = ws.read_json(ws.manifest_path(img.id)).get<FirmwareImage>();
        return existing;
    }
    img.ingested_at = now_iso8601();
    img.selection = classify_selection(tree_path);
    fsutil::copy_tree(tree_path, ws.tree_dir(img.id));
    ws.write_json(ws.manifest_path(img.id), img);
    return img;
}

}  // namespace firmscope::corpus
