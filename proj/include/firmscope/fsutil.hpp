#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "firmscope/detail/util.hpp"

namespace firmscope::fsutil {

namespace fs = std::filesystem;

enum class NodeType { File, Dir, Symlink, Other };

struct Entry {
    std::string rel_path;  // '/'-separated, no leading slash
    NodeType type = NodeType::Other;
    bool executable = false;
    std::uintmax_t size = 0;
};

// Deterministic recursive listing. Symlinks are reported, never followed.
// Unreadable children are skipped; the count of skips is reported when asked.
inline std::vector<Entry> walk(const fs::path& root, std::size_t* skipped = nullptr) {
    std::vector<Entry> out;
    if (skipped) *skipped = 0;
    std::error_code ec;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) return out;
    for (auto end = fs::end(it); it != end; it.increment(ec)) {
        if (ec) {
            if (skipped) ++*skipped;
            ec.clear();
            continue;
        }
        const auto& de = *it;
        Entry e;
        e.rel_path = de.path().lexically_relative(root).generic_string();
        std::error_code sec;
        auto st = de.symlink_status(sec);
        if (sec) {
            if (skipped) ++*skipped;
            continue;
        }
        if (fs::is_symlink(st)) {
            e.type = NodeType::Symlink;
        } else if (fs::is_directory(st)) {
            e.type = NodeType::Dir;
        } else if (fs::is_regular_file(st)) {
            e.type = NodeType::File;
            e.executable = (st.permissions() & fs::perms::owner_exec) != fs::perms::none;
            e.size = de.file_size(sec);
            if (sec) e.size = 0;
        } else {
            e.type = NodeType::Other;
        }
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(),
              [](const Entry& a, const Entry& b) { return a.rel_path < b.rel_path; });
    return out;
}

inline std::optional<std::string> read_file(const fs::path& p,
                                            std::size_t max_bytes = SIZE_MAX) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::string data;
    char buf[65536];
    while (in && data.size() < max_bytes) {
        in.read(buf, static_cast<std::streamsize>(
                         std::min(sizeof(buf), max_bytes - data.size())));
        data.append(buf, static_cast<std::size_t>(in.gcount()));
    }
    return data;
}

inline void write_file(const fs::path& p, std::string_view data) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + p.string());
}

inline std::string extension_lower(std::string_view path) {
    auto slash = path.find_last_of('/');
    std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot == std::string_view::npos || dot == 0) return {};
    return detail::to_lower(base.substr(dot + 1));
}

inline std::string basename_of(std::string_view path) {
    auto slash = path.find_last_of('/');
    return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

inline std::string dirname_of(std::string_view path) {
    auto slash = path.find_last_of('/');
    return slash == std::string_view::npos ? std::string{} : std::string(path.substr(0, slash));
}

// Lexically normalizes `target` (absolute, or relative to `base_dir`) against a
// virtual root. Returns the root-relative path, or nullopt when the path
// escapes the root. No symlink chasing; '/'-separated inputs.
inline std::optional<std::string> resolve_within(std::string_view base_dir,
                                                 std::string_view target) {
    std::vector<std::string> parts;
    if (!target.empty() && target[0] != '/') {
        for (auto& c : detail::split(base_dir, '/'))
            if (!c.empty()) parts.push_back(c);
    }
    for (auto& c : detail::split(target, '/')) {
        if (c.empty() || c == ".") continue;
        if (c == "..") {
            if (parts.empty()) return std::nullopt;  // escapes the root
            parts.pop_back();
            continue;
        }
        parts.push_back(c);
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back('/');
        out += parts[i];
    }
    return out;
}

inline bool is_ancestor(std::string_view ancestor, std::string_view path) {
    if (ancestor.empty()) return !path.empty();
    return path.size() > ancestor.size() && detail::starts_with(path, ancestor) &&
           path[ancestor.size()] == '/';
}

// Recursive copy preserving symlinks and permission bits.
inline void copy_tree(const fs::path& from, const fs::path& to) {
    fs::create_directories(to);
    fs::copy(from, to,
             fs::copy_options::recursive | fs::copy_options::copy_symlinks |
                 fs::copy_options::overwrite_existing);
}

}  // namespace firmscope::fsutil
