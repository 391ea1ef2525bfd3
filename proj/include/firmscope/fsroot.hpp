#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "firmscope/detail/tar.hpp"
#include "firmscope/fsutil.hpp"
#include "firmscope/workspace.hpp"

namespace firmscope::fsroot {

namespace fs = std::filesystem;

inline const std::vector<std::string>& key_directories() {
    static const std::vector<std::string> v = {"bin", "sbin", "etc", "usr"};
    return v;
}

inline const std::vector<std::string>& key_files() {
    static const std::vector<std::string> v = {"init",    "linuxrc",  "bin/sh",
                                               "bin/bash", "bin/dash", "bin/busybox"};
    return v;
}

struct Variant {
    bool sanitized = false;
    int generation = 0;  // Sanitized(k); 0 for the original

    std::string name() const {
        return sanitized ? "sanitized-" + std::to_string(generation) : "original";
    }
    bool operator==(const Variant&) const = default;
};

struct RootFsCandidate {
    std::string firmware_id;
    std::string root_rel_path;  // relative to the tree, "" for the tree itself
    int score = 0;
    int key_file_count = 0;
    Variant variant;
    std::string packed_path;  // set by pack_rootfs
};

enum class RepairReason { TargetExists, TargetMissing, NotTextual };

struct SymlinkRepair {
    std::string path;    // relative to the candidate root
    std::string target;  // the content string
    bool applied = false;
    RepairReason reason = RepairReason::TargetMissing;
};

inline const char* to_string(RepairReason r) {
    switch (r) {
        case RepairReason::TargetExists: return "target-exists";
        case RepairReason::TargetMissing: return "target-missing";
        case RepairReason::NotTextual: return "not-textual";
    }
    return "?";
}

inline int candidate_score(const fs::path& root, int* key_file_count = nullptr) {
    int dirs = 0, files = 0;
    std::error_code ec;
    for (auto& d : key_directories())
        if (fs::is_directory(root / d, ec)) ++dirs;
    for (auto& f : key_files()) {
        auto st = fs::symlink_status(root / f, ec);
        if (!ec && (fs::is_regular_file(st) || fs::is_symlink(st))) ++files;
    }
    if (key_file_count) *key_file_count = files;
    return dirs + files;
}

// Finds every directory that looks like a root filesystem (score >= 1).
// A nested candidate that scores no higher than an enclosing one and has no
// key files of its own is an artifact of the bigger root (usr/, stray etc/)
// and is dropped. Output: descending score, then shallowest, then path.
inline std::vector<RootFsCandidate> scan_candidates(const fs::path& tree_path,
                                                    const std::string& firmware_id = {}) {
    std::vector<RootFsCandidate> found;
    auto consider = [&](const std::string& rel) {
        RootFsCandidate c;
        c.firmware_id = firmware_id;
        c.root_rel_path = rel;
        c.score = candidate_score(rel.empty() ? tree_path : tree_path / rel, &c.key_file_count);
        if (c.score >= 1) found.push_back(std::move(c));
    };
    consider("");
    for (auto& e : fsutil::walk(tree_path))
        if (e.type == fsutil::NodeType::Dir) consider(e.rel_path);

    std::vector<RootFsCandidate> kept;
    for (auto& c : found) {
        bool shadowed = false;
        for (auto& other : found) {
            if (&other == &c) continue;
            if (fsutil::is_ancestor(other.root_rel_path, c.root_rel_path) &&
                other.score >= c.score &&
                !(other.key_file_count > 0 && c.key_file_count > 0)) {
                shadowed = true;
                break;
            }
        }
        if (!shadowed) kept.push_back(c);
    }
    auto depth = [](const std::string& p) {
        return p.empty() ? 0 : 1 + std::count(p.begin(), p.end(), '/');
    };
    std::sort(kept.begin(), kept.end(), [&](const RootFsCandidate& a, const RootFsCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (depth(a.root_rel_path) != depth(b.root_rel_path))
            return depth(a.root_rel_path) < depth(b.root_rel_path);
        return a.root_rel_path < b.root_rel_path;
    });
    return kept;
}

// Unpackers sometimes materialize symlinks as text files holding the target
// path. Flags regular files whose whole content is one printable path line;
// the reason records whether the target resolves inside the root.
inline std::vector<SymlinkRepair> detect_broken_symlinks(const fs::path& root) {
    constexpr std::size_t kMaxLen = 4096;
    std::vector<SymlinkRepair> repairs;
    for (auto& e : fsutil::walk(root)) {
        if (e.type != fsutil::NodeType::File || e.size == 0 || e.size > kMaxLen) continue;
        auto content = fsutil::read_file(root / e.rel_path, kMaxLen + 1);
        if (!content || content->empty()) continue;
        std::string_view text = *content;
        if (!(detail::starts_with(text, "/") || detail::starts_with(text, "./") ||
              detail::starts_with(text, "../")))
            continue;

        SymlinkRepair r;
        r.path = e.rel_path;

        std::string_view body = text;
        if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
        bool textual = !body.empty();
        for (char c : body) {
            if (c == '\0' || c == '\n' ||
                !std::isprint(static_cast<unsigned char>(c))) {
                textual = false;
                break;
            }
        }
        if (!textual) {
            for (char c : text.substr(0, 64)) {
                if (!std::isprint(static_cast<unsigned char>(c))) break;
                r.target.push_back(c);
            }
            r.reason = RepairReason::NotTextual;
        } else {
            r.target = std::string(body);
            auto resolved = fsutil::resolve_within(fsutil::dirname_of(e.rel_path), r.target);
            std::error_code ec;
            bool exists = resolved && fs::exists(fs::symlink_status(root / *resolved, ec)) && !ec;
            r.reason = exists ? RepairReason::TargetExists : RepairReason::TargetMissing;
        }
        r.applied = (r.reason == RepairReason::TargetExists);
        repairs.push_back(std::move(r));
    }
    return repairs;
}

// Applies all TargetExists repairs in a materialized copy: the text file is
// replaced by a symlink to its content string.
inline void apply_repairs(const fs::path& root, const std::vector<SymlinkRepair>& repairs) {
    for (auto& r : repairs) {
        if (r.reason != RepairReason::TargetExists) continue;
        fs::path p = root / r.path;
        fs::remove(p);
        fs::create_symlink(r.target, p);
    }
}

struct MaterializedVariant {
    Variant variant;
    fs::path dir;
    std::vector<SymlinkRepair> repairs;  // the repairs applied (empty for original)
};

// A candidate yields its original plus, when repairable symlinks exist, one
// sanitized variant with every repair applied. Variants are full copies so a
// failing emulation can never corrupt the source tree.
inline std::vector<MaterializedVariant> generate_variants(const fs::path& candidate_root,
                                                          const fs::path& out_dir) {
    std::vector<MaterializedVariant> out;
    fs::create_directories(out_dir);

    MaterializedVariant original;
    original.variant = Variant{};
    original.dir = out_dir / original.variant.name();
    if (!fs::exists(original.dir)) fsutil::copy_tree(candidate_root, original.dir);
    out.push_back(original);

    auto repairs = detect_broken_symlinks(candidate_root);
    bool any_applicable = std::any_of(repairs.begin(), repairs.end(), [](const SymlinkRepair& r) {
        return r.reason == RepairReason::TargetExists;
    });
    if (any_applicable) {
        MaterializedVariant sanitized;
        sanitized.variant = Variant{true, 1};
        sanitized.dir = out_dir / sanitized.variant.name();
        if (!fs::exists(sanitized.dir)) {
            fsutil::copy_tree(candidate_root, sanitized.dir);
            apply_repairs(sanitized.dir, repairs);
        }
        sanitized.repairs = std::move(repairs);
        out.push_back(std::move(sanitized));
    }
    return out;
}

// Deterministic archive of a materialized candidate: sorted entries, zeroed
// timestamps, root ownership. Same content in, byte-identical archive out.
inline fs::path pack_rootfs(const fs::path& variant_root, const fs::path& archive_path) {
    if (candidate_score(variant_root) < 1)
        throw std::runtime_error("refusing to pack non-candidate root " + variant_root.string());
    fs::create_directories(archive_path.parent_path());
    detail::TarWriter tw(archive_path);
    for (auto& e : fsutil::walk(variant_root)) {
        switch (e.type) {
            case fsutil::NodeType::Dir:
                tw.add_dir(e.rel_path);
                break;
            case fsutil::NodeType::Symlink:
                tw.add_symlink(e.rel_path, fs::read_symlink(variant_root / e.rel_path).string());
                break;
            case fsutil::NodeType::File: {
                auto content = fsutil::read_file(variant_root / e.rel_path);
                tw.add_file(e.rel_path, content.value_or(""), e.executable ? 0755u : 0644u);
                break;
            }
            default:
                break;
        }
    }
    tw.finish();
    return archive_path;
}

inline void to_json(nlohmann::json& j, const SymlinkRepair& r) {
    j = {{"path", r.path},
         {"target", r.target},
         {"applied", r.applied},
         {"reason", to_string(r.reason)}};
}

inline void to_json(nlohmann::json& j, const RootFsCandidate& c) {
    j = {{"firmware_id", c.firmware_id},
         {"root_rel_path", c.root_rel_path},
         {"score", c.score},
         {"key_file_count", c.key_file_count},
         {"variant", c.variant.name()},
         {"packed_path", c.packed_path}};
}

inline void from_json(const nlohmann::json& j, RootFsCandidate& c) {
    c.firmware_id = j.value("firmware_id", "");
    c.root_rel_path = j.at("root_rel_path").get<std::string>();
    c.score = j.at("score").get<int>();
    c.key_file_count = j.value("key_file_count", 0);
    std::string v = j.value("variant", "original");
    c.variant = v == "original" ? Variant{} : Variant{true, 1};
    c.packed_path = j.value("packed_path", "");
}

// Full stage for one ingested firmware: scan, generate variants, pack, and
// record everything in rootfs/candidates.json.
inline std::vector<RootFsCandidate> run_stage(Workspace& ws, const std::string& firmware_id) {
    fs::path tree = ws.tree_dir(firmware_id);
    auto candidates = scan_candidates(tree, firmware_id);
    fs::path out = ws.rootfs_dir(firmware_id);
    fs::create_directories(out);

    nlohmann::json report = nlohmann::json::array();
    std::vector<RootFsCandidate> packed;
    int index = 0;
    for (auto& cand : candidates) {
        fs::path cand_root = cand.root_rel_path.empty() ? tree : tree / cand.root_rel_path;
        auto variants = generate_variants(cand_root, out / ("variants-c" + std::to_string(index)));
        nlohmann::json centry = {{"root_rel_path", cand.root_rel_path},
                                 {"score", cand.score},
                                 {"key_file_count", cand.key_file_count},
                                 {"variants", nlohmann::json::array()}};
        for (auto& mv : variants) {
            RootFsCandidate rc = cand;
            rc.variant = mv.variant;
            std::string archive_name = "c" + std::to_string(index) + "-" + mv.variant.name() + ".tar";
            rc.packed_path = pack_rootfs(mv.dir, out / archive_name).string();
            nlohmann::json ventry = {{"name", mv.variant.name()},
                                     {"packed_path", rc.packed_path},
                                     {"repairs", nlohmann::json::array()}};
            for (auto& r : mv.repairs) ventry["repairs"].push_back(nlohmann::json(r));
            centry["variants"].push_back(ventry);
            packed.push_back(std::move(rc));
        }
        report.push_back(centry);
        ++index;
    }
    ws.write_json(out / "candidates.json", report);
    return packed;
}

}  // namespace firmscope::fsroot
