#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "firmscope/fsutil.hpp"

namespace firmscope {

namespace fs = std::filesystem;

// Per-firmware directory layout inside the workspace. Later stages add their
// own artifacts next to the manifest.
class Workspace {
public:
    explicit Workspace(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

    const fs::path& root() const { return root_; }

    fs::path dir(const std::string& firmware_id) const { return root_ / firmware_id; }
    fs::path tree_dir(const std::string& id) const { return dir(id) / "tree"; }
    fs::path manifest_path(const std::string& id) const { return dir(id) / "manifest.json"; }
    fs::path rootfs_dir(const std::string& id) const { return dir(id) / "rootfs"; }
    fs::path sessions_dir(const std::string& id) const { return dir(id) / "sessions"; }
    fs::path static_dir(const std::string& id) const { return dir(id) / "static"; }

    std::vector<std::string> firmware_ids() const {
        std::vector<std::string> ids;
        if (!fs::exists(root_)) return ids;
        for (auto& de : fs::directory_iterator(root_)) {
            if (de.is_directory() && fs::exists(de.path() / "manifest.json"))
                ids.push_back(de.path().filename().string());
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    void write_json(const fs::path& p, const nlohmann::json& j) const {
        fsutil::write_file(p, j.dump(2) + "\n");
    }

    nlohmann::json read_json(const fs::path& p) const {
        auto data = fsutil::read_file(p);
        if (!data) throw std::runtime_error("cannot read " + p.string());
        return nlohmann::json::parse(*data);
    }

private:
    fs::path root_;
};

// Advisory single-writer lock on a firmware workspace directory. Blocks until
// the lock is granted; released on destruction.
class DirLock {
public:
    explicit DirLock(const fs::path& dir) {
        fs::create_directories(dir);
        fd_ = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0) ::flock(fd_, LOCK_EX);
    }
    ~DirLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace firmscope
