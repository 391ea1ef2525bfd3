#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace firmscope::detail {

// Minimal ustar writer/reader for packed root filesystems. Writes are
// deterministic: caller supplies entries in order, timestamps are zero,
// ownership is root, no extended headers. Paths longer than name+prefix
// capacity are rejected.
class TarWriter {
public:
    explicit TarWriter(const std::filesystem::path& out_path)
        : out_(out_path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open archive " + out_path.string());
    }

    void add_dir(const std::string& rel_path, unsigned mode = 0755) {
        write_header(rel_path + "/", 0, mode, '5', "");
    }

    void add_file(const std::string& rel_path, std::string_view content, unsigned mode = 0644) {
        write_header(rel_path, content.size(), mode, '0', "");
        out_.write(content.data(), static_cast<std::streamsize>(content.size()));
        pad_to_block(content.size());
    }

    void add_symlink(const std::string& rel_path, const std::string& target) {
        if (target.size() > 100) throw std::runtime_error("symlink target too long: " + target);
        write_header(rel_path, 0, 0777, '2', target);
    }

    void finish() {
        char zero[1024] = {};
        out_.write(zero, sizeof(zero));
        out_.flush();
        if (!out_) throw std::runtime_error("archive write failure");
    }

private:
    void pad_to_block(std::size_t n) {
        std::size_t rem = n % 512;
        if (rem) {
            char zero[512] = {};
            out_.write(zero, static_cast<std::streamsize>(512 - rem));
        }
    }

    static void put_octal(char* field, std::size_t width, unsigned long long v) {
        // width includes the trailing NUL
        std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1), v);
    }

    void write_header(const std::string& name, std::size_t size, unsigned mode, char typeflag,
                      const std::string& linkname) {
        char h[512] = {};
        std::string n = name, prefix;
        if (n.size() > 100) {
            // split at a '/' so prefix<=155 and name<=100
            std::size_t cut = n.rfind('/', n.size() > 156 ? 155 : n.size() - 1);
            if (cut == std::string::npos || n.size() - cut - 1 > 100 || cut > 155)
                throw std::runtime_error("path too long for ustar: " + name);
            prefix = n.substr(0, cut);
            n = n.substr(cut + 1);
        }
        std::memcpy(h, n.data(), n.size());
        put_octal(h + 100, 8, mode & 07777);
        put_octal(h + 108, 8, 0);  // uid
        put_octal(h + 116, 8, 0);  // gid
        put_octal(h + 124, 12, typeflag == '0' ? size : 0);
        put_octal(h + 136, 12, 0);  // mtime
        std::memset(h + 148, ' ', 8);
        h[156] = typeflag;
        std::memcpy(h + 157, linkname.data(), linkname.size());
        std::memcpy(h + 257, "ustar", 5);
        h[263] = '0';
        h[264] = '0';
        std::memcpy(h + 345, prefix.data(), prefix.size());
        unsigned sum = 0;
        for (unsigned char c : h) sum += c;
        put_octal(h + 148, 7, sum);
        h[155] = ' ';
        out_.write(h, 512);
    }

    std::ofstream out_;
};

struct TarEntry {
    std::string path;
    char type = '0';  // '0' file, '5' dir, '2' symlink
    unsigned mode = 0644;
    std::string content;   // file data or symlink target
};

inline std::vector<TarEntry> tar_read(const std::filesystem::path& archive) {
    std::ifstream in(archive, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open archive " + archive.string());
    std::vector<TarEntry> entries;
    char h[512];
    while (in.read(h, 512)) {
        bool all_zero = true;
        for (char c : h)
            if (c) { all_zero = false; break; }
        if (all_zero) break;
        TarEntry e;
        std::string name(h, strnlen(h, 100));
        std::string prefix(h + 345, strnlen(h + 345, 155));
        e.path = prefix.empty() ? name : prefix + "/" + name;
        if (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
        e.mode = static_cast<unsigned>(std::strtoul(h + 100, nullptr, 8));
        std::size_t size = static_cast<std::size_t>(std::strtoull(h + 124, nullptr, 8));
        e.type = h[156] == '\0' ? '0' : h[156];
        if (e.type == '2') {
            e.content.assign(h + 157, strnlen(h + 157, 100));
        } else if (e.type == '0') {
            e.content.resize(size);
            in.read(e.content.data(), static_cast<std::streamsize>(size));
            std::size_t rem = size % 512;
            if (rem) in.seekg(static_cast<std::streamoff>(512 - rem), std::ios::cur);
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

// Materializes an archive into `dest` (which is created).
inline void tar_extract(const std::filesystem::path& archive, const std::filesystem::path& dest) {
    namespace fs = std::filesystem;
    fs::create_directories(dest);
    for (auto& e : tar_read(archive)) {
        fs::path p = dest / e.path;
        if (e.type == '5') {
            fs::create_directories(p);
        } else if (e.type == '2') {
            fs::create_directories(p.parent_path());
            std::error_code ec;
            fs::remove(p, ec);
            fs::create_symlink(e.content, p);
        } else {
            fs::create_directories(p.parent_path());
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            out.write(e.content.data(), static_cast<std::streamsize>(e.content.size()));
            if (e.mode & 0100)
                fs::permissions(p, fs::perms::owner_all | fs::perms::group_read |
                                       fs::perms::group_exec | fs::perms::others_read |
                                       fs::perms::others_exec);
        }
    }
}

}  // namespace firmscope::detail
