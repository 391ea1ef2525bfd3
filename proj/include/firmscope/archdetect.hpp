#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "firmscope/fsutil.hpp"

namespace firmscope::archdetect {

namespace fs = std::filesystem;

enum class ArchFamily { ARM, MIPS, MIPSel, PowerPC, I386, CRIS, BFLT, NiosII, ARC, Unknown };
enum class Endianness { Little, Big, NA };

struct ArchId {
    ArchFamily family = ArchFamily::Unknown;
    Endianness endianness = Endianness::NA;

    auto operator<=>(const ArchId&) const = default;
};

inline const char* to_string(ArchFamily f) {
    switch (f) {
        case ArchFamily::ARM: return "arm";
        case ArchFamily::MIPS: return "mips";
        case ArchFamily::MIPSel: return "mipsel";
        case ArchFamily::PowerPC: return "powerpc";
        case ArchFamily::I386: return "i386";
        case ArchFamily::CRIS: return "cris";
        case ArchFamily::BFLT: return "bflt";
        case ArchFamily::NiosII: return "nios2";
        case ArchFamily::ARC: return "arc";
        case ArchFamily::Unknown: return "unknown";
    }
    return "?";
}

inline std::string to_string(const ArchId& a) {
    std::string s = to_string(a.family);
    switch (a.endianness) {
        case Endianness::Little: s += "/le"; break;
        case Endianness::Big: s += "/be"; break;
        case Endianness::NA: break;
    }
    return s;
}

inline std::optional<ArchId> arch_from_string(const std::string& s) {
    for (int f = 0; f <= static_cast<int>(ArchFamily::Unknown); ++f) {
        auto fam = static_cast<ArchFamily>(f);
        for (auto e : {Endianness::Little, Endianness::Big, Endianness::NA}) {
            ArchId a{fam, e};
            if (to_string(a) == s) return a;
        }
    }
    return std::nullopt;
}

struct ArchitectureGuess {
    std::map<ArchId, std::size_t> votes;
    ArchId winner{ArchFamily::Unknown, Endianness::NA};
    std::optional<ArchId> runner_up;
    double confidence = 0.0;
    bool tie = false;
};

// Word-pattern profiles for raw (non-ELF) binaries: function epilogue /
// prologue encodings checked on 4-byte aligned words. A hit rate above the
// threshold picks the profile.
struct OpcodeProfile {
    ArchId arch;
    struct Pattern {
        std::uint32_t mask;
        std::uint32_t value;
    };
    std::vector<Pattern> patterns;  // word read in the profile's byte order
};

inline const std::vector<OpcodeProfile>& opcode_profiles() {
    static const std::vector<OpcodeProfile> profiles = {
        // jr ra / jr ra in delay-slot idiom
        {{ArchFamily::MIPS, Endianness::Big}, {{0xFFFFFFFFu, 0x03E00008u}}},
        {{ArchFamily::MIPSel, Endianness::Little}, {{0xFFFFFFFFu, 0x03E00008u}}},
        // bx lr, push {...,lr}, pop {...,pc}
        {{ArchFamily::ARM, Endianness::Little},
         {{0xFFFFFFFFu, 0xE12FFF1Eu}, {0xFFFF4000u, 0xE92D4000u}, {0xFFFF8000u, 0xE8BD8000u}}},
        {{ArchFamily::ARM, Endianness::Big},
         {{0xFFFFFFFFu, 0xE12FFF1Eu}, {0xFFFF4000u, 0xE92D4000u}, {0xFFFF8000u, 0xE8BD8000u}}},
        // blr
        {{ArchFamily::PowerPC, Endianness::Big}, {{0xFFFFFFFFu, 0x4E800020u}}},
    };
    return profiles;
}

constexpr double kOpcodeHitThreshold = 0.02;

inline std::optional<std::pair<ArchId, double>> opcode_histogram(std::string_view bytes) {
    if (bytes.size() < 1024) return std::nullopt;
    std::size_t words = bytes.size() / 4;
    ArchId best{};
    double best_rate = 0.0;
    for (auto& prof : opcode_profiles()) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i + 4 <= bytes.size(); i += 4) {
            const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + i);
            std::uint32_t w;
            if (prof.arch.endianness == Endianness::Big)
                w = (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                    (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
            else
                w = (std::uint32_t(p[3]) << 24) | (std::uint32_t(p[2]) << 16) |
                    (std::uint32_t(p[1]) << 8) | std::uint32_t(p[0]);
            for (auto& pat : prof.patterns) {
                if ((w & pat.mask) == pat.value) {
                    ++hits;
                    break;
                }
            }
        }
        double rate = static_cast<double>(hits) / static_cast<double>(words);
        if (rate > best_rate) {
            best_rate = rate;
            best = prof.arch;
        }
    }
    if (best_rate >= kOpcodeHitThreshold) return std::make_pair(best, best_rate);
    return std::nullopt;
}

// Identifies one binary: ELF header when present, bFLT magic, then the
// opcode histogram as a fallback. Pure over the byte string.
inline std::optional<ArchId> detect_file_arch(std::string_view bytes) {
    if (bytes.size() >= 4 && bytes.substr(0, 4) == "bFLT")
        return ArchId{ArchFamily::BFLT, Endianness::NA};
    if (bytes.size() >= 20 && bytes[0] == 0x7f && bytes.substr(1, 3) == "ELF") {
        unsigned ei_data = static_cast<unsigned char>(bytes[5]);
        if (ei_data != 1 && ei_data != 2) return std::nullopt;
        Endianness endian = ei_data == 1 ? Endianness::Little : Endianness::Big;
        auto b0 = static_cast<unsigned char>(bytes[18]);
        auto b1 = static_cast<unsigned char>(bytes[19]);
        unsigned machine = endian == Endianness::Little ? (b0 | (unsigned(b1) << 8))
                                                        : ((unsigned(b0) << 8) | b1);
        switch (machine) {
            case 0x28: return ArchId{ArchFamily::ARM, endian};
            case 0x08:
                return endian == Endianness::Big ? ArchId{ArchFamily::MIPS, Endianness::Big}
                                                 : ArchId{ArchFamily::MIPSel, Endianness::Little};
            case 0x14: return ArchId{ArchFamily::PowerPC, endian};
            case 0x03: return ArchId{ArchFamily::I386, Endianness::Little};
            case 0x4C: return ArchId{ArchFamily::CRIS, endian};
            case 0x71: return ArchId{ArchFamily::NiosII, endian};
            default: return ArchId{ArchFamily::Unknown, endian};
        }
    }
    if (auto hist = opcode_histogram(bytes)) return hist->first;
    return std::nullopt;
}

inline const std::vector<std::string>& binary_path_roots() {
    static const std::vector<std::string> v = {"bin", "sbin", "usr/bin", "usr/sbin", "lib",
                                               "usr/lib"};
    return v;
}

// Majority vote across a root filesystem's executables and library paths.
// Ties keep both leaders, in enum order; planning later expands them.
inline ArchitectureGuess vote_architecture(const fs::path& rootfs) {
    ArchitectureGuess g;
    constexpr std::size_t kReadLimit = 64 * 1024;
    for (auto& e : fsutil::walk(rootfs)) {
        if (e.type != fsutil::NodeType::File) continue;
        bool in_bin_path = false;
        for (auto& root : binary_path_roots()) {
            if (e.rel_path == root || detail::starts_with(e.rel_path, root + "/")) {
                in_bin_path = true;
                break;
            }
        }
        if (!e.executable && !in_bin_path) continue;
        auto bytes = fsutil::read_file(rootfs / e.rel_path, kReadLimit);
        if (!bytes) continue;
        if (auto arch = detect_file_arch(*bytes)) ++g.votes[*arch];
    }

    std::size_t total = 0, best = 0;
    for (auto& [arch, n] : g.votes) {
        total += n;
        best = std::max(best, n);
    }
    if (total == 0) return g;

    std::vector<ArchId> leaders;
    for (auto& [arch, n] : g.votes)
        if (n == best) leaders.push_back(arch);  // map order == enum order
    g.winner = leaders.front();
    g.tie = leaders.size() >= 2;
    if (g.tie) g.runner_up = leaders[1];
    g.confidence = static_cast<double>(best) / static_cast<double>(total);
    return g;
}

// The ordered architecture list a plan must try: the winner, then every
// other vote leader when the vote tied.
inline std::vector<ArchId> plan_arch_list(const ArchitectureGuess& g) {
    std::vector<ArchId> list{g.winner};
    if (g.tie) {
        std::size_t best = g.votes.at(g.winner);
        for (auto& [arch, n] : g.votes)
            if (n == best && arch != g.winner) list.push_back(arch);
    }
    return list;
}

inline void to_json(nlohmann::json& j, const ArchitectureGuess& g) {
    nlohmann::json votes = nlohmann::json::object();
    for (auto& [arch, n] : g.votes) votes[to_string(arch)] = n;
    j = {{"votes", votes},
         {"winner", to_string(g.winner)},
         {"confidence", g.confidence},
         {"tie", g.tie}};
    if (g.runner_up) j["runner_up"] = to_string(*g.runner_up);
}

inline void from_json(const nlohmann::json& j, ArchitectureGuess& g) {
    g.votes.clear();
    for (auto& [k, v] : j.at("votes").items()) {
        if (auto a = arch_from_string(k)) g.votes[*a] = v.get<std::size_t>();
    }
    g.winner = arch_from_string(j.at("winner").get<std::string>()).value_or(ArchId{});
    g.confidence = j.at("confidence").get<double>();
    g.tie = j.at("tie").get<bool>();
    if (j.contains("runner_up"))
        g.runner_up = arch_from_string(j["runner_up"].get<std::string>());
}

}  // namespace firmscope::archdetect
