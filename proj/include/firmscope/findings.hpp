#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace firmscope {

enum class Category {
    CommandExecution,
    XSS,
    CSRF,
    FileManipulation,
    FileInclusion,
    FileDisclosure,
    SQLInjection,
    FlowControl,
    CodeExecution,
    HTTPResponseSplitting,
    Unserialize,
    POPGadget,
    HTTPHeaderInjection,
    CookieNoHttpOnly,
    NoXContentTypeOptions,
    NoXFrameOptions,
    BackupFile,
    AppErrorInfo,
};

enum class Severity { High, Low };
enum class FindingSource { Static, Dynamic, Manual };

inline const char* to_string(Category c) {
    switch (c) {
        case Category::CommandExecution: return "command-execution";
        case Category::XSS: return "cross-site-scripting";
        case Category::CSRF: return "csrf";
        case Category::FileManipulation: return "file-manipulation";
        case Category::FileInclusion: return "file-inclusion";
        case Category::FileDisclosure: return "file-disclosure";
        case Category::SQLInjection: return "sql-injection";
        case Category::FlowControl: return "possible-flow-control";
        case Category::CodeExecution: return "code-execution";
        case Category::HTTPResponseSplitting: return "http-response-splitting";
        case Category::Unserialize: return "unserialize";
        case Category::POPGadget: return "pop-gadgets";
        case Category::HTTPHeaderInjection: return "http-header-injection";
        case Category::CookieNoHttpOnly: return "cookie-no-httponly";
        case Category::NoXContentTypeOptions: return "no-x-content-type-options";
        case Category::NoXFrameOptions: return "no-x-frame-options";
        case Category::BackupFile: return "backup-file";
        case Category::AppErrorInfo: return "app-error-info";
    }
    return "?";
}

inline std::optional<Category> category_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(Category::AppErrorInfo); ++i) {
        auto c = static_cast<Category>(i);
        if (s == to_string(c)) return c;
    }
    return std::nullopt;
}

inline const char* to_string(FindingSource s) {
    switch (s) {
        case FindingSource::Static: return "static";
        case FindingSource::Dynamic: return "dynamic";
        case FindingSource::Manual: return "manual";
    }
    return "?";
}

// Severity is a function of source and category: dynamic probes rate only
// command execution, XSS and CSRF as high; static reports additionally rate
// code execution, SQL injection and file inclusion as high.
inline Severity severity_for(FindingSource source, Category c) {
    if (source == FindingSource::Dynamic || source == FindingSource::Manual) {
        switch (c) {
            case Category::CommandExecution:
            case Category::XSS:
            case Category::CSRF:
                return Severity::High;
            default:
                return Severity::Low;
        }
    }
    switch (c) {
        case Category::CommandExecution:
        case Category::CodeExecution:
        case Category::SQLInjection:
        case Category::FileInclusion:
        case Category::XSS:
            return Severity::High;
        default:
            return Severity::Low;
    }
}

struct Locator {
    std::string target;               // URL or file path
    std::optional<std::string> parameter;
};

struct Finding {
    Category category = Category::AppErrorInfo;
    Severity severity = Severity::Low;
    FindingSource source = FindingSource::Dynamic;
    Locator locator;
    std::string evidence;
    std::string firmware_id;

    static Finding make(FindingSource src, Category cat, std::string target,
                        std::optional<std::string> param, std::string evidence,
                        std::string firmware_id) {
        Finding f;
        f.category = cat;
        f.source = src;
        f.severity = severity_for(src, cat);
        f.locator = {std::move(target), std::move(param)};
        f.evidence = std::move(evidence);
        f.firmware_id = std::move(firmware_id);
        return f;
    }
};

inline void to_json(nlohmann::json& j, const Finding& f) {
    j = nlohmann::json{{"category", to_string(f.category)},
                       {"severity", f.severity == Severity::High ? "high" : "low"},
                       {"source", to_string(f.source)},
                       {"locator", {{"target", f.locator.target}}},
                       {"evidence", f.evidence},
                       {"firmware_id", f.firmware_id}};
    if (f.locator.parameter) j["locator"]["parameter"] = *f.locator.parameter;
}

inline void from_json(const nlohmann::json& j, Finding& f) {
    auto cat = category_from_string(j.at("category").get<std::string>());
    if (!cat) throw std::runtime_error("unknown finding category in JSON");
    f.category = *cat;
    f.severity = j.at("severity").get<std::string>() == "high" ? Severity::High : Severity::Low;
    std::string src = j.at("source").get<std::string>();
    f.source = src == "static"    ? FindingSource::Static
               : src == "manual"  ? FindingSource::Manual
                                  : FindingSource::Dynamic;
    f.locator.target = j.at("locator").at("target").get<std::string>();
    if (j.at("locator").contains("parameter"))
        f.locator.parameter = j["locator"]["parameter"].get<std::string>();
    f.evidence = j.value("evidence", "");
    f.firmware_id = j.value("firmware_id", "");
}

}  // namespace firmscope
