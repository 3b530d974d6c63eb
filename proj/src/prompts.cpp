#include "tstok/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tstok/errors.hpp"

namespace tstok {

std::string load_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PromptBundle assemble_prompt(const std::string& templates_dir, const std::string& template_id,
                             const nlohmann::json& metadata, const std::string& plot_ref) {
    std::filesystem::path path = std::filesystem::path(templates_dir) / (template_id + ".txt");
    if (!std::filesystem::exists(path)) fail(errc::unknown_template, "no template named '" + template_id + "'");
    std::string text = load_text_file(path.string());

    auto interpolate = [&](const std::string& field) {
        std::string token = "{" + field + "}";
        std::size_t pos = text.find(token);
        if (pos == std::string::npos) return;
        if (!metadata.contains(field))
            fail(errc::missing_metadata, "template '" + template_id + "' needs metadata field '" + field + "'");
        std::string value;
        if (metadata[field].is_string())
            value = metadata[field].get<std::string>();
        else if (metadata[field].is_array()) {
            for (const auto& item : metadata[field]) {
                if (!value.empty()) value += ", ";
                value += item.is_string() ? item.get<std::string>() : item.dump();
            }
        } else {
            value = metadata[field].dump();
        }
        while (pos != std::string::npos) {
            text.replace(pos, token.size(), value);
            pos = text.find(token, pos + value.size());
        }
    };
    interpolate("length");
    interpolate("channels");
    interpolate("labels");

    return PromptBundle{template_id, text, plot_ref, metadata};
}

} // namespace tstok
