#pragma once

#include <string>

#include "json.hpp"

namespace tstok {

// System prompt template loaded from <dir>/<template_id>.txt with {length},
// {channels} and optional {labels} fields interpolated. The plot is attached
// as generator input alongside the text.
struct PromptBundle {
    std::string template_id;
    std::string system_text;
    std::string plot_path;
    nlohmann::json metadata;
};

PromptBundle assemble_prompt(const std::string& templates_dir, const std::string& template_id,
                             const nlohmann::json& metadata, const std::string& plot_ref);

std::string load_text_file(const std::string& path);

} // namespace tstok
