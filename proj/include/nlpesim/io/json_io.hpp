#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

using json = nlohmann::ordered_json;

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw data_error("json: cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw data_error("json: write to '" + path + "' failed");
}

inline json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("json: cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error("json: '" + path + "': " + e.what());
    }
}

// Upstream stage output required by a partial run.
inline json load_artifact(const std::string& path, const std::string& producing_stage) {
    if (!std::filesystem::exists(path))
        throw missing_artifact_error("missing artifact '" + path + "'; run the '" +
                                     producing_stage + "' stage first");
    return load_json(path);
}

inline void require_artifact(const std::string& path, const std::string& producing_stage) {
    if (!std::filesystem::exists(path))
        throw missing_artifact_error("missing artifact '" + path + "'; run the '" +
                                     producing_stage + "' stage first");
}

} // namespace nlpesim
