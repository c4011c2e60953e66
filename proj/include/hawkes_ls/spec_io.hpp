#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hawkes_ls/model.hpp"

namespace hawkes_ls {

inline constexpr std::string_view kSpecSchema = "hawkes-ls/spec-v1";

// Curve, kernel and spec documents. Variants are tagged unions keyed by "type";
// unknown keys are rejected with InvalidSpec.
nlohmann::json to_json(const ScalarCurve& curve);
nlohmann::json to_json(const Kernel& kernel);
nlohmann::json to_json(const ModelSpec& spec);

ScalarCurve curve_from_json(const nlohmann::json& doc);
Kernel kernel_from_json(const nlohmann::json& doc);
ModelSpec spec_from_json(const nlohmann::json& doc);

/// Parses text; JSON syntax errors surface as InvalidSpec.
ModelSpec spec_from_string(std::string_view text);
ModelSpec load_spec(const std::string& path);

/// FNV-1a 64 of the canonical (compact, key-sorted) JSON form.
std::uint64_t spec_hash(const ModelSpec& spec);
std::string hash_hex(std::uint64_t hash);

}  // namespace hawkes_ls
