#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigval/path_transforms.hpp"
#include "sigval/process_models.hpp"

namespace sigval {

// Flat `key = value` configuration with dotted namespaces, e.g.
// `model_a.kind = fbm` / `model_a.hurst = 0.1`. '#' starts a comment.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated lists, e.g. `m_list = 10,20,50`.
    std::vector<double> get_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;

    // All keys beginning with `prefix.`.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

// Builds a model from keys under `prefix.`: `prefix.kind` selects the model
// and the remaining keys fill its fields (documented per model in the
// implementation; unknown kinds raise).
ModelSpec model_from_config(const Config& cfg, const std::string& prefix);

// Writes a model back out as config lines under `prefix.` (inverse of
// model_from_config for every supported kind).
std::string model_to_config(const ModelSpec& spec, const std::string& prefix);

// Reads `prefix.representation`, `prefix.lift`, `prefix.rescale`.
TransformSpec transform_from_config(const Config& cfg,
                                    const std::string& prefix);

SimGrid grid_from_config(const Config& cfg, const std::string& prefix,
                         const SimGrid& defaults = {});

} // namespace sigval
